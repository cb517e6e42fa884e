use std::ops::Mul;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::qcore::CycloScalar;

/// Dense row-major matrix over a cyclotomic field.
#[derive(Clone, PartialEq, Debug)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<CycloScalar>,
}

impl ExactMatrix {
    pub fn from_fn(
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> CycloScalar + Sync,
    ) -> Self {
        let data = (0..rows * cols)
            .into_par_iter()
            .map(|ix| f(ix / cols, ix % cols))
            .collect();
        ExactMatrix { rows, cols, data }
    }

    pub fn try_from_fn(
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> Result<CycloScalar> + Sync,
    ) -> Result<Self> {
        let data = (0..rows * cols)
            .into_par_iter()
            .map(|ix| f(ix / cols, ix % cols))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExactMatrix { rows, cols, data })
    }

    pub fn scalar(n: usize, c: &CycloScalar) -> Self {
        let z = CycloScalar::zero(c.order());
        Self::from_fn(n, n, |i, j| if i == j { c.clone() } else { z.clone() })
    }

    pub fn diagonal(d: &[CycloScalar], order: usize) -> Self {
        let z = CycloScalar::zero(order);
        Self::from_fn(d.len(), d.len(), |i, j| {
            if i == j {
                d[i].clone()
            } else {
                z.clone()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloScalar {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[CycloScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<CycloScalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn scale(&self, c: &CycloScalar) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.par_iter().map(|x| x * c).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut acc = Self::scalar(self.rows, &CycloScalar::one(self.order()));
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    fn order(&self) -> usize {
        self.data.first().map_or(8, |x| x.order())
    }

    /// First `(i, j)` where `self` and `other` differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((0, 0));
        }
        (0..self.rows * self.cols)
            .find(|&ix| self.data[ix] != other.data[ix])
            .map(|ix| (ix / self.cols, ix % self.cols))
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.to_complex()).collect(),
        }
    }

    /// Rank by Gaussian elimination over the field.
    pub fn rank(&self) -> Result<usize> {
        let mut m = self.to_rows();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(piv) = (rank..self.rows).find(|&r| !m[r][c].is_zero()) else {
                continue;
            };
            m.swap(rank, piv);
            let inv = m[rank][c].inv()?;
            let prow: Vec<CycloScalar> = m[rank].iter().map(|x| x * &inv).collect();
            for (r, row) in m.iter_mut().enumerate() {
                if r == rank || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= &(&f * p);
                }
            }
            m[rank] = prow;
            rank += 1;
        }
        Ok(rank)
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, o.rows, "matrix shape mismatch");
        let order = self.order();
        ExactMatrix::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = CycloScalar::zero(order);
            for l in 0..self.cols {
                acc += &(self.get(i, l) * o.get(l, j));
            }
            acc
        })
    }
}

/// Dense complex matrix for the floating-point checks.
#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let data = (0..rows * cols).map(|ix| f(ix / cols, ix % cols)).collect();
        ComplexMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_fn(self.rows, self.cols, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `max |self - c I|`.
    pub fn distance_to_scalar(&self, c: Complex64) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { c } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((self.get(i, j) - want).norm());
            }
        }
        worst
    }

    pub fn max_distance(&self, o: &Self) -> f64 {
        self.data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, o: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, o.rows, "matrix shape mismatch");
        ComplexMatrix::from_fn(self.rows, o.cols, |i, j| {
            (0..self.cols).map(|l| self.get(i, l) * o.get(l, j)).sum()
        })
    }
}

impl serde::Serialize for ExactMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(ser)
    }
}

impl<'de> serde::Deserialize<'de> for ExactMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows = Vec::<Vec<CycloScalar>>::deserialize(de)?;
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(D::Error::custom("ragged matrix"));
        }
        Ok(ExactMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }
}
