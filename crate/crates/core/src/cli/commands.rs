//! The subcommands, each producing an [`Outcome`].

use std::fmt::Write as _;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use super::cache::{macdonald_key, modular_key, Cache};
use super::config::{Backend, RunConfig};
use crate::analytic::checks::{
    kzb_check, property_checks, s_transform_check, t_check, theta_checks, theta_proportionality,
    vanishing_check,
};
use crate::analytic::{stokes_check, EllipticContext, IntegralSpec, Quadrature};
use crate::error::{Error, Result};
use crate::macdonald::{evaluate, macdonald_at_root, macdonald_via_shift, FormalQ};
use crate::modular::{kirillov_compare, s_matrix, s_matrix_float, ComplexMatrix, ModularData};
use crate::qcore::QContext;
use crate::report::{CheckRecord, ReportDocument};
use crate::suite;
use crate::trace::{
    convention_exponent, psi, psi_renormalized, verma_trace_oracle, Orientation, TraceArg,
    TraceArgs, TraceQ, TraceValue,
};

/// What a command produced, in every output form it supports.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub json: Value,
    pub pretty: String,
    /// Present for matrix-valued results only.
    pub csv: Option<String>,
    pub pass: bool,
}

impl Outcome {
    fn report(doc: ReportDocument) -> Self {
        Outcome {
            pretty: pretty_report(&doc),
            pass: doc.all_pass(),
            json: serde_json::to_value(&doc).expect("report serializes"),
            csv: None,
        }
    }
}

fn cache(cfg: &RunConfig) -> Option<Cache> {
    cfg.cache_dir.as_ref().map(Cache::new)
}

/// Exact modular data, through the cache when one is configured.
pub fn modular_data(cfg: &RunConfig, ctx: &QContext) -> Result<ModularData> {
    match cache(cfg) {
        Some(c) => c.get_or_compute(&modular_key(ctx.kappa(), ctx.p()), || s_matrix(ctx)).map(|(d, _)| d),
        None => s_matrix(ctx),
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn pass_word(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

fn matrix_csv(labels: &[i64], s: &ComplexMatrix) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["m", "n", "re", "im"]).map_err(io)?;
    for (i, m) in labels.iter().enumerate() {
        for (j, n) in labels.iter().enumerate() {
            let z = s.get(i, j);
            w.write_record([m.to_string(), n.to_string(), z.re.to_string(), z.im.to_string()]).map_err(io)?;
        }
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
}

pub fn smatrix(cfg: &RunConfig, kirillov: bool) -> Result<Outcome> {
    let kappa = cfg.one_kappa()?;
    let p = cfg.require_p()?;
    let ctx = QContext::new(kappa, p)?;
    let labels = ctx_labels(&ctx);
    let mut doc = serde_json::Map::new();
    doc.insert("kappa".into(), json!(kappa));
    doc.insert("p".into(), json!(p));
    doc.insert("basis".into(), json!(labels));
    let mut pretty = format!("kappa = {kappa}, p = {p}, basis {labels:?}\n");
    let (relations, float_s) = match cfg.backend {
        Backend::Exact => {
            let data = modular_data(cfg, &ctx)?;
            let t: Map<String, Value> = labels
                .iter()
                .zip(&data.t)
                .map(|(n, x)| (n.to_string(), serde_json::to_value(x).expect("scalar serializes")))
                .collect();
            doc.insert("backend".into(), json!("exact"));
            doc.insert("T".into(), Value::Object(t));
            doc.insert("S".into(), serde_json::to_value(data.s.to_rows()).expect("matrix serializes"));
            writeln!(pretty, "T:").ok();
            for (n, x) in labels.iter().zip(&data.t) {
                writeln!(pretty, "  {n}: {x}").ok();
            }
            writeln!(pretty, "S:").ok();
            for (i, m) in labels.iter().enumerate() {
                for (j, n) in labels.iter().enumerate() {
                    writeln!(pretty, "  ({m}, {n}): {}", data.s.get(i, j)).ok();
                }
            }
            (suite::modular_records(&ctx, &data, kirillov)?, data.s.to_complex())
        }
        Backend::Float => {
            let (t, s) = s_matrix_float(&ctx)?;
            let tj: Map<String, Value> = labels.iter().zip(&t).map(|(n, z)| (n.to_string(), complex_json(*z))).collect();
            doc.insert("backend".into(), json!("float"));
            doc.insert("T".into(), Value::Object(tj));
            doc.insert(
                "S".into(),
                Value::Array(s.to_rows().into_iter().map(|r| Value::Array(r.into_iter().map(complex_json).collect())).collect()),
            );
            writeln!(pretty, "T:").ok();
            for (n, z) in labels.iter().zip(&t) {
                writeln!(pretty, "  {n}: {z:.12}").ok();
            }
            writeln!(pretty, "S:").ok();
            for (i, m) in labels.iter().enumerate() {
                for (j, n) in labels.iter().enumerate() {
                    writeln!(pretty, "  ({m}, {n}): {:.12}", s.get(i, j)).ok();
                }
            }
            let mut recs = float_relations(&ctx, &t, &s);
            if kirillov {
                recs.extend(kirillov_compare(&ctx, &modular_data(cfg, &ctx)?)?);
            }
            (recs, s)
        }
    };
    let named = |name: &str| relations.iter().filter(|r| r.name.starts_with(name)).all(|r| r.pass);
    doc.insert(
        "relations".into(),
        json!({"s_squared": pass_word(named("s_squared")), "st_cubed": pass_word(named("st_cubed"))}),
    );
    if kirillov {
        let k: Vec<_> = relations.iter().filter(|r| r.name.starts_with("kirillov")).collect();
        doc.insert("kirillov".into(), serde_json::to_value(&k).expect("records serialize"));
    }
    let report = ReportDocument::new(relations);
    writeln!(pretty, "{}", pretty_report(&report)).ok();
    Ok(Outcome {
        json: Value::Object(doc),
        pretty,
        csv: Some(matrix_csv(&labels, &float_s)?),
        pass: report.all_pass(),
    })
}

fn ctx_labels(ctx: &QContext) -> Vec<i64> {
    crate::modular::BlockBasis::new(ctx).labels()
}

/// `S² = (ST)³ = (-1)^p i q^{-p(p+1)}` in floating point.
fn float_relations(ctx: &QContext, t: &[Complex64], s: &ComplexMatrix) -> Vec<CheckRecord> {
    const TOL: f64 = 1e-12;
    let p = ctx.p();
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    let q = Complex64::from_polar(1.0, -std::f64::consts::PI * (p * (p + 1)) as f64 / ctx.kappa() as f64);
    let phase = sign * Complex64::i() * q;
    let dim = t.len();
    let tm = ComplexMatrix::from_fn(dim, dim, |i, j| if i == j { t[i] } else { Complex64::new(0.0, 0.0) });
    let st = ComplexMatrix::from_fn(dim, dim, |i, j| s.get(i, j) * tm.get(j, j));
    [
        ("s_squared", "S^2 equals (-1)^p i q^{-p(p+1)}", s.pow(2).distance_to_scalar(phase)),
        ("st_cubed", "(ST)^3 equals (-1)^p i q^{-p(p+1)}", st.pow(3).distance_to_scalar(phase)),
    ]
    .into_iter()
    .map(|(name, anchor, r)| CheckRecord::numeric(name, anchor, r, TOL).param("kappa", ctx.kappa()).param("p", p))
    .collect()
}

pub fn macdonald(cfg: &RunConfig, n: i64, k: i64, eval: Option<i64>) -> Result<Outcome> {
    if n < 0 || k < 0 {
        return Err(Error::Invalid(format!("need n, k >= 0, got n={n}, k={k}")));
    }
    let kappa = match cfg.kappa.as_slice() {
        [] => None,
        [kap] => Some(*kap),
        _ => return Err(Error::Invalid("macdonald takes a single kappa".into())),
    };
    let cache = cache(cfg);
    let key = macdonald_key(n, k, kappa);
    let (poly, value, pretty) = match kappa {
        None => {
            let compute = || macdonald_via_shift(&FormalQ, n, k);
            let p = match &cache {
                Some(c) => c.get_or_compute(&key, compute)?.0,
                None => compute()?,
            };
            let v = eval.map(|m| evaluate(&FormalQ, &p, m));
            let pretty = match &v {
                Some(v) => format!("P_{n}^({k}) = {p}\nP_{n}^({k})(q^{}) = {v}\n", eval.unwrap_or(0)),
                None => format!("P_{n}^({k}) = {p}\n"),
            };
            (serde_json::to_value(&p)?, v.map(serde_json::to_value).transpose()?, pretty)
        }
        Some(kap) => {
            let ctx = QContext::level(kap)?;
            let compute = || macdonald_at_root(&ctx, n, k);
            let p = match &cache {
                Some(c) => c.get_or_compute(&key, compute)?.0,
                None => compute()?,
            };
            let v = eval.map(|m| evaluate(&ctx, &p, m));
            let pretty = match &v {
                Some(v) => format!("P_{n}^({k}) at q = e^(pi i/{kap}) = {p}\nvalue at x = {}: {v}\n", eval.unwrap_or(0)),
                None => format!("P_{n}^({k}) at q = e^(pi i/{kap}) = {p}\n"),
            };
            (serde_json::to_value(&p)?, v.map(serde_json::to_value).transpose()?, pretty)
        }
    };
    let mut doc = match poly {
        Value::Object(m) => m,
        _ => unreachable!("polynomials serialize as objects"),
    };
    doc.insert("n".into(), json!(n));
    doc.insert("k".into(), json!(k));
    if let Some(kap) = kappa {
        doc.insert("kappa".into(), json!(kap));
    }
    if let (Some(m), Some(v)) = (eval, value) {
        doc.insert("eval".into(), json!({"m": m, "value": v}));
    }
    Ok(Outcome { json: Value::Object(doc), pretty, csv: None, pass: true })
}

/// Command-line inputs of `trace`.
#[derive(Clone, Debug)]
pub struct TraceRequest {
    pub k: i64,
    pub nu: String,
    pub mu: String,
    pub q_modulus: Option<f64>,
    pub q_arg: Option<f64>,
    pub orientation: Orientation,
    pub oracle: bool,
    pub depth: usize,
}

fn trace_arg(s: &str) -> Result<TraceArg> {
    if let Ok(n) = s.trim().parse::<i64>() {
        return Ok(TraceArg::Int(n));
    }
    super::config::parse_complex(s).map(TraceArg::Complex)
}

fn trace_value_json(v: &Result<TraceValue>) -> Value {
    match v {
        Ok(TraceValue::Exact(x)) => {
            let z = x.to_complex();
            json!({"value": [z.re, z.im], "exact": x})
        }
        Ok(TraceValue::Float(z)) => json!({"value": [z.re, z.im]}),
        Err(e) => json!({"error": e.to_string()}),
    }
}

pub fn trace(cfg: &RunConfig, req: &TraceRequest) -> Result<Outcome> {
    let q = match (cfg.kappa.as_slice(), req.q_modulus, req.q_arg) {
        ([kappa], None, None) => TraceQ::Root { kappa: *kappa, orientation: req.orientation },
        ([], r, theta) if r.is_some() || theta.is_some() => {
            let r = r.unwrap_or(1.0);
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::Invalid(format!("q modulus must be positive, got {r}")));
            }
            TraceQ::Generic(Complex64::from_polar(r, theta.unwrap_or(0.0)))
        }
        _ => return Err(Error::Invalid("give either --kappa or --q-modulus/--q-arg".into())),
    };
    let args = TraceArgs { k: req.k, nu: trace_arg(&req.nu)?, mu: trace_arg(&req.mu)?, q };
    let a = psi(&args);
    let b = psi_renormalized(&args);
    // invalid arguments are usage errors even when both evaluations fail the same way
    if let (Err(e @ Error::Invalid(_)), _) | (_, Err(e @ Error::Invalid(_))) = (&a, &b) {
        return Err(e.clone());
    }
    if let (Err(e), Err(_)) = (&a, &b) {
        return Err(e.clone());
    }
    let mut doc = Map::new();
    doc.insert("k".into(), json!(req.k));
    doc.insert("nu".into(), json!(req.nu));
    doc.insert("mu".into(), json!(req.mu));
    doc.insert("psi".into(), trace_value_json(&a));
    doc.insert("psi_renormalized".into(), trace_value_json(&b));
    let show = |v: &Result<TraceValue>| match v {
        Ok(v) => format!("{:.15}", v.to_complex()),
        Err(e) => format!("undefined ({e})"),
    };
    let mut pretty = format!("psi = {}\nPsi = {}\n", show(&a), show(&b));
    if req.oracle {
        let qz = match q {
            TraceQ::Generic(z) if z.norm() < 1.0 => z,
            _ => return Err(Error::Invalid("the Verma oracle needs a generic q with |q| < 1".into())),
        };
        let as_c = |t: TraceArg| match t {
            TraceArg::Int(n) => Complex64::from(n as f64),
            TraceArg::Complex(z) => z,
        };
        let (nu, mu) = (as_c(args.nu), as_c(args.mu));
        let o = verma_trace_oracle(req.k, nu, mu, qz, req.depth)?;
        doc.insert("oracle".into(), json!({"value": complex_json(o.value), "last_term": o.last_term, "depth": req.depth}));
        writeln!(pretty, "oracle = {:.15} (last term {:.1e})", o.value, o.last_term).ok();
        if let Ok(v) = &a {
            let c = convention_exponent(qz, nu, o.value, v.to_complex());
            let factor = (c * nu * qz.ln()).exp();
            doc.insert("convention_factor".into(), json!({"exponent": c, "value": complex_json(factor)}));
            writeln!(pretty, "oracle / psi = q^(c nu) with c = {c:.3e}").ok();
        }
    }
    Ok(Outcome { json: Value::Object(doc), pretty, csv: None, pass: true })
}

/// Which verification battery to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Relations,
    Kirillov,
    Identities,
    Kzb,
    Properties,
    Stokes,
    Theta,
    Stransform,
    Vanishing,
}

fn p_values(cfg: &RunConfig, kappa: i64) -> Vec<i64> {
    match cfg.p {
        Some(p) => vec![p],
        None => suite::admissible_p(kappa).collect(),
    }
}

fn analytic_base(cfg: &RunConfig, default_lambda: Complex64) -> Result<(IntegralSpec, EllipticContext)> {
    let kappa = cfg.one_kappa()?;
    let p = cfg.require_p()?;
    if p > 2 {
        return Err(Error::Invalid(format!("integral blocks are implemented for p <= 2, got {p}")));
    }
    let k = cfg.k.unwrap_or(p);
    if !(0..=p).contains(&k) {
        return Err(Error::Invalid(format!("need 0 <= k <= p, got k={k}")));
    }
    let mut quad = Quadrature::for_dimension(p);
    if let Some(l) = cfg.level {
        quad = quad.with_level(l);
    }
    quad.validate()?;
    let spec = IntegralSpec::new(kappa, p as usize, k as usize, cfg.n.unwrap_or(p + 1), cfg.lambda.unwrap_or(default_lambda))
        .with_quadrature(quad);
    let ectx = EllipticContext::new(cfg.tau, kappa)?;
    spec.validate(&ectx)?;
    Ok((spec, ectx))
}

pub const DEFAULT_LAMBDA: Complex64 = Complex64::new(0.31, 0.07);
pub const STOKES_LAMBDA: Complex64 = Complex64::new(0.31, 0.0);
pub const S_LAMBDA: Complex64 = Complex64::new(0.2, 0.0);

pub fn verify(cfg: &RunConfig, check: Check) -> Result<Outcome> {
    let mut recs = Vec::new();
    match check {
        Check::Relations | Check::Kirillov | Check::Identities => {
            if cfg.kappa.is_empty() {
                return Err(Error::Invalid("--kappa is required".into()));
            }
            for &kappa in &cfg.kappa {
                for p in p_values(cfg, kappa) {
                    let ctx = QContext::new(kappa, p)?;
                    match check {
                        Check::Relations => recs.extend(suite::modular_records(&ctx, &modular_data(cfg, &ctx)?, false)?),
                        Check::Kirillov => recs.extend(kirillov_compare(&ctx, &modular_data(cfg, &ctx)?)?),
                        _ => recs.extend(suite::exact_battery(kappa, p)?),
                    }
                }
            }
        }
        Check::Kzb => {
            let (spec, e) = analytic_base(cfg, DEFAULT_LAMBDA)?;
            recs.push(kzb_check(&spec, &e, cfg.tolerances.fd_step, cfg.tolerances.kzb)?);
        }
        Check::Properties => {
            let (spec, e) = analytic_base(cfg, DEFAULT_LAMBDA)?;
            recs.extend(property_checks(&spec, &e)?);
        }
        Check::Stokes => {
            let (spec, e) = analytic_base(cfg, STOKES_LAMBDA)?;
            let ks: Vec<usize> = match cfg.k {
                Some(k) => vec![k as usize],
                None => (0..spec.p).collect(),
            };
            if spec.p == 0 {
                return Err(Error::Invalid("the Stokes relation needs p >= 1".into()));
            }
            for k in ks {
                recs.push(stokes_check(&spec, &e, k, spec.n)?);
            }
        }
        Check::Vanishing => {
            let (spec, e) = analytic_base(cfg, DEFAULT_LAMBDA)?;
            recs.extend(vanishing_check(&spec, &e)?);
        }
        Check::Stransform => {
            let (spec, e) = analytic_base(cfg, S_LAMBDA)?;
            recs.extend(s_transform_check(&spec, &e, spec.n)?);
            if spec.p < 2 {
                recs.push(t_check(&spec, &e, spec.n)?);
            }
        }
        Check::Theta => {
            let kappa = cfg.one_kappa()?;
            let e = EllipticContext::new(cfg.tau, kappa)?;
            recs.extend(theta_checks(&e)?);
            if cfg.p.is_some_and(|p| p <= 2 && kappa == 2 * p + 2) {
                let (spec, e) = analytic_base(cfg, DEFAULT_LAMBDA)?;
                recs.push(theta_proportionality(&spec, &e)?);
            }
        }
    }
    Ok(Outcome::report(ReportDocument::new(recs)))
}

/// Numerical battery on the integral blocks for one `(κ, p)`, `p ≤ 2`.
pub fn analytic_battery(cfg: &RunConfig, kappa: i64, p: i64) -> Result<Vec<CheckRecord>> {
    let sub = RunConfig { kappa: vec![kappa], p: Some(p), k: None, n: None, lambda: None, ..cfg.clone() };
    let mut out = Vec::new();
    let (spec, e) = analytic_base(&sub, DEFAULT_LAMBDA)?;
    out.push(kzb_check(&spec, &e, cfg.tolerances.fd_step, cfg.tolerances.kzb)?);
    out.extend(property_checks(&spec, &e)?);
    out.extend(vanishing_check(&spec, &e)?);
    if p >= 1 {
        let s = spec.with_lambda(STOKES_LAMBDA);
        for k in 0..spec.p {
            out.push(stokes_check(&s, &e, k, spec.n)?);
        }
    }
    let s = spec.with_lambda(S_LAMBDA);
    out.extend(s_transform_check(&s, &e, spec.n)?);
    // τ+1 leaves the imaginary axis, where the p = 2 integrals are defined
    if p < 2 {
        out.push(t_check(&s, &e, spec.n)?);
    }
    if kappa == 2 * p + 2 {
        out.push(theta_proportionality(&spec, &e)?);
    }
    Ok(out)
}

pub fn report(cfg: &RunConfig, full: bool) -> Result<Outcome> {
    if cfg.kappa.is_empty() {
        return Err(Error::Invalid("--kappa is required".into()));
    }
    let mut recs = Vec::new();
    for &kappa in &cfg.kappa {
        let ps = p_values(cfg, kappa);
        for &p in &ps {
            recs.extend(suite::exact_battery(kappa, p)?);
        }
        recs.extend(suite::trace_shift(kappa)?);
        let pts = suite::degenerate_points(kappa, ((kappa - 2) / 2).min(2))?;
        recs.extend(suite::degenerate_psi(kappa, &pts, cfg.tolerances.degenerate)?);
        if full {
            recs.extend(theta_checks(&EllipticContext::new(cfg.tau, kappa)?)?);
            for &p in &ps {
                // at κ = 6, p = 2 the continued integrals have a pole
                if p <= 2 && !(p == 2 && kappa == 6) {
                    recs.extend(analytic_battery(cfg, kappa, p)?);
                }
            }
        }
    }
    if full {
        recs.extend(suite::macdonald_oracle(8, 4, 6)?);
        recs.extend(suite::trace_oracle(0.9, -2.3, 1.7, 300, 3, cfg.tolerances.trace_oracle)?);
    }
    Ok(Outcome::report(ReportDocument::new(recs)))
}

/// `cache list|clear|warm`.
pub fn cache_command(cfg: &RunConfig, action: &str) -> Result<Outcome> {
    let c = cache(cfg).ok_or_else(|| {
        Error::Invalid(format!("no cache directory; pass --cache-dir or set {}", super::config::CACHE_ENV))
    })?;
    let (json, pretty) = match action {
        "list" => {
            let keys = c.list()?;
            let pretty = keys.iter().map(|k| format!("{k}\n")).collect();
            (json!({"dir": c.dir(), "entries": keys}), pretty)
        }
        "clear" => {
            let n = c.clear()?;
            (json!({"dir": c.dir(), "removed": n}), format!("removed {n} entries\n"))
        }
        "warm" => {
            if cfg.kappa.is_empty() {
                return Err(Error::Invalid("--kappa is required".into()));
            }
            let mut keys = Vec::new();
            for &kappa in &cfg.kappa {
                for p in p_values(cfg, kappa) {
                    let ctx = QContext::new(kappa, p)?;
                    let key = modular_key(kappa, p);
                    c.get_or_compute(&key, || s_matrix(&ctx))?;
                    keys.push(key);
                }
            }
            let pretty = keys.iter().map(|k| format!("{k}\n")).collect();
            (json!({"dir": c.dir(), "warmed": keys}), pretty)
        }
        other => return Err(Error::Invalid(format!("unknown cache action {other:?}"))),
    };
    Ok(Outcome { json, pretty, csv: None, pass: true })
}

pub fn pretty_report(doc: &ReportDocument) -> String {
    let mut s = String::new();
    for r in &doc.records {
        let mark = match (r.pass, r.basis) {
            (true, _) => "pass",
            (false, crate::report::Basis::Empirical) => "note",
            (false, _) => "FAIL",
        };
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(s, "{mark}  {:<32} {:<48} {}", r.name, params.join(" "), r.actual).ok();
    }
    let sm = &doc.summary;
    write!(
        s,
        "{} checks: {} passed, {} failed, {} empirical probes failed",
        sm.total, sm.passed, sm.failed, sm.empirical_failed
    )
    .ok();
    s
}
