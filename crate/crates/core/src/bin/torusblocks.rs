fn main() {
    std::process::exit(torusblocks::cli::run(std::env::args_os()));
}
