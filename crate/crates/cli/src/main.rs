fn main() {
    std::process::exit(flexqr_cli::run(std::env::args().collect()));
}
