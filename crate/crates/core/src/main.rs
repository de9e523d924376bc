fn main() {
    std::process::exit(gausslab::cli::run(std::env::args().collect()));
}
