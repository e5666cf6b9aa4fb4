fn main() {
    std::process::exit(starweyl::cli::run(std::env::args_os()));
}
