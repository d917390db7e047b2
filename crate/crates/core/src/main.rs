fn main() {
    std::process::exit(maxrand::cli::run(std::env::args_os()));
}
