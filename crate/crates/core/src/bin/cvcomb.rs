fn main() {
    std::process::exit(cvcomb::cli::run(std::env::args_os()));
}
