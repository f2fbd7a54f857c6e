fn main() {
    std::process::exit(ehs::cli::run(std::env::args_os()));
}
