fn main() {
    std::process::exit(alpha_lomax::cli::run(std::env::args_os()));
}
