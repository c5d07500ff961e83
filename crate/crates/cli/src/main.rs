fn main() {
    std::process::exit(nullfront_cli::run(std::env::args_os()));
}
