fn main() {
    std::process::exit(survmrl::cli::run_cli(std::env::args_os()));
}
