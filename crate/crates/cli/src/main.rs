fn main() {
    std::process::exit(semidyn_cli::run_cli(std::env::args_os()));
}
