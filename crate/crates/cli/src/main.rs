fn main() {
    std::process::exit(quantum_ratio_cli::run(std::env::args_os()));
}
