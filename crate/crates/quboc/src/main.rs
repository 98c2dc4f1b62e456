fn main() {
    std::process::exit(quboc::cli::run(std::env::args_os()));
}
