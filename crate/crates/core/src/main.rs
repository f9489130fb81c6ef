fn main() {
    std::process::exit(quasi_measure::cli::main_with_args(std::env::args_os()));
}
