fn main() {
    std::process::exit(cesaro_core::cli::main_with_args(std::env::args_os()));
}
