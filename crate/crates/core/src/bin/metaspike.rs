fn main() {
    std::process::exit(metaspike::cli::main_with_args(std::env::args_os()));
}
