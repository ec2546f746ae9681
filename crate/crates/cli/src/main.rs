fn main() {
    std::process::exit(qdunkl_cli::main_with_args(std::env::args_os()));
}
