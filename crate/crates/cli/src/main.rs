fn main() {
    std::process::exit(bellgen_cli::main_with_args(std::env::args_os()));
}
