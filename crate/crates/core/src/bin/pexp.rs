fn main() {
    std::process::exit(pexp::cli::main_with_args(std::env::args_os()));
}
