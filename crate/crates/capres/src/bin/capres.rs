fn main() {
    std::process::exit(capres::cli::main_with_args(std::env::args_os()));
}
