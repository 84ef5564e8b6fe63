fn main() {
    std::process::exit(nucleeg::cli::main_with_args(std::env::args_os()));
}
