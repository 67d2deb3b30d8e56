fn main() {
    std::process::exit(vacpol::cli::main_with_args(std::env::args_os()));
}
