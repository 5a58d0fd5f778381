fn main() {
    std::process::exit(ncpmap::cli::main_with_args(std::env::args_os()));
}
