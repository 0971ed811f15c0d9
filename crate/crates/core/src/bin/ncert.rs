fn main() {
    std::process::exit(ncert::cli::main_with_args(std::env::args_os()));
}
