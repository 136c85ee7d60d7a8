fn main() {
    std::process::exit(lineobs::cli::main_with_args(std::env::args_os()));
}
