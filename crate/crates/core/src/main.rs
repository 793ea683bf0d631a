fn main() {
    std::process::exit(zerofree::cli::main_with_args(std::env::args_os()));
}
