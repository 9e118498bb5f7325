fn main() {
    std::process::exit(wiretap::cli::main_with_args(std::env::args_os()));
}
