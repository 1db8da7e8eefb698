fn main() {
    std::process::exit(wicksell::cli::main_with_args(std::env::args_os()));
}
