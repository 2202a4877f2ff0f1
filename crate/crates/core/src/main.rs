fn main() {
    std::process::exit(equiaffine::cli::main_with(std::env::args_os()));
}
