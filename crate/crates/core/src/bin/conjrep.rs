fn main() {
    std::process::exit(conjrep::cli::main_with(std::env::args_os()));
}
