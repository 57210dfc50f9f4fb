fn main() {
    std::process::exit(abdiv::cli::main_with(std::env::args_os()));
}
