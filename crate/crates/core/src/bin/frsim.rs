fn main() {
    std::process::exit(freqreg::cli::main_with_args(std::env::args_os()));
}
