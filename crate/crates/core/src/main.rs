fn main() {
    std::process::exit(squeezed_fcs::cli::main_with_args(std::env::args_os()));
}
