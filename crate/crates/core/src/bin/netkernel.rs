fn main() {
    std::process::exit(netkernel::cli::main_with_args(std::env::args_os()));
}
