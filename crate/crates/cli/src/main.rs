fn main() {
    std::process::exit(swarmsched_cli::main_with_args(std::env::args_os()));
}
