fn main() {
    std::process::exit(twodelta::cli::main_with_args(std::env::args_os()));
}
