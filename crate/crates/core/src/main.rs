fn main() {
    std::process::exit(kgroups::cli::main_with_args(std::env::args_os()));
}
