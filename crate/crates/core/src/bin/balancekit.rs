fn main() {
    std::process::exit(balancekit::cli::main_with_args(std::env::args_os()));
}
