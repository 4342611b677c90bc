fn main() {
    std::process::exit(emtauc_cli::main_with_args(std::env::args_os()));
}
