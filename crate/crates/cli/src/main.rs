fn main() {
    std::process::exit(riskforest_cli::main_with_args(std::env::args_os()));
}
