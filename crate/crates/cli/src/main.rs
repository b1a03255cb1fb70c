fn main() {
    std::process::exit(supralap_cli::run(std::env::args_os()));
}
