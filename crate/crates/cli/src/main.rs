fn main() {
    std::process::exit(symlap_cli::run(std::env::args_os()));
}
