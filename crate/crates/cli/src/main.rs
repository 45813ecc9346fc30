fn main() {
    std::process::exit(mnpi_cli::run(std::env::args_os()));
}
