fn main() {
    std::process::exit(macs_cli::run(std::env::args_os()));
}
