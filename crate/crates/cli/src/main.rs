fn main() {
    std::process::exit(lpball_cli::run(std::env::args_os()));
}
