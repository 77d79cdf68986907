fn main() {
    std::process::exit(wildstokes_cli::run(std::env::args_os()));
}
