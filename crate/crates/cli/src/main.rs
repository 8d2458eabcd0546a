fn main() {
    std::process::exit(invis_cli::run(std::env::args_os()));
}
