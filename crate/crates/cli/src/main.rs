fn main() {
    std::process::exit(stepharm_cli::run(std::env::args_os()));
}
