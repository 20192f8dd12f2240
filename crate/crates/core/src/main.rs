fn main() {
    std::process::exit(salbound::cli::run(std::env::args_os()));
}
