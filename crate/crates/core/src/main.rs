fn main() {
    std::process::exit(sigdev::cli::run(std::env::args_os()));
}
