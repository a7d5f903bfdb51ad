fn main() {
    std::process::exit(ncsq_cli::run(std::env::args_os()));
}
