fn main() {
    std::process::exit(crlab::cli::run(std::env::args_os()));
}
