fn main() {
    std::process::exit(hslab::cli::run(std::env::args_os()));
}
