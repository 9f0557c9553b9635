fn main() {
    std::process::exit(rwslp::cli::run(std::env::args_os()));
}
