fn main() {
    std::process::exit(hypocheck::cli::run(std::env::args_os()));
}
