fn main() {
    std::process::exit(trikit::cli::run(std::env::args_os()));
}
