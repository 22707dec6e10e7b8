fn main() {
    std::process::exit(divbar::cli::run(std::env::args_os()));
}
