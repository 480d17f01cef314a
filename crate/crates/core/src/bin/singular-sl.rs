fn main() {
    std::process::exit(singular_sl::cli::run(std::env::args_os()));
}
