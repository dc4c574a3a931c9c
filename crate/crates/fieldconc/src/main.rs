fn main() {
    std::process::exit(fieldconc::cli::run(std::env::args_os()));
}
