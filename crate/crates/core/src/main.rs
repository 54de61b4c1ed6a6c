fn main() {
    std::process::exit(conc::cli::run(std::env::args_os()));
}
