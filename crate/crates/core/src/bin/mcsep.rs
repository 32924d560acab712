fn main() {
    std::process::exit(mcsep::cli::run(std::env::args_os()));
}
