fn main() {
    std::process::exit(solfold::cli::run(std::env::args_os()));
}
