fn main() {
    std::process::exit(poqa::cli::run(std::env::args_os()));
}
