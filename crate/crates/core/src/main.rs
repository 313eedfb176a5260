fn main() {
    std::process::exit(slmaster::cli::run(std::env::args_os()));
}
