fn main() {
    std::process::exit(levy_lab::cli::run(std::env::args_os()));
}
