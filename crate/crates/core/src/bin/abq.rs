fn main() {
    std::process::exit(abq_forms::cli::run(std::env::args_os()));
}
