fn main() {
    std::process::exit(threemix::cli::run_from(std::env::args_os()));
}
