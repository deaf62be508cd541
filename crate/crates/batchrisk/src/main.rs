fn main() {
    std::process::exit(batchrisk::cli::run(std::env::args_os()));
}
