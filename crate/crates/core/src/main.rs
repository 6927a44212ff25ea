fn main() {
    std::process::exit(chainsim::cli::run(std::env::args_os()));
}
