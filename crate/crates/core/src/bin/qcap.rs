fn main() {
    std::process::exit(qcap::cli::run(std::env::args_os()));
}
