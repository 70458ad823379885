fn main() {
    std::process::exit(sptri::harness::cli::run(std::env::args_os()));
}
