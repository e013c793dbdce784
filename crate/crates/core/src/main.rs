fn main() {
    std::process::exit(kernelkit::cli::run(std::env::args_os()));
}
