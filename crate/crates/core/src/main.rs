fn main() {
    std::process::exit(siminf::cli::run(std::env::args_os()));
}
