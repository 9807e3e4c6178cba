fn main() {
    std::process::exit(prosolv::run(std::env::args_os()));
}
