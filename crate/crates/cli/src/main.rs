fn main() {
    std::process::exit(cfw::run(std::env::args_os()));
}
