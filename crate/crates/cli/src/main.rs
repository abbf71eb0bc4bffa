fn main() {
    std::process::exit(qadv::run(std::env::args_os()));
}
