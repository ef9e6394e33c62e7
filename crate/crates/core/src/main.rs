fn main() {
    std::process::exit(plcvlc::cli::main_from(std::env::args_os()));
}
