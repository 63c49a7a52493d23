fn main() {
    std::process::exit(nlg_cli::run(std::env::args_os()));
}
