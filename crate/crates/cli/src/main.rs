fn main() {
    std::process::exit(fracmax_cli::run(std::env::args_os()));
}
