fn main() {
    std::process::exit(unitrace_cli::run(std::env::args_os()));
}
