fn main() {
    std::process::exit(joints_cli::run(std::env::args_os()));
}
