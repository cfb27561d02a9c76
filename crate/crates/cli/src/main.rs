fn main() {
    std::process::exit(lis_hwi_cli::run(std::env::args_os()));
}
