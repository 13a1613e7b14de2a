fn main() {
    std::process::exit(thetasum_cli::run(std::env::args_os()));
}
