fn main() {
    std::process::exit(npm_slice::cli::run_cli(std::env::args_os()));
}
