fn main() {
    std::process::exit(ilc_forge::cli::run_cli(std::env::args_os()));
}
