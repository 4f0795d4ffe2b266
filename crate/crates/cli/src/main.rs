fn main() {
    std::process::exit(mlg_cli::cli_main(std::env::args_os()));
}
