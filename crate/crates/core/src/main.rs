fn main() {
    std::process::exit(galspec::cli::run(std::env::args_os()));
}
