fn main() {
    std::process::exit(vibcav::cli::run(std::env::args_os()));
}
