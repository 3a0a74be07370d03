fn main() {
    std::process::exit(disguised_toric::cli::run(std::env::args_os()));
}
