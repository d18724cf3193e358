fn main() {
    std::process::exit(mono31::cli::run());
}
