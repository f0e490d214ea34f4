fn main() {
    std::process::exit(cadkit::cli::run());
}
