fn main() {
    std::process::exit(bintag::cli::run());
}
