fn main() {
    std::process::exit(anchorlife::cli::run());
}
