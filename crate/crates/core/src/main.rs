fn main() {
    std::process::exit(rootfan::cli::run());
}
