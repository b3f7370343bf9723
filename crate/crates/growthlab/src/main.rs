fn main() {
    std::process::exit(growthlab::cli::run());
}
