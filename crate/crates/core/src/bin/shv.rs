fn main() {
    std::process::exit(shv::cli::run());
}
