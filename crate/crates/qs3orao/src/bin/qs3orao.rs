fn main() {
    env_logger::init();
    std::process::exit(qs3orao::cli::run());
}
