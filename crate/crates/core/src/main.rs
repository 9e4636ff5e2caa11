fn main() {
    std::process::exit(bethe_qsl::cli::run_from_env());
}
