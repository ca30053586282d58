fn main() {
    std::process::exit(pw_extremal::cli::run());
}
