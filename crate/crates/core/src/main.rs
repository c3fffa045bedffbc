fn main() {
    std::process::exit(labor_panel::cli::run());
}
