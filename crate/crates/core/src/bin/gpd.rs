fn main() {
    std::process::exit(gpd_core::cli::main());
}
