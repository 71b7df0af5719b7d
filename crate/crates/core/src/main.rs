fn main() {
    std::process::exit(tsld_core::cli::main_with_std());
}
