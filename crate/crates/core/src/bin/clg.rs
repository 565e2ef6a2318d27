fn main() {
    std::process::exit(clg::cli::main_with_env());
}
