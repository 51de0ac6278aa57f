fn main() {
    std::process::exit(symagm::cli::main_from_env());
}
