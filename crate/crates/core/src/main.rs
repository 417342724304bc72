fn main() {
    std::process::exit(solidhull::cli::main_exit_code());
}
