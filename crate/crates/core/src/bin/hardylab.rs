fn main() {
    std::process::exit(hardylab::cli::main_exit());
}
