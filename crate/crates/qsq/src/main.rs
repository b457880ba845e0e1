fn main() {
    std::process::exit(qsq::cli::main_exit());
}
