fn main() {
    std::process::exit(hydiag::cli::main());
}
