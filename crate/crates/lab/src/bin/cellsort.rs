fn main() -> std::process::ExitCode {
    cellsort_lab::cli::main()
}
