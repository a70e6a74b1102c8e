fn main() -> std::process::ExitCode {
    conical_harvest::cli::main()
}
