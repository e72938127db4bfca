fn main() -> std::process::ExitCode {
    grievlex::cli::main()
}
