fn main() -> std::process::ExitCode {
    tsuka::cli::main()
}
