fn main() -> std::process::ExitCode {
    ggame::cli::main()
}
