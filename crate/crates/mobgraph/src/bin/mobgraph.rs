fn main() -> std::process::ExitCode {
    mobgraph::cli::main()
}
