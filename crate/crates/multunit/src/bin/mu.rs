fn main() -> std::process::ExitCode {
    multunit::cli::run()
}
