fn main() -> std::process::ExitCode {
    saffron::cli::run()
}
