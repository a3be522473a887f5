//! Placeholder.
pub fn run() -> std::process::ExitCode {
    unimplemented!()
}
