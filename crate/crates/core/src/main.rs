use std::process::ExitCode;

fn main() -> ExitCode {
    dmsing::cli::main()
}
