use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, text) = hshorn::cli::run(std::env::args_os());
    if code == hshorn::cli::EXIT_USAGE {
        eprint!("{text}");
    } else {
        print!("{text}");
    }
    ExitCode::from(code as u8)
}
