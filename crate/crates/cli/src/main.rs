use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = painleve_ds_cli::run(&argv, &mut out, &mut err);
    let _ = out.flush();
    ExitCode::from(code as u8)
}
