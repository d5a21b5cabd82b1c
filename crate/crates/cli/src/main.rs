use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let env_seed = std::env::var(jensen_sharp_cli::SEED_ENV).ok();
    let (code, out, err) = jensen_sharp_cli::main_with(std::env::args_os(), env_seed.as_deref());
    let _ = std::io::stdout().write_all(out.as_bytes());
    let _ = std::io::stderr().write_all(err.as_bytes());
    ExitCode::from(code as u8)
}
