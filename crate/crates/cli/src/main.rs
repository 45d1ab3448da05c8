use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let seed = match qent_cli::env_seed() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let code = qent_cli::run(std::env::args_os(), seed, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
