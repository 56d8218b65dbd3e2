use std::io::{self, Write};
use std::process::ExitCode;

use expdd_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse_args(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(&cli, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(outcome), Ok(())) => ExitCode::from(outcome.exit_code()),
        (Err(e), _) => {
            eprintln!("expdd: {e}");
            ExitCode::from(e.exit_code())
        }
        (Ok(_), Err(e)) => {
            eprintln!("expdd: output failed: {e}");
            ExitCode::from(3)
        }
    }
}
