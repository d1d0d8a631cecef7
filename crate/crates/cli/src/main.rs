use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use scnpp_cli::{dispatch, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = dispatch(&cli, &mut out, &mut io::stderr());
    let _ = out.flush();
    ExitCode::from(code)
}
