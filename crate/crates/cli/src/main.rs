use std::io;
use std::process::ExitCode;

use clap::Parser;
use dgo_cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.run(&mut io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        // stdout closed early (`dgo ... | head`): nothing left to report
        Err(e)
            if e.chain().any(|c| {
                c.downcast_ref::<io::Error>()
                    .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
            }) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
