use clap::Parser;
use ndt_lab::cli::{Cli, Command, run, write_output};

fn main() {
    let cli = Cli::parse();
    let out_path = match &cli.command {
        Command::Tradeoff { out, .. }
        | Command::Simulate { out, .. }
        | Command::Gap { out, .. } => out.clone(),
        Command::Bound { .. } => None,
    };
    match run(&cli.command) {
        Ok(output) => {
            for note in &output.notes {
                eprintln!("{note}");
            }
            if let Err(e) = write_output(&out_path, &output.stdout) {
                eprintln!("{e}");
                std::process::exit(e.exit_code());
            }
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
