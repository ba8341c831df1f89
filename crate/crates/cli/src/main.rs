mod cli;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use cli::{Cli, Command, RamseyCommand};

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("BOOLCUBE_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            boolcube::Error::InvalidInput(format!(
                "BOOLCUBE_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<output::Report> {
    configure_threads()?;
    match &cli.command {
        Command::Alpha { d, n, precision } => commands::alpha_cmd(*d, *n, *precision),
        Command::Lubell { input } => commands::lubell_cmd(input),
        Command::Detect(a) => commands::detect_cmd(&a.input, a.d),
        Command::Extract(a) => commands::extract_cmd(&a.input, a.d),
        Command::Search {
            n,
            d,
            objective,
            budget,
            sequential,
        } => commands::search_cmd(*n, *d, *objective, *budget, *sequential),
        Command::CubeFree {
            n,
            d,
            budget,
            strict,
        } => commands::cube_free_cmd(*n, *d, *budget, *strict),
        Command::Correspondence { input, n, d } => {
            commands::correspondence_cmd(input.as_deref(), *n, *d)
        }
        Command::Ramsey(RamseyCommand::VerifyRs1 {
            s,
            exhaustive_limit,
        }) => commands::ramsey_verify_rs1_cmd(*s, *exhaustive_limit),
        Command::Ramsey(RamseyCommand::Extract { input, d }) => {
            commands::ramsey_extract_cmd(input, *d)
        }
        Command::Ramsey(RamseyCommand::Rainbow {
            input,
            r,
            trials,
            seed,
        }) => commands::ramsey_rainbow_cmd(input, *r, *trials, *seed),
        Command::Selftest { suite } => commands::selftest_cmd(suite.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            if report
                .write(cli.format, &mut stdout)
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(output::EXIT_USAGE as u8);
            }
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(output::error_exit_code(&err) as u8)
        }
    }
}
