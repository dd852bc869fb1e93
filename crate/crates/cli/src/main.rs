//! `twistor4p`: batch driver for the verification suites.

mod commands;
mod config;

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::commands::Report;
use crate::config::{Flags, RunConfig};

const SCHEMA: &str = "twistor4p/1";

#[derive(Parser, Debug)]
#[command(name = "twistor4p", version, about = "Twistor-line perturbation checks on the symmetric 4-punctured sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Iterated-integral tables with closed-form, anchor and shuffle residuals
    Integrals,
    /// Weight-derivative series with degree and constraint summaries
    Derive,
    /// Monodromy reality and character-variety residuals over a weight sweep
    Verify,
    /// Metric, twisted form, energy series and weight-zero Hodge map
    Geometry,
    /// Integral identities at sampled punctures
    Identities,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Integrals => "integrals",
            Command::Derive => "derive",
            Command::Verify => "verify",
            Command::Geometry => "geometry",
            Command::Identities => "identities",
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match RunConfig::resolve(&cli.flags) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Integrals => commands::integrals(&cfg),
        Command::Derive => commands::derive(&cfg),
        Command::Verify => commands::verify_cmd(&cfg),
        Command::Geometry => commands::geometry(&cfg),
        Command::Identities => commands::identities(&cfg),
    };
    let Report { json: report, csv, pass } = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let csv_out = cfg.out.as_deref().is_some_and(|p| p.extension().is_some_and(|e| e == "csv"));
    let text = if csv_out {
        csv
    } else {
        let doc = json!({
            "schema": SCHEMA,
            "command": cli.command.name(),
            "config": cfg,
            "pass": pass,
            "report": report,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    };
    if let Err(e) = write_out(cfg.out.as_deref(), &text) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("{}: residual above tolerance", cli.command.name());
        ExitCode::from(1)
    }
}
