use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use rayon::prelude::*;

use ncjet::{error_record, exit_code, load_instance, render_json, run, Flags, ProjectorChoice, Subcommand};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    Validate,
    Dims,
    Diffops,
    Symbol,
    VectorFields,
    BracketTable,
    Check,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::Validate => Subcommand::Validate,
            Command::Dims => Subcommand::Dims,
            Command::Diffops => Subcommand::Diffops,
            Command::Symbol => Subcommand::Symbol,
            Command::VectorFields => Subcommand::VectorFields,
            Command::BracketTable => Subcommand::BracketTable,
            Command::Check => Subcommand::Check,
        }
    }
}

/// Jets, differential operators and vector-field brackets over
/// finite-dimensional algebras, computed exactly over ℚ.
#[derive(Parser, Debug)]
#[command(name = "ncjet", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Instance file(s). Only `check` accepts more than one.
    #[arg(required = true)]
    instances: Vec<PathBuf>,

    /// Emit the machine-readable report.
    #[arg(long)]
    json: bool,

    /// orthogonal, skew or custom:<file>
    #[arg(long, default_value = "orthogonal", value_parser = parse_projector)]
    projector: ProjectorChoice,

    /// Source module, then target module (default: A).
    #[arg(long = "module", value_name = "NAME")]
    modules: Vec<String>,

    /// Operator order for `diffops`.
    #[arg(long)]
    order: Option<usize>,

    /// Operator matrix for `symbol`.
    #[arg(long, value_name = "FILE")]
    operator: Option<PathBuf>,
}

fn parse_projector(s: &str) -> Result<ProjectorChoice, String> {
    s.parse()
}

fn run_one(sub: Subcommand, path: &Path, flags: &Flags, json: bool) -> (String, String, u8) {
    let fail = |e: ncjet::Error| {
        let record = error_record(&e, Some(path));
        let human = if json {
            String::new()
        } else {
            format!("ncjet: {e}\n")
        };
        (String::new(), format!("{human}{}\n", record), exit_code(&e))
    };
    let inst = match load_instance(path) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    match run(sub, &inst, flags) {
        Ok(report) => {
            let out = if json {
                render_json(&report.json)
            } else {
                report.text
            };
            match report.failure {
                Some(e) => (out, format!("{}\n", error_record(&e, Some(path))), exit_code(&e)),
                None => (out, String::new(), 0),
            }
        }
        Err(e) => fail(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let sub: Subcommand = cli.command.into();
    if cli.instances.len() > 1 && sub != Subcommand::Check {
        let e = ncjet::Error::Parse(format!("{} takes exactly one instance file", sub.name()));
        eprintln!("ncjet: {e}");
        eprintln!("{}", error_record(&e, None));
        return ExitCode::from(exit_code(&e));
    }
    let flags = Flags {
        modules: cli.modules,
        order: cli.order,
        projector: cli.projector,
        operator: cli.operator,
    };
    let results: Vec<(String, String, u8)> = cli
        .instances
        .par_iter()
        .map(|p| run_one(sub, p, &flags, cli.json))
        .collect();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut code = 0;
    for (o, e, c) in results {
        let _ = out.write_all(o.as_bytes());
        if !e.is_empty() {
            eprint!("{e}");
        }
        code = code.max(c);
    }
    ExitCode::from(code)
}
