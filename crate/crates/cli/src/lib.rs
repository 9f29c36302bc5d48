//! Frontend for `ncjet-core`: instance files, reports, exit codes and the
//! invariant suite. The core types are re-exported for library users.

pub mod check;
pub mod commands;
pub mod instance;

use std::path::Path;

use serde_json::{json, Value};

pub use ncjet_core::{self as core, Algebra, Bimodule, Error, Mat, Result, Scalar, Subspace};
pub use ncjet_core::{algebra, bimodule, calculus, diffops, exactla, fixtures, jets, vectorfields};

pub use commands::{Flags, ProjectorChoice};
pub use instance::{build_instance, load_instance, parse_instance, Instance, InstanceFile};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Validate,
    Dims,
    Diffops,
    Symbol,
    VectorFields,
    BracketTable,
    Check,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Validate => "validate",
            Subcommand::Dims => "dims",
            Subcommand::Diffops => "diffops",
            Subcommand::Symbol => "symbol",
            Subcommand::VectorFields => "vector-fields",
            Subcommand::BracketTable => "bracket-table",
            Subcommand::Check => "check",
        }
    }
}

/// A finished report: the JSON form and the text form of the same data.
pub struct Report {
    pub json: Value,
    pub text: String,
    /// Set when the invariant suite failed.
    pub failure: Option<Error>,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::Validation(_) | Error::Dimension(_) => 3,
        Error::Precondition(_) => 4,
        Error::Consistency(_) => 5,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::Validation(_) => "validation",
        Error::Dimension(_) => "dimension",
        Error::Precondition(_) => "precondition",
        Error::Consistency(_) => "invariant",
    }
}

pub fn error_record(e: &Error, path: Option<&Path>) -> Value {
    json!({
        "error": {
            "kind": error_kind(e),
            "exit_code": exit_code(e),
            "message": e.to_string(),
            "instance": path.map(|p| p.display().to_string()),
        }
    })
}

pub fn run(sub: Subcommand, inst: &Instance, flags: &Flags) -> Result<Report> {
    let mut failure = None;
    let outcome = match sub {
        Subcommand::Validate => commands::validate(inst)?,
        Subcommand::Dims => commands::dims(inst, flags)?,
        Subcommand::Diffops => commands::diffops(inst, flags)?,
        Subcommand::Symbol => commands::symbol_cmd(inst, flags)?,
        Subcommand::VectorFields => commands::vector_fields_cmd(inst)?,
        Subcommand::BracketTable => commands::bracket_table_cmd(inst, flags)?,
        Subcommand::Check => {
            let suite = check::run_suite(inst);
            failure = check::suite_error(&suite);
            commands::Outcome {
                text: check::render(&suite, inst.name()),
                result: check::to_json(&suite),
            }
        }
    };
    let json = json!({
        "ncjet_report": REPORT_VERSION,
        "subcommand": sub.name(),
        "instance": serde_json::to_value(&inst.file).expect("instance files serialize"),
        "result": outcome.result,
    });
    Ok(Report {
        json,
        text: outcome.text,
        failure,
    })
}

/// Pretty JSON with a trailing newline.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
