//! `qdunkl` command-line front end. [`run`] parses flags, computes every
//! artifact in memory and only then writes files, so a failed run leaves
//! nothing behind.

pub mod commands;
pub mod config;
pub mod csv;
pub mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;

use config::{Cli, Command};

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const COMPUTATION: i32 = 2;
    pub const VIOLATION: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),

    #[error("usage: {0}")]
    Usage(String),

    #[error("computation failed: {0}")]
    Compute(qdunkl_core::Error),

    #[error("plot: {0}")]
    Plot(#[from] svg::PlotError),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl From<qdunkl_core::Error> for CliError {
    fn from(e: qdunkl_core::Error) -> Self {
        match e {
            qdunkl_core::Error::InvalidParameter { .. } | qdunkl_core::Error::Domain(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Compute(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) if !e.use_stderr() => exit::SUCCESS,
            CliError::Clap(_) | CliError::Usage(_) => exit::USAGE,
            CliError::Compute(_) | CliError::Plot(_) | CliError::Io { .. } => exit::COMPUTATION,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// A file to be written once every computation has succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: PathBuf,
    pub contents: String,
}

/// What a successful run produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// One-line summary printed to stdout, if the command has one.
    pub summary: Option<String>,
    /// Rows that failed a bound.
    pub violations: usize,
    pub strict: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.strict && self.violations > 0 {
            exit::VIOLATION
        } else {
            exit::SUCCESS
        }
    }
}

/// The command line as recorded in each CSV's first comment line.
fn command_line(args: &[OsString]) -> String {
    let mut parts = vec!["qdunkl".to_string()];
    for a in args.iter().skip(1) {
        let s = a.to_string_lossy();
        let plain = !s.is_empty()
            && s.chars().all(|c| c.is_ascii_alphanumeric() || "-_.,=/:+".contains(c));
        parts.push(if plain { s.into_owned() } else { format!("'{}'", s.replace('\'', r"'\''")) });
    }
    parts.join(" ")
}

/// `--out` names a stem; a trailing `.csv` or `.svg` is dropped.
pub fn output_stem(out: &Path) -> PathBuf {
    match out.extension().and_then(|e| e.to_str()) {
        Some("csv" | "svg") => out.with_extension(""),
        _ => out.to_path_buf(),
    }
}

fn write_all(artifacts: &[Artifact]) -> Result<(), CliError> {
    fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
    let mut staged = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let mut tmp = a.path.clone().into_os_string();
        tmp.push(".partial");
        let tmp = PathBuf::from(tmp);
        if let Err(e) = std::fs::write(&tmp, &a.contents) {
            for t in &staged {
                let _ = std::fs::remove_file(t);
            }
            return Err(io(&a.path)(e));
        }
        staged.push(tmp);
    }
    for (tmp, a) in staged.iter().zip(artifacts) {
        std::fs::rename(tmp, &a.path).map_err(io(&a.path))?;
    }
    Ok(())
}

/// Parse `args` (including the program name), compute and write artifacts.
pub fn run<I, T>(args: I) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&args)?;
    let ctx = commands::Context::new(command_line(&args), &cli.trunc)?;
    let (artifacts, mut outcome) = match &cli.command {
        Command::Eval(a) => commands::cmd_eval(&ctx, a)?,
        Command::Moments(a) => commands::cmd_moments(&ctx, a)?,
        Command::Converge(a) => commands::cmd_converge(&ctx, a)?,
        Command::Bounds(a) => commands::cmd_bounds(&ctx, a)?,
        Command::Bivariate(a) => commands::cmd_bivariate(&ctx, a)?,
    };
    write_all(&artifacts)?;
    outcome.files = artifacts.into_iter().map(|a| a.path).collect();
    Ok(outcome)
}

/// [`run`] plus reporting; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run(args) {
        Ok(outcome) => {
            if let Some(s) = &outcome.summary {
                println!("{s}");
            }
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            outcome.exit_code()
        }
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            CliError::Clap(e).exit_code()
        }
        Err(e) => {
            eprintln!("qdunkl: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stems() {
        assert_eq!(output_stem(Path::new("a/b.csv")), PathBuf::from("a/b"));
        assert_eq!(output_stem(Path::new("a/b.svg")), PathBuf::from("a/b"));
        assert_eq!(output_stem(Path::new("a/b.v2")), PathBuf::from("a/b.v2"));
    }

    #[test]
    fn recorded_command_quotes_odd_arguments() {
        let args: Vec<OsString> = ["x", "eval", "-n", "10", "--out", "my file"].map(Into::into).into();
        assert_eq!(command_line(&args), "qdunkl eval -n 10 --out 'my file'");
    }
}
