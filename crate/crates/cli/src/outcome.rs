use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rattling::Error;

/// Why a command failed, which fixes the exit status.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
    Invariant(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Invariant(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Invariant(m) => write!(f, "invariant violation: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Domain { .. }
            | Error::InvalidParams(_)
            | Error::InvalidConfig(_)
            | Error::RankOutOfRange { .. }
            | Error::Io(_)
            | Error::Format(_) => Failure::Config(msg),
            Error::Invariant(_) | Error::BoundarySwitch { .. } | Error::NonMonotoneTime { .. } => {
                Failure::Invariant(msg)
            }
            Error::Accuracy { .. }
            | Error::NoBracket { .. }
            | Error::NoProgress { .. }
            | Error::StepUnderflow { .. }
            | Error::Insufficient(_) => Failure::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Config(format!("json: {e}"))
    }
}

pub type Outcome = Result<(), Failure>;

pub fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

pub fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Failure> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Parse a comma-separated list.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<T>()
                .map_err(|_| format!("cannot parse {x:?}"))
        })
        .collect()
}
