use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

use crate::exit::Failure;

/// One JSON line of output. `estimates` and `stderr` share keys; a missing
/// standard error is written as `null`.
#[derive(Clone, Debug, Serialize)]
pub struct ResultRecord {
    pub op: String,
    pub spec_hash: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub estimates: BTreeMap<String, Value>,
    pub stderr: BTreeMap<String, Value>,
    pub wall_clock_secs: f64,
}

impl ResultRecord {
    pub fn new(op: &str, params: Value, seed: Option<u64>) -> Self {
        ResultRecord {
            op: op.to_string(),
            spec_hash: String::new(),
            params,
            seed,
            estimates: BTreeMap::new(),
            stderr: BTreeMap::new(),
            wall_clock_secs: 0.0,
        }
    }

    pub fn estimate(mut self, key: &str, value: impl Serialize, se: Option<f64>) -> Self {
        self.estimates.insert(key.to_string(), to_value(value));
        self.stderr.insert(key.to_string(), to_value(se));
        self
    }

    /// Adds a value that has no meaningful standard error (counts, flags).
    pub fn exact(self, key: &str, value: impl Serialize) -> Self {
        self.estimate(key, value, None)
    }
}

fn to_value(v: impl Serialize) -> Value {
    // non-finite floats become null
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Record sink: stdout, or a file when a path is given.
pub struct Sink {
    out: Box<dyn Write>,
    path: Option<PathBuf>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self, Failure> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|e| Failure::io(p, e))?,
            )),
            None => Box::new(io::stdout().lock()),
        };
        Ok(Sink {
            out,
            path: path.map(Path::to_path_buf),
        })
    }

    pub fn write(&mut self, r: &ResultRecord) -> Result<(), Failure> {
        let line = serde_json::to_string(r).expect("records serialise");
        writeln!(self.out, "{line}").map_err(|e| self.fail(e))
    }

    pub fn finish(mut self) -> Result<(), Failure> {
        self.out.flush().map_err(|e| self.fail(e))
    }

    fn fail(&self, e: io::Error) -> Failure {
        Failure::io(self.path.as_deref().unwrap_or(Path::new("<stdout>")), e)
    }
}
