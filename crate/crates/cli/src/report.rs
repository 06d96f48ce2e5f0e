//! JSON emission with fixed float precision, failures carrying exit codes,
//! and the on-disk result cache.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: u32 = 1;
const SIGNIFICANT_DIGITS: usize = 12;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_FOUND: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_KERNEL: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<vhom::Error> for Failure {
    fn from(e: vhom::Error) -> Self {
        let code = match e {
            vhom::Error::KernelNotPreserved { .. } | vhom::Error::RelatorNotPreserved { .. } => EXIT_KERNEL,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Text written to standard output together with the exit code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Output {
    pub code: u8,
    pub stdout: String,
}

fn round(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round(n.as_f64().unwrap());
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

/// `{"schema": 1, ...fields of body}` with floats at 12 significant digits.
pub fn json_report(command: &str, body: impl Serialize) -> String {
    let mut map = Map::new();
    map.insert("schema".into(), Value::from(SCHEMA));
    map.insert("command".into(), Value::from(command));
    match serde_json::to_value(body).expect("reports serialise") {
        Value::Object(o) => map.extend(o),
        other => {
            map.insert("result".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&round_floats(Value::Object(map))).expect("value serialises");
    s.push('\n');
    s
}

pub fn fmt_float(x: f64) -> String {
    round(x).to_string()
}

pub struct Cache {
    dir: PathBuf,
    key: String,
}

impl Cache {
    /// Key from the normalised command line and the catalog text.
    pub fn new(dir: &Path, args: &[String], catalog: &str) -> Self {
        let mut h = Sha256::new();
        h.update(SCHEMA.to_le_bytes());
        for a in args {
            h.update(a.as_bytes());
            h.update([0]);
        }
        h.update(catalog.as_bytes());
        Cache { dir: dir.to_path_buf(), key: hex::encode(h.finalize()) }
    }

    fn path(&self) -> PathBuf {
        self.dir.join(format!("{}.json", self.key))
    }

    pub fn get(&self) -> Option<Output> {
        let text = fs::read_to_string(self.path()).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, out: &Output) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!("{}.tmp", self.key));
        fs::write(&tmp, serde_json::to_string(out).expect("output serialises"))?;
        fs::rename(tmp, self.path())
    }
}
