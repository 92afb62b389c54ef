//! Run manifests for reproducible replay.
//!
//! Every command that writes an output also writes `<output>.manifest`, a
//! plain text file of sorted `key=value` lines recording the command, all
//! inputs, and the resolved seed. `unveil replay <manifest>` reruns the
//! recorded command and produces bit-identical outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use unveil_core::error::{Error, Result};

/// An ordered key=value record of one command invocation.
#[derive(Clone, Debug, Default)]
pub struct Manifest {
    entries: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Manifest::default();
        m.set("command", command);
        m
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn set_path(&mut self, key: &str, path: &Path) {
        self.set(key, path.display());
    }

    /// Records method parameters under a `param.` prefix.
    pub fn set_params(&mut self, params: &BTreeMap<String, String>) {
        for (key, value) in params {
            self.set(&format!("param.{key}"), value);
        }
    }

    pub fn get(&self, key: &str) -> Result<&str> {
        self.entries
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::InvalidParameter(format!("manifest is missing key {key:?}")))
    }

    pub fn get_opt(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.get(key)?;
        raw.parse().map_err(|_| {
            Error::InvalidParameter(format!("manifest key {key}={raw} could not be parsed"))
        })
    }

    pub fn get_path(&self, key: &str) -> Result<PathBuf> {
        Ok(PathBuf::from(self.get(key)?))
    }

    /// Returns the recorded method parameters as `key=value` strings.
    pub fn params(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter_map(|(key, value)| {
                key.strip_prefix("param.")
                    .map(|name| format!("{name}={value}"))
            })
            .collect()
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.entries {
            let _ = writeln!(out, "{key}={value}");
        }
        out
    }

    pub fn write_for(&self, output: &Path) -> Result<()> {
        fs::write(path_for(output), self.serialize())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "manifest line {} is not of the form key=value",
                    lineno + 1
                ))
            })?;
            entries.insert(key.to_string(), value.to_string());
        }
        Ok(Manifest { entries })
    }
}

/// The manifest path that accompanies an output file.
pub fn path_for(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest");
    output.with_file_name(name)
}
