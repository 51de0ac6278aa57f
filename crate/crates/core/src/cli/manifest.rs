use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{CliError, Command, Format};

/// JSON inputs read during a run, keyed by the path as given. A replay reads
/// from here instead of the file system.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Inputs(BTreeMap<String, Value>);

impl Inputs {
    pub fn load<T: DeserializeOwned>(&mut self, path: &Path) -> Result<T, CliError> {
        let key = path.display().to_string();
        if !self.0.contains_key(&key) {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: key.clone(),
                source,
            })?;
            let value: Value =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{key}: {e}")))?;
            self.0.insert(key.clone(), value);
        }
        serde_json::from_value(self.0[&key].clone())
            .map_err(|e| CliError::Usage(format!("{key}: {e}")))
    }
}

/// Everything needed to re-run a command and check its output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub command: Command,
    pub seed: u64,
    pub format: Format,
    pub workers: usize,
    pub version: String,
    pub outputs: Vec<PathBuf>,
    pub inputs: Inputs,
    pub duration_secs: f64,
    pub exit_code: i32,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}
