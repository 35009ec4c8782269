use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::Path;

use graphonlab::ExactGraphon;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] graphonlab::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }
}

/// Input files read by a command. A live run records every file it reads;
/// a replay serves the recorded contents instead of touching the disk.
#[derive(Default)]
pub struct Inputs {
    files: RefCell<BTreeMap<String, String>>,
    replaying: bool,
}

impl Inputs {
    pub fn replaying(files: BTreeMap<String, String>) -> Self {
        Inputs { files: RefCell::new(files), replaying: true }
    }

    pub fn exists(&self, path: &str) -> bool {
        self.files.borrow().contains_key(path) || (!self.replaying && Path::new(path).is_file())
    }

    pub fn read(&self, path: &str) -> Result<String, CliError> {
        if let Some(text) = self.files.borrow().get(path) {
            return Ok(text.clone());
        }
        if self.replaying {
            return Err(CliError::Usage(format!("{path}: not recorded in the manifest")));
        }
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.files.borrow_mut().insert(path.to_string(), text.clone());
        Ok(text)
    }

    pub fn into_files(self) -> BTreeMap<String, String> {
        self.files.into_inner()
    }

    /// A JSON graphon file, or a preset such as `negated:0.5,0.8,0.3`.
    pub fn graphon(&self, src: &str) -> Result<ExactGraphon, CliError> {
        if self.exists(src) {
            let text = self.read(src)?;
            return Ok(ExactGraphon::from_json(&text)?);
        }
        if src.contains(':') {
            return Ok(ExactGraphon::from_preset(src)?);
        }
        Err(CliError::Usage(format!("`{src}` is neither a graphon file nor a preset")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_serves_recorded_files() {
        let mut files = BTreeMap::new();
        files.insert("w.json".to_string(), r#"{"parts":[0.5,0.5],"values":[[0,1],[1,0]]}"#.to_string());
        let inputs = Inputs::replaying(files);
        assert_eq!(inputs.graphon("w.json").unwrap().num_parts(), 2);
        assert!(inputs.read("missing.json").is_err());
        assert_eq!(inputs.graphon("bipartite:1/2").unwrap().num_parts(), 2);
        assert!(matches!(inputs.graphon("nonsense"), Err(CliError::Usage(_))));
    }
}
