use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;

pub const MANIFEST_FILE: &str = "manifest.json";
const LOCK_FILE: &str = ".diachron.lock";

/// Exclusive claim on an output directory, released on drop.
#[derive(Debug)]
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(output_dir: &Path) -> Result<Self, PipelineError> {
        fs::create_dir_all(output_dir).map_err(|e| PipelineError::io(output_dir, e))?;
        let path = output_dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(OutputLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(PipelineError::Data(format!(
                "{} is in use by another run (remove {} if that run is gone)",
                output_dir.display(),
                path.display()
            ))),
            Err(e) => Err(PipelineError::io(&path, e)),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

pub fn sha256_file(path: &Path) -> Result<String, PipelineError> {
    let bytes = fs::read(path).map_err(|e| PipelineError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Hashes of a file, or of every file below a directory keyed by path.
pub fn hash_inputs(path: &Path) -> Result<BTreeMap<String, String>, PipelineError> {
    let mut out = BTreeMap::new();
    if path.is_dir() {
        let mut entries: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| PipelineError::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        entries.sort();
        for entry in entries {
            out.extend(hash_inputs(&entry)?);
        }
    } else if path.is_file() {
        out.insert(path.display().to_string(), sha256_file(path)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// One command invocation recorded in a stage directory's manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub tool_version: String,
    pub started_unix_secs: u64,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub timings: Vec<StageTiming>,
    pub warnings: Vec<String>,
}

/// Append-only list of the runs that wrote into one directory.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunManifest {
    pub runs: Vec<RunRecord>,
}

impl RunManifest {
    pub fn load(dir: &Path) -> Result<Self, PipelineError> {
        let path = dir.join(MANIFEST_FILE);
        if !path.exists() {
            return Ok(RunManifest::default());
        }
        let text = fs::read(&path).map_err(|e| PipelineError::io(&path, e))?;
        serde_json::from_slice(&text).map_err(|e| PipelineError::Data(format!("{}: {e}", path.display())))
    }

    pub fn append(dir: &Path, record: RunRecord) -> Result<(), PipelineError> {
        let mut manifest = Self::load(dir)?;
        manifest.runs.push(record);
        write_json(&dir.join(MANIFEST_FILE), &manifest)
    }
}

/// Collects what a command read, wrote and how long each stage took.
pub struct RunRecorder {
    record: RunRecord,
    stage_start: Instant,
}

impl RunRecorder {
    pub fn new(command: &str, seed: Option<u64>, config: &impl Serialize) -> Self {
        let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        RunRecorder {
            record: RunRecord {
                command: command.to_string(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                started_unix_secs: started,
                seed,
                config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
                inputs: BTreeMap::new(),
                outputs: BTreeMap::new(),
                timings: Vec::new(),
                warnings: Vec::new(),
            },
            stage_start: Instant::now(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<(), PipelineError> {
        self.record.inputs.extend(hash_inputs(path)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> Result<(), PipelineError> {
        self.record.outputs.extend(hash_inputs(path)?);
        Ok(())
    }

    pub fn warn(&mut self, message: String) {
        log::warn!("{message}");
        self.record.warnings.push(message);
    }

    pub fn warnings(&self) -> &[String] {
        &self.record.warnings
    }

    /// Closes the current stage under `name` and starts the next one.
    pub fn stage(&mut self, name: &str) {
        let now = Instant::now();
        self.record.timings.push(StageTiming {
            stage: name.to_string(),
            seconds: (now - self.stage_start).as_secs_f64(),
        });
        self.stage_start = now;
    }

    pub fn finish(self, dir: &Path) -> Result<(), PipelineError> {
        RunManifest::append(dir, self.record)
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| PipelineError::Data(e.to_string()))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Writes through a temporary file so a failed run never leaves a
/// half-written output behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| PipelineError::io(parent, e))?;
    }
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes).map_err(|e| PipelineError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| PipelineError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lock_is_exclusive_and_released() {
        let dir = tempfile::tempdir().unwrap();
        let lock = OutputLock::acquire(dir.path()).unwrap();
        assert!(matches!(OutputLock::acquire(dir.path()), Err(PipelineError::Data(_))));
        drop(lock);
        assert!(OutputLock::acquire(dir.path()).is_ok());
    }

    #[test]
    fn manifest_appends() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.txt");
        fs::write(&input, "abc").unwrap();
        for _ in 0..2 {
            let mut r = RunRecorder::new("test", Some(1), &"cfg");
            r.input(&input).unwrap();
            r.stage("only");
            r.finish(dir.path()).unwrap();
        }
        let m = RunManifest::load(dir.path()).unwrap();
        assert_eq!(m.runs.len(), 2);
        assert_eq!(
            m.runs[0].inputs[&input.display().to_string()],
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
