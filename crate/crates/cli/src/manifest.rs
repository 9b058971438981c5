//! Run manifests: what was run, on which inputs, producing which files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use perfcodes::{Error, Result};

pub const MANIFEST_FORMAT: &str = "perfcodes-manifest/1";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Manifest {
    pub format: String,
    pub version: String,
    /// Arguments after the program name, without `--threads`.
    pub command: Vec<String>,
    pub inputs: Vec<FileDigest>,
    /// Paths relative to the output directory, sorted.
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Tracks the files a command reads and writes.
pub struct Recorder {
    out_dir: PathBuf,
    inputs: Vec<FileDigest>,
    outputs: Vec<PathBuf>,
}

impl Recorder {
    pub fn new(out_dir: &Path) -> Self {
        Self {
            out_dir: out_dir.to_path_buf(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    pub fn read(&mut self, path: &Path) -> Result<String> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(text.as_bytes())),
        });
        Ok(text)
    }

    /// Writes `contents` to `path`, creating parent directories.
    pub fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, contents)?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    /// Records every file below `dir` as an output.
    pub fn record_dir(&mut self, dir: &Path) -> Result<()> {
        let mut stack = vec![dir.to_path_buf()];
        while let Some(d) = stack.pop() {
            for e in fs::read_dir(&d)? {
                let p = e?.path();
                if p.is_dir() {
                    stack.push(p);
                } else {
                    self.outputs.push(p);
                }
            }
        }
        Ok(())
    }

    /// Writes `manifest.json` into the output directory when anything was
    /// written.
    pub fn finish(mut self, command: Vec<String>) -> Result<Option<PathBuf>> {
        if self.outputs.is_empty() {
            return Ok(None);
        }
        let mut outputs = Vec::new();
        for p in &self.outputs {
            let rel = p.strip_prefix(&self.out_dir).unwrap_or(p);
            outputs.push(FileDigest {
                path: rel.display().to_string(),
                sha256: sha256_file(p)?,
            });
        }
        outputs.sort_by(|a, b| a.path.cmp(&b.path));
        outputs.dedup();
        self.inputs.sort_by(|a, b| a.path.cmp(&b.path));
        self.inputs.dedup();
        let m = Manifest {
            format: MANIFEST_FORMAT.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            inputs: self.inputs,
            outputs,
        };
        fs::create_dir_all(&self.out_dir)?;
        let path = self.out_dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&m)? + "\n")?;
        Ok(Some(path))
    }
}

/// The recorded form of the command line: `--threads` only affects wall
/// time, so it is dropped.
pub fn recorded_command(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
        } else if a == "--threads" {
            skip = true;
        } else if !a.starts_with("--threads=") {
            out.push(a.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threads_are_not_recorded() {
        let args: Vec<String> = ["--threads", "4", "rank", "--threads=2", "--in", "a.txt"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(recorded_command(&args), ["rank", "--in", "a.txt"]);
    }
}
