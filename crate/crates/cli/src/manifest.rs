//! Stage manifests: content hashes of inputs, parameters, and outputs.
//!
//! A stage whose manifest matches its current inputs and parameters, and
//! whose outputs are present with matching hashes, is skipped. Manifests
//! live under `manifests/` next to (never inside) the artifact tree, so
//! artifact bytes stay run-independent.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::PipelineError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageManifest {
    pub stage: String,
    pub params_hash: String,
    /// Input path (as recorded) → sha256.
    pub input_hashes: BTreeMap<String, String>,
    pub output_hashes: BTreeMap<String, String>,
    pub written_at: String,
}

pub fn file_sha256(path: &Path) -> std::io::Result<String> {
    let mut file = fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex_string(&hasher.finalize()))
}

pub fn bytes_sha256(bytes: &[u8]) -> String {
    hex_string(&Sha256::digest(bytes))
}

fn hex_string(digest: &[u8]) -> String {
    let mut s = String::with_capacity(digest.len() * 2);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Hash a serializable parameter block.
pub fn params_hash<T: Serialize>(params: &T) -> String {
    let json = serde_json::to_string(params).expect("params serialize");
    bytes_sha256(json.as_bytes())
}

#[derive(Debug, Clone)]
pub struct StageCache {
    manifest_dir: PathBuf,
}

impl StageCache {
    pub fn new(manifest_dir: PathBuf) -> std::io::Result<Self> {
        fs::create_dir_all(&manifest_dir)?;
        Ok(Self { manifest_dir })
    }

    fn manifest_path(&self, stage: &str) -> PathBuf {
        self.manifest_dir.join(format!("{stage}.json"))
    }

    fn hash_paths(paths: &[PathBuf]) -> Result<BTreeMap<String, String>, PipelineError> {
        let mut out = BTreeMap::new();
        for p in paths {
            let h = file_sha256(p).map_err(|e| {
                PipelineError::Data(format!("cannot hash {}: {e}", p.display()))
            })?;
            out.insert(p.display().to_string(), h);
        }
        Ok(out)
    }

    /// True when the stored manifest matches the current inputs and params
    /// and every recorded output still exists with its recorded hash.
    pub fn is_fresh(
        &self,
        stage: &str,
        params_hash: &str,
        inputs: &[PathBuf],
    ) -> Result<bool, PipelineError> {
        let path = self.manifest_path(stage);
        let Ok(content) = fs::read_to_string(&path) else {
            return Ok(false);
        };
        let Ok(manifest) = serde_json::from_str::<StageManifest>(&content) else {
            return Ok(false);
        };
        if manifest.params_hash != params_hash {
            return Ok(false);
        }
        let current_inputs = Self::hash_paths(inputs)?;
        if manifest.input_hashes != current_inputs {
            return Ok(false);
        }
        for (path, recorded) in &manifest.output_hashes {
            let p = PathBuf::from(path);
            if !p.exists() {
                return Ok(false);
            }
            let actual = file_sha256(&p)
                .map_err(|e| PipelineError::Data(format!("cannot hash {path}: {e}")))?;
            if &actual != recorded {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Record a completed stage.
    pub fn record(
        &self,
        stage: &str,
        params_hash: &str,
        inputs: &[PathBuf],
        outputs: &[PathBuf],
    ) -> Result<(), PipelineError> {
        let manifest = StageManifest {
            stage: stage.to_string(),
            params_hash: params_hash.to_string(),
            input_hashes: Self::hash_paths(inputs)?,
            output_hashes: Self::hash_paths(outputs)?,
            written_at: chrono::Utc::now().to_rfc3339(),
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(self.manifest_path(stage), json + "\n")
            .map_err(|e| PipelineError::Data(e.to_string()))?;
        Ok(())
    }

    pub fn manifest(&self, stage: &str) -> Option<StageManifest> {
        let content = fs::read_to_string(self.manifest_path(stage)).ok()?;
        serde_json::from_str(&content).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_hits_only_when_everything_matches() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.txt");
        let output = dir.path().join("out.txt");
        fs::write(&input, "input-v1").unwrap();
        fs::write(&output, "output-v1").unwrap();

        let cache = StageCache::new(dir.path().join("manifests")).unwrap();
        let params = params_hash(&("window", 7));
        assert!(!cache.is_fresh("ingest", &params, &[input.clone()]).unwrap());

        cache
            .record("ingest", &params, &[input.clone()], &[output.clone()])
            .unwrap();
        assert!(cache.is_fresh("ingest", &params, &[input.clone()]).unwrap());

        // Parameter change invalidates.
        let other = params_hash(&("window", 8));
        assert!(!cache.is_fresh("ingest", &other, &[input.clone()]).unwrap());

        // Input change invalidates.
        fs::write(&input, "input-v2").unwrap();
        assert!(!cache.is_fresh("ingest", &params, &[input.clone()]).unwrap());
        fs::write(&input, "input-v1").unwrap();
        assert!(cache.is_fresh("ingest", &params, &[input.clone()]).unwrap());

        // Output deletion invalidates.
        fs::remove_file(&output).unwrap();
        assert!(!cache.is_fresh("ingest", &params, &[input.clone()]).unwrap());
    }
}
