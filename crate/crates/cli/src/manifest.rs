//! Run manifests and the on-disk result cache.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "nsl-report/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timing {
    pub step: String,
    pub ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    /// sha256 of each canonicalized input
    pub input_digests: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub threads: usize,
    pub budgets: BTreeMap<String, String>,
    pub engine_version: String,
    pub cache: Option<String>,
    pub timings: Vec<Timing>,
}

impl RunManifest {
    pub fn new() -> Self {
        Self {
            command_line: std::env::args().collect(),
            input_digests: BTreeMap::new(),
            seed: None,
            threads: rayon::current_num_threads(),
            budgets: BTreeMap::new(),
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            cache: None,
            timings: Vec::new(),
        }
    }

    pub fn input(&mut self, name: &str, canonical: &str) {
        self.input_digests.insert(name.to_string(), digest(canonical));
    }

    pub fn budget(&mut self, name: &str, value: impl ToString) {
        self.budgets.insert(name.to_string(), value.to_string());
    }

    /// Runs `f`, recording its wall-clock time under `step`.
    pub fn timed<T>(&mut self, step: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(Timing { step: step.to_string(), ms: start.elapsed().as_secs_f64() * 1e3 });
        out
    }
}

pub fn digest(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

#[derive(Debug, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub schema: &'static str,
    pub command: &'a str,
    pub manifest: &'a RunManifest,
    pub result: &'a T,
}

/// Results keyed by operation and canonical input.
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    fn path(&self, op: &str, canonical: &str) -> PathBuf {
        self.dir.join(format!("{op}-{}.json", digest(&format!("{op}\n{canonical}"))))
    }

    /// A cached value that still passes `verify`.
    pub fn get<T: DeserializeOwned>(&self, op: &str, canonical: &str, verify: impl FnOnce(&T) -> bool) -> Option<T> {
        let text = fs::read_to_string(self.path(op, canonical)).ok()?;
        let value: T = serde_json::from_str(&text).ok()?;
        verify(&value).then_some(value)
    }

    pub fn put<T: Serialize>(&self, op: &str, canonical: &str, value: &T) -> std::io::Result<()> {
        let text = serde_json::to_string(value).map_err(std::io::Error::other)?;
        fs::write(self.path(op, canonical), text)
    }
}

/// Looks `op` up in the cache, computing and storing it on a miss.
pub fn cached<T, E>(
    cache: Option<&Cache>,
    manifest: &mut RunManifest,
    op: &str,
    canonical: &str,
    verify: impl FnOnce(&T) -> bool,
    compute: impl FnOnce(&mut RunManifest) -> Result<T, E>,
) -> Result<T, E>
where
    T: Serialize + DeserializeOwned,
{
    let Some(cache) = cache else {
        return compute(manifest);
    };
    if let Some(v) = cache.get(op, canonical, verify) {
        manifest.cache = Some("hit".into());
        return Ok(v);
    }
    manifest.cache = Some("miss".into());
    let v = compute(manifest)?;
    if let Err(e) = cache.put(op, canonical, &v) {
        eprintln!("nsl: could not write cache entry: {e}");
    }
    Ok(v)
}
