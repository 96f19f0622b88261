use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::sampler::SampleBatch;
use crate::error::{Error, Result};
use crate::rng::CounterRng;

/// Writes `<stem>.f64` (little-endian doubles) and `<stem>.json` describing it.
pub fn write_batch(
    batch: &SampleBatch,
    dir: &Path,
    stem: &str,
    params: serde_json::Value,
) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let data = dir.join(format!("{stem}.f64"));
    let side = dir.join(format!("{stem}.json"));
    let mut bytes = Vec::with_capacity(8 * batch.n());
    for v in &batch.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(&data, bytes)?;
    let meta = json!({
        "file": data.file_name().and_then(|s| s.to_str()),
        "format": "f64-le",
        "n": batch.n(),
        "seed": batch.seed,
        "rng": CounterRng::NAME,
        "t": batch.t,
        "sim_eps": batch.sim_eps,
        "error_budget": batch.error_budget,
        "triplet": { "b": batch.triplet.b, "sigma": batch.triplet.sigma, "nu": format!("{:?}", batch.triplet.nu) },
        "params": params,
    });
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(&side, text + "\n")?;
    Ok((data, side))
}

pub fn read_batch(path: &Path) -> Result<Vec<f64>> {
    let bytes = fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Io(format!("{} is not a whole number of doubles", path.display())));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
}
