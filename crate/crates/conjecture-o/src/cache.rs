//! JSON cache for enumerated quotients, keyed by type descriptor, `I_P`,
//! and the crate version. A cache hit reconstructs the quotient from its
//! stored elements and orbit points through the same assembly path as a
//! fresh enumeration, so downstream output is bit-identical either way.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{ParabolicData, RootSystem, WeightVec};
use crate::weyl::{enumerate_quotient, ParabolicQuotient, WeylElem};

const CACHE_SCHEMA: u32 = 1;

#[derive(Serialize, Deserialize)]
struct QuotientCacheFile {
    schema: u32,
    crate_version: String,
    descriptor: String,
    /// 0-based sorted `I_P`.
    i_p: Vec<usize>,
    base_weight: Vec<i64>,
    elements: Vec<WeylElem>,
    points: Vec<Vec<i64>>,
}

/// Deterministic cache file name for a space.
pub fn cache_path(dir: &Path, rs: &RootSystem, par: &ParabolicData) -> PathBuf {
    let ip = if par.i_p().is_empty() {
        "flag".to_string()
    } else {
        par.i_p()
            .iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join("-")
    };
    dir.join(format!(
        "{}__{}__v{}.quotient.json",
        rs.cartan_type().descriptor(),
        ip,
        env!("CARGO_PKG_VERSION")
    ))
}

/// Serializes a quotient to its cache file, writing atomically.
pub fn store(dir: &Path, q: &ParabolicQuotient) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let path = cache_path(dir, q.rs(), q.par());
    let file = QuotientCacheFile {
        schema: CACHE_SCHEMA,
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        descriptor: q.rs().cartan_type().descriptor(),
        i_p: q.par().i_p().to_vec(),
        base_weight: q.base_weight().coords.clone(),
        elements: q.elements().to_vec(),
        points: (0..q.size()).map(|i| q.orbit_point(i).to_vec()).collect(),
    };
    let bytes = serde_json::to_vec(&file)?;
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    fs::write(&tmp, &bytes).map_err(|e| Error::io(tmp.display().to_string(), e))?;
    fs::rename(&tmp, &path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(path)
}

/// Attempts to load a cached quotient; any mismatch (schema, version, key)
/// or parse failure is treated as a miss.
pub fn load(
    dir: &Path,
    rs: &Arc<RootSystem>,
    par: &ParabolicData,
    cap: usize,
) -> Option<ParabolicQuotient> {
    let path = cache_path(dir, rs, par);
    let bytes = fs::read(&path).ok()?;
    let file: QuotientCacheFile = serde_json::from_slice(&bytes).ok()?;
    if file.schema != CACHE_SCHEMA
        || file.crate_version != env!("CARGO_PKG_VERSION")
        || file.descriptor != rs.cartan_type().descriptor()
        || file.i_p != par.i_p()
        || file.elements.len() > cap
    {
        return None;
    }
    ParabolicQuotient::from_parts(
        Arc::clone(rs),
        par.clone(),
        WeightVec::new(file.base_weight),
        file.elements,
        file.points,
    )
    .ok()
}

/// Loads from the cache when possible, otherwise enumerates and fills the
/// cache. With `dir = None` this is a plain enumeration.
pub fn load_or_enumerate(
    dir: Option<&Path>,
    rs: &Arc<RootSystem>,
    par: &ParabolicData,
    cap: usize,
) -> Result<ParabolicQuotient> {
    if let Some(dir) = dir {
        if let Some(q) = load(dir, rs, par, cap) {
            return Ok(q);
        }
        let q = enumerate_quotient(rs, par, cap)?;
        store(dir, &q)?;
        return Ok(q);
    }
    enumerate_quotient(rs, par, cap)
}
