//! Disk cache of Hecke matrices keyed by level, weight, character and
//! operator. Entries are exact rationals written as strings so nothing is
//! lost to JSON numbers.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::Q;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::modsym::{HeckeOp, SymbolSpace};

const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub level: u64,
    pub k: u32,
    /// Nebentypus; only the trivial character is supported.
    pub eps: String,
    /// Sign of the star involution, or `full`.
    pub sign: String,
    pub op: String,
}

impl CacheKey {
    pub fn new(space: &SymbolSpace, op: HeckeOp) -> Self {
        CacheKey {
            level: space.level(),
            k: space.k,
            eps: "trivial".into(),
            sign: match space.sign {
                Some(s) if s > 0 => "plus".into(),
                Some(_) => "minus".into(),
                None => "full".into(),
            },
            op: op.to_string(),
        }
    }

    fn file_name(&self) -> String {
        format!(
            "hecke_N{}_k{}_{}_{}_{}.json",
            self.level, self.k, self.eps, self.sign, self.op
        )
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    version: u32,
    key: CacheKey,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct HeckeCache {
    dir: PathBuf,
}

/// Where a matrix came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Computed,
    Cached,
}

impl HeckeCache {
    pub fn new(dir: impl AsRef<Path>) -> Self {
        HeckeCache {
            dir: dir.as_ref().to_path_buf(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    pub fn load(&self, key: &CacheKey) -> Result<Option<Matrix<Q>>> {
        let path = self.path(key);
        if !path.exists() {
            return Ok(None);
        }
        let entry: Entry = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
        if entry.version != CACHE_VERSION || entry.key != *key {
            return Ok(None);
        }
        let mut rows = Vec::with_capacity(entry.rows);
        for r in &entry.entries {
            let row = r
                .iter()
                .map(|s| {
                    Q::from_str(s).map_err(|_| {
                        Error::Config(format!("bad cache entry {s:?} in {}", path.display()))
                    })
                })
                .collect::<Result<Vec<Q>>>()?;
            if row.len() != entry.cols {
                return Err(Error::Config(format!(
                    "ragged cache file {}",
                    path.display()
                )));
            }
            rows.push(row);
        }
        if rows.len() != entry.rows {
            return Err(Error::Config(format!(
                "truncated cache file {}",
                path.display()
            )));
        }
        Ok(Some(if rows.is_empty() {
            Matrix {
                rows: 0,
                cols: 0,
                data: vec![],
            }
        } else {
            Matrix::from_rows(rows)
        }))
    }

    pub fn store(&self, key: &CacheKey, m: &Matrix<Q>) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let entry = Entry {
            version: CACHE_VERSION,
            key: key.clone(),
            rows: m.rows,
            cols: m.cols,
            entries: (0..m.rows)
                .map(|i| m.row(i).iter().map(|x| x.to_string()).collect())
                .collect(),
        };
        // write then rename so a crash never leaves half a file
        let path = self.path(key);
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_string(&entry)?)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }

    /// The matrix of `op`, from disk when present. A cached matrix is
    /// spot-checked against a fresh image of the first basis symbol.
    pub fn hecke_matrix(&self, space: &SymbolSpace, op: HeckeOp) -> Result<(Matrix<Q>, Source)> {
        space.check_op(op)?;
        let key = CacheKey::new(space, op);
        if let Some(m) = self.load(&key)? {
            if m.rows != space.dim() || m.cols != space.dim() {
                return Err(Error::Check(format!(
                    "cached {} has the wrong shape",
                    key.file_name()
                )));
            }
            if space.dim() > 0 {
                let b = &space.basis_symbols()[0];
                let fresh = space
                    .coords(&space.apply(op, b))
                    .ok_or_else(|| Error::Check("Hecke image left the space".into()))?;
                if fresh != m.col(0) {
                    return Err(Error::Check(format!(
                        "cached {} disagrees with a fresh computation",
                        key.file_name()
                    )));
                }
            }
            return Ok((m, Source::Cached));
        }
        let m = space.hecke_matrix(op)?;
        self.store(&key, &m)?;
        Ok((m, Source::Computed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scratch(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("padic-lab-cache-{name}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = scratch("round");
        let cache = HeckeCache::new(&dir);
        let space = SymbolSpace::build(33, 0, Some(1));
        let (a, s1) = cache.hecke_matrix(&space, HeckeOp::U(3)).unwrap();
        let (b, s2) = cache.hecke_matrix(&space, HeckeOp::U(3)).unwrap();
        assert_eq!((s1, s2), (Source::Computed, Source::Cached));
        assert_eq!(a, b);
        assert_eq!(a, space.hecke_matrix(HeckeOp::U(3)).unwrap());
        let text =
            std::fs::read_to_string(cache.path(&CacheKey::new(&space, HeckeOp::U(3)))).unwrap();
        assert!(text.contains("\"entries\":[[\""));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn tampered_entry_is_caught() {
        let dir = scratch("tamper");
        let cache = HeckeCache::new(&dir);
        let space = SymbolSpace::build(11, 0, None);
        let (m, _) = cache.hecke_matrix(&space, HeckeOp::T(2)).unwrap();
        let mut bad = m.clone();
        bad.set(0, 0, m.get(0, 0) + Q::from_integer(1.into()));
        cache
            .store(&CacheKey::new(&space, HeckeOp::T(2)), &bad)
            .unwrap();
        let err = cache.hecke_matrix(&space, HeckeOp::T(2)).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
