//! Run configuration. Later sources win: built-in defaults, then a JSON
//! config file (`--config`), then `PADIC_LAB_*` environment variables, then
//! command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modsym::space::is_prime;
use crate::modsym::HeckeOp;

/// Every setting as optional, so that sources can be layered.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    /// The prime p.
    #[arg(long)]
    pub p: Option<u64>,
    /// Level N (for `lfun`, the level N = Mp of the stabilised form).
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub level: Option<u64>,
    /// Form label such as 11a or 5k2.
    #[arg(long)]
    pub label: Option<String>,
    /// Weight parameter k (weight k + 2).
    #[arg(long)]
    pub k: Option<u32>,
    /// p-adic precision M, which is also the number of moments.
    #[arg(long)]
    pub prec: Option<u32>,
    /// Truncation order n of the weight variable.
    #[arg(long)]
    pub n: Option<usize>,
    /// Discriminant D of the imaginary quadratic field.
    #[arg(long, allow_hyphen_values = true)]
    pub disc: Option<i64>,
    /// Sign of the star involution, 1 or -1.
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<i8>,
    /// Hecke operator such as T2 or U3.
    #[arg(long)]
    pub op: Option<String>,
    /// Character moduli, comma separated powers of p.
    #[arg(long, value_delimiter = ',')]
    pub moduli: Option<Vec<u64>>,
    /// Embedding of the cyclotomic values; only `standard` exists.
    #[arg(long)]
    pub embedding: Option<String>,
    /// Directory of the Hecke-matrix cache.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed for the free moments of a second, independent lift.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Overrides {
    /// `other` wins wherever it is set.
    pub fn layered(self, other: Overrides) -> Overrides {
        Overrides {
            p: other.p.or(self.p),
            level: other.level.or(self.level),
            label: other.label.or(self.label),
            k: other.k.or(self.k),
            prec: other.prec.or(self.prec),
            n: other.n.or(self.n),
            disc: other.disc.or(self.disc),
            sign: other.sign.or(self.sign),
            op: other.op.or(self.op),
            moduli: other.moduli.or(self.moduli),
            embedding: other.embedding.or(self.embedding),
            cache_dir: other.cache_dir.or(self.cache_dir),
            report: other.report.or(self.report),
            threads: other.threads.or(self.threads),
            seed: other.seed.or(self.seed),
        }
    }

    pub fn from_file(path: &Path) -> Result<Overrides> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))
    }

    /// `PADIC_LAB_CACHE_DIR`, `PADIC_LAB_THREADS` and `PADIC_LAB_PREC`.
    pub fn from_env(get: impl Fn(&str) -> Option<String>) -> Result<Overrides> {
        let parse = |name: &str| -> Result<Option<u64>> {
            get(name)
                .map(|v| {
                    v.parse::<u64>()
                        .map_err(|_| Error::Config(format!("{name}={v:?} is not a number")))
                })
                .transpose()
        };
        Ok(Overrides {
            cache_dir: get("PADIC_LAB_CACHE_DIR").map(PathBuf::from),
            threads: parse("PADIC_LAB_THREADS")?.map(|t| t as usize),
            prec: parse("PADIC_LAB_PREC")?.map(|t| t as u32),
            ..Overrides::default()
        })
    }

    /// Defaults, then the file, the environment and the flags.
    pub fn resolve(file: Option<&Path>, flags: Overrides) -> Result<Overrides> {
        let from_file = file
            .map(Overrides::from_file)
            .transpose()?
            .unwrap_or_default();
        let env = Overrides::from_env(|k| std::env::var(k).ok())?;
        Ok(from_file.layered(env).layered(flags))
    }
}

/// A resolved, validated configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub p: u64,
    #[serde(rename = "N")]
    pub level: Option<u64>,
    pub label: Option<String>,
    pub k: u32,
    pub prec: u32,
    pub n: usize,
    pub disc: i64,
    pub sign: i8,
    pub op: Option<String>,
    pub moduli: Vec<u64>,
    pub embedding: String,
    pub cache_dir: PathBuf,
    pub report: Option<PathBuf>,
    pub threads: usize,
    pub seed: u64,
}

/// Per-command defaults for the settings a command cares about.
#[derive(Clone, Copy, Debug)]
pub struct Defaults {
    pub p: u64,
    pub k: u32,
    pub prec: u32,
}

impl RunConfig {
    pub fn build(o: Overrides, d: Defaults) -> Result<RunConfig> {
        let p = o.p.unwrap_or(d.p);
        if p < 3 || !is_prime(p) {
            return Err(Error::Config(format!("p = {p} must be an odd prime")));
        }
        let prec = o.prec.unwrap_or(d.prec);
        if prec == 0 || prec > 40 {
            return Err(Error::Config(format!("precision {prec} is outside 1..=40")));
        }
        let sign = o.sign.unwrap_or(1);
        if sign != 1 && sign != -1 {
            return Err(Error::Config(format!("sign must be 1 or -1, not {sign}")));
        }
        let embedding = o.embedding.unwrap_or_else(|| "standard".into());
        if embedding != "standard" {
            return Err(Error::Config(format!(
                "unknown embedding {embedding:?}; only \"standard\" is available"
            )));
        }
        let moduli = o.moduli.unwrap_or_else(|| vec![p, p * p]);
        for &m in &moduli {
            let mut x = m;
            while x > 1 && x % p == 0 {
                x /= p;
            }
            if x != 1 || m == 1 {
                return Err(Error::Config(format!(
                    "character modulus {m} is not a positive power of {p}"
                )));
            }
        }
        if o.level == Some(0) {
            return Err(Error::Config("level N must be positive".into()));
        }
        let n = o.n.unwrap_or(3);
        if n == 0 {
            return Err(Error::Config(
                "truncation order n must be at least 1".into(),
            ));
        }
        if let Some(op) = &o.op {
            parse_op(op)?;
        }
        Ok(RunConfig {
            p,
            level: o.level,
            label: o.label,
            k: o.k.unwrap_or(d.k),
            prec,
            n,
            disc: o.disc.unwrap_or(-4),
            sign,
            op: o.op,
            moduli,
            embedding,
            cache_dir: o
                .cache_dir
                .unwrap_or_else(|| PathBuf::from(".padic-lab-cache")),
            report: o.report,
            threads: o.threads.unwrap_or(0),
            seed: o.seed.unwrap_or(7),
        })
    }

    /// The tame level `M` with `N = M p`, checking `p` does not divide `M`.
    pub fn tame_level(&self) -> Result<Option<u64>> {
        let Some(n) = self.level else { return Ok(None) };
        if n % self.p != 0 {
            return Err(Error::Config(format!(
                "N = {n} is not divisible by p = {}",
                self.p
            )));
        }
        let m = n / self.p;
        if m % self.p == 0 {
            return Err(Error::Config(format!(
                "p = {} divides the tame level {m}",
                self.p
            )));
        }
        Ok(Some(m))
    }

    /// `space` level: `--N` or the level of `--label`.
    pub fn space_level(&self) -> Result<u64> {
        if let Some(n) = self.level {
            return Ok(n);
        }
        match &self.label {
            Some(l) => Ok(crate::modsym::eigen::known_form(l)?.level),
            None => Err(Error::Config(
                "give a level with --N or a form with --label".into(),
            )),
        }
    }
}

/// `T5`, `U3` or `iota`.
pub fn parse_op(s: &str) -> Result<HeckeOp> {
    let bad = || {
        Error::Config(format!(
            "operator {s:?} is not of the form T<prime>, U<prime> or iota"
        ))
    };
    if s == "iota" {
        return Ok(HeckeOp::Iota);
    }
    let (head, tail) = s.split_at(1.min(s.len()));
    let l: u64 = tail.parse().map_err(|_| bad())?;
    if !is_prime(l) {
        return Err(bad());
    }
    match head {
        "T" => Ok(HeckeOp::T(l)),
        "U" => Ok(HeckeOp::U(l)),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: Defaults = Defaults {
        p: 3,
        k: 0,
        prec: 8,
    };

    #[test]
    fn flags_beat_env_beat_file() {
        let file: Overrides =
            serde_json::from_str(r#"{"p": 5, "prec": 12, "threads": 2}"#).unwrap();
        let env =
            Overrides::from_env(|k| (k == "PADIC_LAB_PREC").then(|| "10".to_string())).unwrap();
        let flags = Overrides {
            p: Some(7),
            ..Overrides::default()
        };
        let cfg = RunConfig::build(file.layered(env).layered(flags), D).unwrap();
        assert_eq!((cfg.p, cfg.prec, cfg.threads), (7, 10, 2));
        assert_eq!(cfg.moduli, vec![7, 49]);
    }

    #[test]
    fn invalid_settings_are_config_errors() {
        for o in [
            Overrides {
                p: Some(2),
                ..Overrides::default()
            },
            Overrides {
                p: Some(9),
                ..Overrides::default()
            },
            Overrides {
                moduli: Some(vec![6]),
                ..Overrides::default()
            },
            Overrides {
                sign: Some(0),
                ..Overrides::default()
            },
            Overrides {
                op: Some("T4".into()),
                ..Overrides::default()
            },
            Overrides {
                embedding: Some("other".into()),
                ..Overrides::default()
            },
        ] {
            assert_eq!(RunConfig::build(o, D).unwrap_err().exit_code(), 2);
        }
        assert!(serde_json::from_str::<Overrides>(r#"{"q": 1}"#).is_err());
    }

    #[test]
    fn tame_level_splits_off_p() {
        let cfg = RunConfig::build(
            Overrides {
                level: Some(33),
                ..Overrides::default()
            },
            D,
        )
        .unwrap();
        assert_eq!(cfg.tame_level().unwrap(), Some(11));
        let bad = RunConfig::build(
            Overrides {
                level: Some(99),
                ..Overrides::default()
            },
            D,
        )
        .unwrap();
        assert!(bad.tame_level().is_err());
    }

    #[test]
    fn operators_parse() {
        assert_eq!(parse_op("T2").unwrap(), HeckeOp::T(2));
        assert_eq!(parse_op("U11").unwrap(), HeckeOp::U(11));
        assert!(parse_op("X3").is_err());
        assert!(parse_op("").is_err());
    }
}
