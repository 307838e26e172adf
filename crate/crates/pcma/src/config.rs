//! Layered `key=value` settings: built-in defaults, then a preset, then a
//! config file, then command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use pcma_core::bench::{LfrParams, SimpleBenchmarkParams};
use pcma_core::ego::{EgoConfig, EmSettings};
use pcma_core::pipeline::DetectConfig;
use pcma_core::postprocess::RatioCut;
use pcma_core::Thresholds;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("unknown setting {0:?}")]
    UnknownKey(String),
    #[error("setting {key}: cannot parse {value:?}")]
    BadValue { key: String, value: String },
    #[error("setting {0} is required")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

/// Every recognized key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("t_fs", "merger threshold on the symmetric similarity"),
    ("t_l", "minimum merged partials per community"),
    ("t_s", "minimum occurrence score of a member"),
    ("t_sl", "members need S / l above this"),
    ("t_f0", "suppression mass for small mergers; 0 disables"),
    ("min_size", "minimum members per final community"),
    (
        "ratio_cut",
        "'uniform', 'g' or 'g:<factor>' for an S / l cut of factor * g (factor 0.5 by default)",
    ),
    ("min_degree", "vertices below this degree get no ego fit"),
    (
        "clustering_cap",
        "vertices above this local clustering get no ego fit",
    ),
    ("belong_threshold", "belonging coefficient a member must exceed"),
    ("intra_overlap", "overlap portion that joins partials of one ego"),
    (
        "ego_k",
        "fixed communities per ego fit (default: size / 30 in [5, 20])",
    ),
    ("em_iterations", "EM iteration cap"),
    ("em_tolerance", "EM relative convergence tolerance"),
    ("em_restarts", "EM random starts per ego"),
    (
        "em_parallel_cosine",
        "Cosine at which fitted ego communities fold together",
    ),
    ("seed", "random seed"),
    ("workers", "threads for the ego stage"),
    ("n", "generator: vertices"),
    ("k_mean", "generator: mean degree (background degree for simple)"),
    ("p", "simple: intra-community edge probability"),
    ("s_mean", "simple: mean community size"),
    ("c_mean", "simple: mean memberships per vertex"),
    ("k_max", "lfr: maximum degree"),
    ("mu", "lfr: mixing fraction"),
    ("tau1", "lfr: degree exponent"),
    ("tau2", "lfr: community size exponent"),
    ("c_min", "lfr: minimum community size"),
    ("c_max", "lfr: maximum community size"),
    ("overlap_fraction", "lfr: fraction of overlapping vertices"),
    (
        "memberships_per_overlapper",
        "lfr: communities per overlapping vertex",
    ),
    ("sizes", "bench-time: comma-separated vertex counts"),
];

fn known(key: &str) -> bool {
    KEYS.iter().any(|&(k, _)| k == key)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Sparse,
    Dense,
    Lfr,
}

impl FromStr for Preset {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sparse" => Ok(Preset::Sparse),
            "dense" => Ok(Preset::Dense),
            "lfr" => Ok(Preset::Lfr),
            _ => Err(ConfigError::BadValue {
                key: "preset".into(),
                value: s.into(),
            }),
        }
    }
}

impl Preset {
    fn pairs(self) -> &'static [(&'static str, &'static str)] {
        const CLEANING: [(&str, &str); 4] = [("t_fs", "0.1"), ("t_l", "10"), ("t_s", "3"), ("t_sl", "0.1")];
        match self {
            Preset::Sparse => &[
                CLEANING[0],
                CLEANING[1],
                CLEANING[2],
                CLEANING[3],
                ("n", "10000"),
                ("k_mean", "3"),
                ("p", "0.3"),
                ("s_mean", "40"),
                ("c_mean", "2"),
            ],
            Preset::Dense => &[
                CLEANING[0],
                CLEANING[1],
                CLEANING[2],
                CLEANING[3],
                ("n", "10000"),
                ("k_mean", "20"),
                ("p", "0.3"),
                ("s_mean", "40"),
                ("c_mean", "3"),
            ],
            Preset::Lfr => &[
                CLEANING[0],
                CLEANING[1],
                CLEANING[2],
                CLEANING[3],
                ("n", "10000"),
                ("k_mean", "40"),
                ("k_max", "100"),
                ("mu", "0.3"),
                ("tau1", "2"),
                ("tau2", "1"),
                ("c_min", "20"),
                ("c_max", "100"),
                ("overlap_fraction", "0.1"),
                ("memberships_per_overlapper", "2"),
            ],
        }
    }
}

/// Explicitly chosen settings; anything absent falls back to the library
/// defaults when the typed configs are built.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn from_preset(preset: Preset) -> Self {
        let mut s = Settings::default();
        for &(k, v) in preset.pairs() {
            s.values.insert(k.into(), v.into());
        }
        s
    }

    /// Parses a config file: `key = value` lines, `#` comments.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                reason: "expected key=value".into(),
            })?;
            s.set(key.trim(), value.trim())?;
        }
        Ok(s)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !known(key) {
            return Err(ConfigError::UnknownKey(key.into()));
        }
        self.values.insert(key.into(), value.into());
        Ok(())
    }

    /// Overrides entries of `self` with every entry of `top`.
    pub fn overlay(&mut self, top: &Settings) {
        for (k, v) in &top.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        self.raw(key)
            .map(|v| {
                v.parse().map_err(|_| ConfigError::BadValue {
                    key: key.into(),
                    value: v.into(),
                })
            })
            .transpose()
    }

    fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn seed(&self) -> Result<u64, ConfigError> {
        self.get("seed")?.ok_or(ConfigError::Missing("seed"))
    }

    /// Worker threads; defaults to the available parallelism.
    pub fn workers(&self) -> Result<usize, ConfigError> {
        let default = std::thread::available_parallelism().map_or(1, |n| n.get());
        match self.get_or("workers", default)? {
            0 => Err(ConfigError::Invalid("workers must be at least 1".into())),
            w => Ok(w),
        }
    }

    pub fn thresholds(&self) -> Result<Thresholds, ConfigError> {
        let d = Thresholds::default();
        let ratio_cut = match self.raw("ratio_cut") {
            None | Some("uniform") => RatioCut::Uniform,
            Some("g") => RatioCut::ScaledByG(0.5),
            Some(v) => {
                let factor = v.strip_prefix("g:").and_then(|f| f.parse().ok());
                RatioCut::ScaledByG(factor.ok_or_else(|| ConfigError::BadValue {
                    key: "ratio_cut".into(),
                    value: v.into(),
                })?)
            }
        };
        let th = Thresholds {
            t_fs: self.get_or("t_fs", d.t_fs)?,
            t_l: self.get_or("t_l", d.t_l)?,
            t_s: self.get_or("t_s", d.t_s)?,
            t_sl: self.get_or("t_sl", d.t_sl)?,
            t_f0: self.get_or("t_f0", d.t_f0)?,
            min_size: self.get_or("min_size", d.min_size)?,
            ratio_cut,
        };
        th.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(th)
    }

    pub fn ego(&self) -> Result<EgoConfig, ConfigError> {
        let d = EgoConfig::default();
        let em = EmSettings {
            max_iterations: self.get_or("em_iterations", d.em.max_iterations)?,
            tolerance: self.get_or("em_tolerance", d.em.tolerance)?,
            restarts: self.get_or("em_restarts", d.em.restarts)?,
            parallel_cosine: self.get_or("em_parallel_cosine", d.em.parallel_cosine)?,
        };
        let ego = EgoConfig {
            min_degree: self.get_or("min_degree", d.min_degree)?,
            clustering_cap: self.get_or("clustering_cap", d.clustering_cap)?,
            belong_threshold: self.get_or("belong_threshold", d.belong_threshold)?,
            intra_overlap: self.get_or("intra_overlap", d.intra_overlap)?,
            k_override: self.get("ego_k")?,
            em,
            seed: self.seed()?,
        };
        if ego.k_override == Some(0) || em.restarts == 0 {
            return Err(ConfigError::Invalid(
                "ego_k and em_restarts must be at least 1".into(),
            ));
        }
        Ok(ego)
    }

    pub fn detect(&self) -> Result<DetectConfig, ConfigError> {
        Ok(DetectConfig {
            ego: self.ego()?,
            thresholds: self.thresholds()?,
        })
    }

    pub fn simple(&self) -> Result<SimpleBenchmarkParams, ConfigError> {
        let d = SimpleBenchmarkParams::default();
        let params = SimpleBenchmarkParams {
            n: self.get_or("n", d.n)?,
            k_mean: self.get_or("k_mean", d.k_mean)?,
            p: self.get_or("p", d.p)?,
            s_mean: self.get_or("s_mean", d.s_mean)?,
            c_mean: self.get_or("c_mean", d.c_mean)?,
            seed: self.seed()?,
        };
        params
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(params)
    }

    /// LFR parameters. Only syntax is checked here; feasibility is reported by
    /// the generator.
    pub fn lfr(&self) -> Result<LfrParams, ConfigError> {
        let d = LfrParams::default();
        Ok(LfrParams {
            n: self.get_or("n", d.n)?,
            k_mean: self.get_or("k_mean", d.k_mean)?,
            k_max: self.get_or("k_max", d.k_max)?,
            mu: self.get_or("mu", d.mu)?,
            tau1: self.get_or("tau1", d.tau1)?,
            tau2: self.get_or("tau2", d.tau2)?,
            c_min: self.get_or("c_min", d.c_min)?,
            c_max: self.get_or("c_max", d.c_max)?,
            overlap_fraction: self.get_or("overlap_fraction", d.overlap_fraction)?,
            memberships_per_overlapper: self
                .get_or("memberships_per_overlapper", d.memberships_per_overlapper)?,
            seed: self.seed()?,
        })
    }

    pub fn sizes(&self) -> Result<Vec<usize>, ConfigError> {
        let raw = self.raw("sizes").ok_or(ConfigError::Missing("sizes"))?;
        raw.split(',')
            .map(|t| {
                t.trim().parse().map_err(|_| ConfigError::BadValue {
                    key: "sizes".into(),
                    value: raw.into(),
                })
            })
            .collect()
    }
}

/// The manifest form: sorted `key=value` lines.
impl fmt::Display for Settings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.values {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}
