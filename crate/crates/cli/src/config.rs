//! `key = value` run configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use sl2_core::{oracles, Frequency, Settings, TorusFunction};

use crate::CliError;

/// Every key accepted in a config file and as a `--key value` flag.
pub const KEYS: &[(&str, &str)] = &[
    ("potential", "potential file: one `k re im` Fourier mode per line"),
    ("lambda", "almost Mathieu coupling, used when no potential file is given"),
    ("cocycle", "schrodinger | rotation | identity | diagonal-exponential"),
    ("k", "degree of the rotation cocycle"),
    ("q0", "frequency of the diagonal exponential cocycle"),
    ("alpha", "frequency: `golden`, a decimal, or `p/q`"),
    ("theta", "phase shift applied to the potential"),
    ("energy", "energy E"),
    ("e_min", "first energy of a scan"),
    ("e_max", "last energy of a scan"),
    ("e_points", "number of scan energies"),
    ("eps_min", "first ε of a profile"),
    ("eps_max", "last ε of a profile"),
    ("eps_points", "number of profile points"),
    ("eps", "ε for the gradient"),
    ("j", "acceleration of the stratum for the gradient"),
    ("modes", "largest Fourier mode K of the gradient"),
    ("grid", "quadrature points per period"),
    ("max_grid", "largest quadrature grid after refinement"),
    ("q_max", "largest convergent denominator"),
    ("h", "initial step of acceleration fits"),
    ("n0", "initial product length for splittings"),
    ("splitting_grid", "phase grid for splittings"),
    ("out", "CSV output path (stdout when absent)"),
    ("svg", "SVG output path for profiles"),
    ("threads", "worker threads"),
];

/// Raw key/value pairs, later ones overriding earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

fn normalize_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut out = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            out.set(k, v.trim())
                .map_err(|e| CliError::Config(format!("line {}: {}", i + 1, e)))?;
        }
        Ok(out)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let key = normalize_key(key);
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(format!("unknown key `{key}`"));
        }
        self.values.insert(key, value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("`{key}`: cannot parse `{v}`"))),
        }
    }

    fn or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }
}

fn bounded<T: PartialOrd + std::fmt::Display + Copy>(key: &str, v: T, lo: T, hi: T) -> Result<T, CliError> {
    if v < lo || v > hi {
        return Err(CliError::Config(format!("`{key}` = {v} is outside [{lo}, {hi}]")));
    }
    Ok(v)
}

pub fn parse_alpha(s: &str) -> Result<Frequency, CliError> {
    let bad = |e: sl2_core::Error| CliError::Config(format!("`alpha`: {e}"));
    if s == "golden" {
        return Ok(Frequency::golden());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| CliError::Config(format!("`alpha`: bad numerator in `{s}`")))?;
        let q: u64 = q.trim().parse().map_err(|_| CliError::Config(format!("`alpha`: bad denominator in `{s}`")))?;
        return Frequency::rational(p, q).map_err(bad);
    }
    let x: f64 = s.parse().map_err(|_| CliError::Config(format!("`alpha`: cannot parse `{s}`")))?;
    Frequency::irrational(x).map_err(bad)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CocycleKind {
    Schrodinger,
    Rotation,
    Identity,
    DiagonalExponential,
}

/// Inclusive range with a point count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        (0..self.points)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.points - 1) as f64)
            .collect()
    }
}

/// Validated configuration shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kind: CocycleKind,
    pub potential: TorusFunction,
    pub degree: i64,
    pub q0: u32,
    pub alpha: Frequency,
    pub energy: Option<f64>,
    pub energies: Range,
    pub eps_range: Range,
    pub eps: f64,
    pub j: i64,
    pub modes: usize,
    pub settings: Settings,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, CliError> {
        let kind = match raw.get("cocycle").unwrap_or("schrodinger") {
            "schrodinger" => CocycleKind::Schrodinger,
            "rotation" => CocycleKind::Rotation,
            "identity" => CocycleKind::Identity,
            "diagonal-exponential" | "diagonal_exponential" => CocycleKind::DiagonalExponential,
            other => return Err(CliError::Config(format!("`cocycle`: unknown kind `{other}`"))),
        };
        let mut potential = match (raw.get("potential"), raw.parsed::<f64>("lambda")?) {
            (Some(path), _) => TorusFunction::read_file(Path::new(path))
                .map_err(|e| CliError::Config(format!("`potential`: {e}")))?,
            (None, Some(l)) => oracles::amo_potential(bounded("lambda", l, 0.0, 1e6)?),
            (None, None) => TorusFunction::zero(),
        };
        let theta = raw.or("theta", 0.0)?;
        if theta != 0.0 {
            potential = potential.shift(theta);
        }
        let alpha = parse_alpha(raw.get("alpha").unwrap_or("golden"))?;

        let mut settings = Settings::default();
        let lyap = &mut settings.acceleration.lyapunov;
        lyap.grid = bounded("grid", raw.or("grid", lyap.grid)?, 256, 1 << 20)?;
        lyap.max_grid = bounded("max_grid", raw.or("max_grid", lyap.max_grid)?, lyap.grid, 1 << 22)?;
        lyap.q_cap = bounded("q_max", raw.or("q_max", lyap.q_cap)?, 1, 1_000_000)?;
        let acc = &mut settings.acceleration;
        acc.h0 = bounded("h", raw.or("h", acc.h0)?, 1e-6, 0.5)?;
        let sp = &mut settings.splitting;
        sp.n0 = bounded("n0", raw.or("n0", sp.n0)?, 50, 1 << 14)?;
        sp.grid = bounded("splitting_grid", raw.or("splitting_grid", sp.grid)?, 8, 4096)?;

        let energies = Range {
            min: raw.or("e_min", -6.0)?,
            max: raw.or("e_max", 6.0)?,
            points: bounded("e_points", raw.or("e_points", 61)?, 1, 100_000)?,
        };
        if energies.points > 1 && (energies.max.is_nan() || energies.min.is_nan() || energies.max <= energies.min) {
            return Err(CliError::Config("empty energy range".into()));
        }
        let eps_range = Range {
            min: raw.or("eps_min", 0.0)?,
            max: raw.or("eps_max", 0.3)?,
            points: bounded("eps_points", raw.or("eps_points", 31)?, 5, 10_000)?,
        };
        if eps_range.max.is_nan() || eps_range.min.is_nan() || eps_range.max <= eps_range.min {
            return Err(CliError::Config("empty ε range".into()));
        }
        Ok(RunConfig {
            kind,
            potential,
            degree: raw.or("k", 1)?,
            q0: bounded("q0", raw.or("q0", 1)?, 1, 64)?,
            alpha,
            energy: raw.parsed("energy")?,
            energies,
            eps_range,
            eps: raw.or("eps", 0.1)?,
            j: raw.or("j", 1)?,
            modes: bounded("modes", raw.or("modes", 2)?, 0, 64)?,
            settings,
            out: raw.get("out").map(PathBuf::from),
            svg: raw.get("svg").map(PathBuf::from),
            threads: raw.parsed::<usize>("threads")?.map(|t| bounded("threads", t, 1, 256)).transpose()?,
        })
    }

    pub fn alpha_value(&self) -> f64 {
        self.alpha.value()
    }
}
