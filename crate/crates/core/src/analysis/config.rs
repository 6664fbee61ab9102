//! Scenario files: line-oriented `key = value` text with `#` comments.
//!
//! ```text
//! variant = hyper_toffoli
//! g_over_kappa = 1.5
//! gamma_over_kappa = 0.01
//! mode = sampled
//! seed = 7
//! a_pol = 0.6+0j, 0+0.8j
//! sweep_range = 0.1, 5, 50
//! output = coupling_sweep.csv
//! ```
//!
//! Complex numbers are written `re+imj`; a bare real or a bare `imj` is also
//! accepted. Photon amplitude pairs that are omitted are drawn at random from
//! the seed.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analysis::sweep::{linear_grid, SweepSpec};
use crate::circuits::{GateVariant, MeasurementMode};
use crate::physics::{PhysicsError, ReflectionPair, SystemParams};
use crate::state::ProductInput;

#[derive(Debug, Error, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line, absent for whole-file problems such as a missing key.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), message: message.into() }
    }

    fn whole(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SweepGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl SweepGrid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            SweepGrid::List(v) => v.clone(),
            SweepGrid::Range { start, stop, count } => linear_grid(*start, *stop, *count),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub variant: GateVariant,
    pub g_over_kappa: f64,
    pub gamma_over_kappa: f64,
    pub cavity_detuning: f64,
    pub emitter_detuning: f64,
    pub mode: MeasurementMode,
    pub seed: u64,
    /// Amplitude pairs in `ProductInput::FIELD_NAMES` order.
    pub amplitudes: [Option<[C64; 2]>; 6],
    pub sweep: Option<SweepGrid>,
    pub output: Option<String>,
}

const KEYS: [&str; 16] = [
    "variant",
    "g_over_kappa",
    "gamma_over_kappa",
    "cavity_detuning",
    "emitter_detuning",
    "mode",
    "seed",
    "a_pol",
    "a_spatial",
    "b_pol",
    "b_spatial",
    "c_pol",
    "c_spatial",
    "sweep_g_over_kappa",
    "sweep_range",
    "output",
];

const NORM_TOL: f64 = 1e-10;

impl ScenarioConfig {
    pub fn new(variant: GateVariant, g_over_kappa: f64) -> Self {
        Self {
            variant,
            g_over_kappa,
            gamma_over_kappa: 0.01,
            cavity_detuning: 0.0,
            emitter_detuning: 0.0,
            mode: MeasurementMode::Exhaustive,
            seed: 0,
            amplitudes: [None; 6],
            sweep: None,
            output: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::whole(format!("cannot read {}: {e}", path.display())))?;
        parse_scenario(&text)
    }

    pub fn params(&self) -> SystemParams {
        SystemParams::detuned(self.g_over_kappa, self.gamma_over_kappa, self.cavity_detuning, self.emitter_detuning)
    }

    pub fn pair(&self) -> Result<ReflectionPair, PhysicsError> {
        self.params().reflection_pair()
    }

    /// The photonic input: given pairs as written, missing ones drawn from
    /// a generator seeded with `seed`.
    pub fn input(&self) -> ProductInput {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let random = ProductInput::random(&mut rng).pairs();
        let pairs = std::array::from_fn(|k| self.amplitudes[k].unwrap_or(random[k]));
        ProductInput::from_pairs(pairs)
    }

    pub fn sweep_spec(&self) -> Option<SweepSpec> {
        let grid = self.sweep.as_ref()?;
        Some(SweepSpec {
            g_over_kappa: grid.points(),
            gamma_over_kappa: self.gamma_over_kappa,
            cavity_detuning: self.cavity_detuning,
            emitter_detuning: self.emitter_detuning,
            variant: self.variant,
            input: self.input(),
            seed: self.seed,
        })
    }

    /// Canonical text form. Parsing it gives back an identical config.
    pub fn to_canonical(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("variant", self.variant.name().to_string());
        kv("g_over_kappa", fmt_real(self.g_over_kappa));
        kv("gamma_over_kappa", fmt_real(self.gamma_over_kappa));
        kv("cavity_detuning", fmt_real(self.cavity_detuning));
        kv("emitter_detuning", fmt_real(self.emitter_detuning));
        kv(
            "mode",
            match self.mode {
                MeasurementMode::Exhaustive => "exhaustive".into(),
                MeasurementMode::Sampled(_) => "sampled".into(),
            },
        );
        kv("seed", self.seed.to_string());
        for (name, pair) in ProductInput::FIELD_NAMES.iter().zip(&self.amplitudes) {
            if let Some([x, y]) = pair {
                kv(name, format!("{}, {}", fmt_complex(*x), fmt_complex(*y)));
            }
        }
        match &self.sweep {
            Some(SweepGrid::List(v)) => {
                kv("sweep_g_over_kappa", v.iter().map(|x| fmt_real(*x)).collect::<Vec<_>>().join(", "))
            }
            Some(SweepGrid::Range { start, stop, count }) => {
                kv("sweep_range", format!("{}, {}, {count}", fmt_real(*start), fmt_real(*stop)))
            }
            None => {}
        }
        if let Some(out) = &self.output {
            kv("output", out.clone());
        }
        s
    }
}

fn fmt_real(x: f64) -> String {
    // Debug keeps the shortest exact representation and marks -0.0
    format!("{x:?}")
}

fn fmt_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{sign}{:?}j", z.re, z.im.abs())
}

fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let lower = s.to_ascii_lowercase();
    if s.is_empty() || lower.contains("nan") || lower.contains("inf") {
        return None;
    }
    s.parse::<f64>().ok()
}

/// Parses `re+imj`, `re-imj`, `re`, or `imj`.
pub fn parse_complex(s: &str) -> Option<C64> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('j') else {
        return parse_real(s).map(|re| C64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let re = parse_real(&body[..i])?;
            let im_txt = &body[i..];
            let im = match im_txt {
                "+" => 1.0,
                "-" => -1.0,
                t => parse_real(t)?,
            };
            Some(C64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                t => parse_real(t)?,
            };
            Some(C64::new(0.0, im))
        }
    }
}

fn parse_list(line: usize, key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split(',')
        .map(|t| {
            parse_real(t).ok_or_else(|| ConfigError::at(line, format!("`{key}`: malformed number `{}`", t.trim())))
        })
        .collect()
}

fn non_negative(line: usize, key: &str, v: f64) -> Result<f64, ConfigError> {
    if v < 0.0 {
        Err(ConfigError::at(line, format!("`{key}` must be non-negative, got {v}")))
    } else {
        Ok(v)
    }
}

/// Parses a scenario file. `variant` and `g_over_kappa` are required.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::new(GateVariant::HyperToffoli, 0.0);
    let mut seen: Vec<&str> = Vec::new();
    let mut sampled = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let key = match key {
            "g" => "g_over_kappa",
            "gamma" => "gamma_over_kappa",
            k => k,
        };
        let Some(&key) = KEYS.iter().find(|k| **k == key) else {
            return Err(ConfigError::at(line, format!("unknown key `{key}`")));
        };
        if seen.contains(&key) {
            return Err(ConfigError::at(line, format!("duplicate key `{key}`")));
        }
        if (key == "sweep_range" && seen.contains(&"sweep_g_over_kappa"))
            || (key == "sweep_g_over_kappa" && seen.contains(&"sweep_range"))
        {
            return Err(ConfigError::at(line, "`sweep_range` and `sweep_g_over_kappa` are mutually exclusive"));
        }
        seen.push(key);

        let real =
            || parse_real(value).ok_or_else(|| ConfigError::at(line, format!("`{key}`: malformed number `{value}`")));
        match key {
            "variant" => {
                cfg.variant =
                    value.parse().map_err(|e: crate::circuits::CircuitError| ConfigError::at(line, e.to_string()))?
            }
            "g_over_kappa" => cfg.g_over_kappa = non_negative(line, key, real()?)?,
            "gamma_over_kappa" => cfg.gamma_over_kappa = non_negative(line, key, real()?)?,
            "cavity_detuning" => cfg.cavity_detuning = real()?,
            "emitter_detuning" => cfg.emitter_detuning = real()?,
            "mode" => {
                sampled = match value {
                    "exhaustive" => false,
                    "sampled" => true,
                    other => {
                        return Err(ConfigError::at(
                            line,
                            format!("`mode` must be exhaustive or sampled, got `{other}`"),
                        ))
                    }
                }
            }
            "seed" => {
                cfg.seed = value.parse().map_err(|_| {
                    ConfigError::at(line, format!("`seed`: expected an unsigned integer, got `{value}`"))
                })?
            }
            "sweep_g_over_kappa" => {
                let v = parse_list(line, key, value)?;
                if v.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(ConfigError::at(line, "`sweep_g_over_kappa` must be strictly increasing"));
                }
                for &g in &v {
                    non_negative(line, key, g)?;
                }
                cfg.sweep = Some(SweepGrid::List(v));
            }
            "sweep_range" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(ConfigError::at(line, "`sweep_range` expects `start, stop, count`"));
                }
                let bad = |t: &str| ConfigError::at(line, format!("`sweep_range`: malformed number `{t}`"));
                let start = non_negative(line, key, parse_real(parts[0]).ok_or_else(|| bad(parts[0]))?)?;
                let stop = parse_real(parts[1]).ok_or_else(|| bad(parts[1]))?;
                let count: usize = parts[2].parse().map_err(|_| bad(parts[2]))?;
                if count == 0 || (count > 1 && stop <= start) {
                    return Err(ConfigError::at(line, "`sweep_range` needs count >= 1 and stop > start"));
                }
                cfg.sweep = Some(SweepGrid::Range { start, stop, count });
            }
            "output" => {
                if value.is_empty() {
                    return Err(ConfigError::at(line, "`output` is empty"));
                }
                cfg.output = Some(value.to_string());
            }
            name => {
                let k = ProductInput::FIELD_NAMES.iter().position(|f| *f == name).expect("amplitude key");
                let parts: Vec<&str> = value.split(',').collect();
                if parts.len() != 2 {
                    return Err(ConfigError::at(line, format!("`{name}` expects two complex numbers")));
                }
                let mut pair = [C64::new(0.0, 0.0); 2];
                for (slot, t) in pair.iter_mut().zip(&parts) {
                    *slot = parse_complex(t).ok_or_else(|| {
                        ConfigError::at(line, format!("`{name}`: malformed complex number `{}`", t.trim()))
                    })?;
                }
                let norm = pair[0].norm_sqr() + pair[1].norm_sqr();
                if (norm - 1.0).abs() > NORM_TOL {
                    return Err(ConfigError::at(
                        line,
                        format!("`{name}` is not normalized (|x1|^2 + |x2|^2 = {norm})"),
                    ));
                }
                cfg.amplitudes[k] = Some(pair);
            }
        }
    }

    for required in ["variant", "g_over_kappa"] {
        if !seen.contains(&required) {
            return Err(ConfigError::whole(format!("missing required key `{required}`")));
        }
    }
    if sampled {
        cfg.mode = MeasurementMode::Sampled(cfg.seed);
    }
    Ok(cfg)
}
