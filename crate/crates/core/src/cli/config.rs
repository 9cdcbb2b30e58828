use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::recurrence::{
    aggregate, make_initial_flagged, make_werner, BinaryFlaggedState, BinaryNoise, Coefficients, FlaggedState16,
    IdealState, NoiseModel,
};
use crate::Result;

/// Probability vectors in a config must sum to 1 within this.
pub const CONFIG_SUM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Werner(f64),
    /// `A Φ⁺ + B Ψ⁺`, flags cleared.
    Binary([f64; 2]),
    /// Bell-diagonal `A, B, C, D`, flags cleared.
    Ideal([f64; 4]),
    /// All 16 flagged cells.
    Flagged(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    Noiseless,
    OneQubitWhite(f64),
    TwoQubitWhite(f64),
    /// Applied one after another (convolution of the Pauli-pair tables).
    Composed(Vec<NoiseSpec>),
    /// `f_μν` row-major over `I, X, Y, Z`.
    Explicit(Vec<f64>),
    /// `f00, f01, f10, f11` of the correlated spin-flip channel.
    Binary([f64; 4]),
}

/// Which one-round map `fixpoint` iterates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Ideal,
    Binary,
    Aggregate,
    #[default]
    Flagged,
}

/// Experiment manifest. Every field is optional; each subcommand fills in
/// its own defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<MapKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f00_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_per_point: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_targets: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_sec: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<ExperimentConfig> {
        ExperimentConfig::from_json(&std::fs::read_to_string(path)?)
    }

    /// Checks every numeric field so that a bad manifest fails before any run.
    pub fn validate(&self) -> Result<()> {
        if let Some(i) = &self.initial {
            i.build("initial")?;
        }
        if let Some(n) = &self.noise {
            n.build("noise")?;
        }
        if let Some(t) = self.tol {
            positive_or_zero("tol", t)?;
        }
        if let Some(e) = self.ensemble {
            if e < 2 {
                return Err(Error::config("ensemble", "must be at least 2"));
            }
        }
        if let Some([lo, hi]) = self.bracket {
            if !(lo < hi) || !(0.75..=1.0).contains(&lo) || !(0.75..=1.0).contains(&hi) {
                return Err(Error::config("bracket", "need 0.75 <= lo < hi <= 1"));
            }
        }
        if let Some(t) = self.critical_tol {
            if !(t > 0.0) {
                return Err(Error::config("critical_tol", "must be positive"));
            }
        }
        if let Some(g) = &self.f00_grid {
            if g.is_empty() {
                return Err(Error::config("f00_grid", "must not be empty"));
            }
            for (i, f) in g.iter().enumerate() {
                unit(&format!("f00_grid[{i}]"), *f)?;
            }
        }
        if self.samples_per_point == Some(0) {
            return Err(Error::config("samples_per_point", "must be at least 1"));
        }
        if let Some(t) = &self.eps_targets {
            for (i, e) in t.iter().enumerate() {
                if !(*e > 0.0 && *e < 1.0) {
                    return Err(Error::config(format!("eps_targets[{i}]"), format!("{e} not in (0, 1)")));
                }
            }
        }
        if let Some(e) = self.eps_sec {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::config("eps_sec", format!("{e} not in (0, 1)")));
            }
        }
        Ok(())
    }
}

fn unit(key: &str, x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::config(key, format!("{x} not in [0, 1]")))
    }
}

fn positive_or_zero(key: &str, x: f64) -> Result<f64> {
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::config(key, format!("{x} must be finite and >= 0")))
    }
}

/// Nonnegative, sums to 1 within [`CONFIG_SUM_TOL`]; returned rescaled to sum exactly.
fn distribution(key: &str, v: &[f64], len: usize) -> Result<Vec<f64>> {
    if v.len() != len {
        return Err(Error::config(key, format!("expected {len} entries, got {}", v.len())));
    }
    if let Some((i, x)) = v.iter().enumerate().find(|(_, x)| !(**x >= 0.0) || !x.is_finite()) {
        return Err(Error::config(format!("{key}[{i}]"), format!("{x} is not a probability")));
    }
    let total: f64 = v.iter().sum();
    if (total - 1.0).abs() > CONFIG_SUM_TOL {
        return Err(Error::config(key, format!("entries sum to {total}, expected 1")));
    }
    Ok(v.iter().map(|x| x / total).collect())
}

impl InitialSpec {
    fn vector(&self, key: &str) -> Result<Vec<f64>> {
        match self {
            InitialSpec::Werner(f) => Ok(make_werner(unit(&format!("{key}.werner"), *f)?)?.coeffs().to_vec()),
            InitialSpec::Binary(v) => distribution(&format!("{key}.binary"), v, 2),
            InitialSpec::Ideal(v) => distribution(&format!("{key}.ideal"), v, 4),
            InitialSpec::Flagged(v) => distribution(&format!("{key}.flagged"), v, 16),
        }
    }

    pub fn build(&self, key: &str) -> Result<FlaggedState16> {
        let v = self.vector(key)?;
        match self {
            InitialSpec::Binary(_) => Ok(FlaggedState16::from_binary(&BinaryFlaggedState::unflagged(v[0], v[1])?)),
            InitialSpec::Flagged(_) => FlaggedState16::try_from_slice(&v),
            _ => Ok(make_initial_flagged(&IdealState::try_from_slice(&v)?)),
        }
    }

    /// Flag-free view of the initial ensemble.
    pub fn ideal(&self, key: &str) -> Result<IdealState> {
        Ok(aggregate(&self.build(key)?))
    }

    pub fn binary(&self, key: &str) -> Result<BinaryFlaggedState> {
        match self {
            InitialSpec::Binary(_) => {
                let v = self.vector(key)?;
                BinaryFlaggedState::unflagged(v[0], v[1])
            }
            _ => Err(Error::config(key, "the binary map needs a `binary` initial state")),
        }
    }
}

impl NoiseSpec {
    pub fn build(&self, key: &str) -> Result<NoiseModel> {
        match self {
            NoiseSpec::Noiseless => Ok(NoiseModel::noiseless()),
            NoiseSpec::OneQubitWhite(f) => NoiseModel::one_qubit_white(unit(&format!("{key}.one_qubit_white"), *f)?),
            NoiseSpec::TwoQubitWhite(f) => NoiseModel::two_qubit_white(unit(&format!("{key}.two_qubit_white"), *f)?),
            NoiseSpec::Composed(parts) => {
                if parts.is_empty() {
                    return Err(Error::config(format!("{key}.composed"), "must not be empty"));
                }
                let mut n = NoiseModel::noiseless();
                for (i, p) in parts.iter().enumerate() {
                    n = n.compose(&p.build(&format!("{key}.composed[{i}]"))?);
                }
                Ok(n)
            }
            NoiseSpec::Explicit(v) => NoiseModel::from_entries(&distribution(&format!("{key}.explicit"), v, 16)?),
            NoiseSpec::Binary(_) => Ok(self.binary(key)?.to_noise_model()),
        }
    }

    pub fn binary(&self, key: &str) -> Result<BinaryNoise> {
        match self {
            NoiseSpec::Binary(v) => {
                let v = distribution(&format!("{key}.binary"), v, 4)?;
                BinaryNoise::new(v[0], v[1], v[2], v[3])
            }
            _ => Err(Error::config(key, "the binary map needs `binary` noise")),
        }
    }
}
