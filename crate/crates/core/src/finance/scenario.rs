//! Option scenarios: the built-in catalog and a TOML loader.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Payoff family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Asian,
    Lookback,
    Barrier,
    Basket,
    Bermudan,
}

impl OptionKind {
    pub fn name(self) -> &'static str {
        match self {
            OptionKind::Asian => "asian",
            OptionKind::Lookback => "lookback",
            OptionKind::Barrier => "barrier",
            OptionKind::Basket => "basket",
            OptionKind::Bermudan => "bermudan",
        }
    }

    pub fn is_path_option(self) -> bool {
        self != OptionKind::Basket
    }
}

/// One volatility for every step/asset, or one per basket asset.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Volatility {
    Flat(f64),
    PerAsset(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionScenario {
    pub kind: OptionKind,
    pub name: String,
    pub s0: f64,
    #[serde(default)]
    pub k: Option<f64>,
    pub sigma: Volatility,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub barrier_level: Option<f64>,
    #[serde(default)]
    pub n_exercise: Option<usize>,
    #[serde(default = "default_width")]
    pub n_steps: usize,
    #[serde(default = "default_width")]
    pub n_assets: usize,
    /// Published price, rounded to cents.
    #[serde(default)]
    pub true_price: Option<f64>,
    /// Higher-precision price used as the benchmark truth when present.
    #[serde(default)]
    pub reference_price: Option<f64>,
}

fn default_t() -> f64 {
    1.0
}

fn default_r() -> f64 {
    0.05
}

fn default_width() -> usize {
    32
}

impl OptionScenario {
    fn base(kind: OptionKind, name: &str, s0: f64, k: Option<f64>, sigma: f64) -> Self {
        Self {
            kind,
            name: name.to_string(),
            s0,
            k,
            sigma: Volatility::Flat(sigma),
            t: 1.0,
            r: 0.05,
            rho: None,
            barrier_level: None,
            n_exercise: None,
            n_steps: 32,
            n_assets: 32,
            true_price: None,
            reference_price: None,
        }
    }

    /// Number of uniforms consumed per sample: time steps, or basket assets.
    pub fn dim(&self) -> usize {
        if self.kind.is_path_option() {
            self.n_steps
        } else {
            self.n_assets
        }
    }

    /// Truth for error statistics: the precise reference if known, else the
    /// published price.
    pub fn truth(&self) -> Option<f64> {
        self.reference_price.or(self.true_price)
    }

    pub fn strike(&self) -> Result<f64> {
        self.k
            .ok_or_else(|| Error::invalid(format!("scenario `{}` has no strike", self.name)))
    }

    /// Per-asset (basket) or per-step volatilities, expanded to `dim()` entries.
    pub fn sigmas(&self) -> Result<Vec<f64>> {
        match &self.sigma {
            Volatility::Flat(s) => Ok(vec![*s; self.dim()]),
            Volatility::PerAsset(v) if self.kind == OptionKind::Basket => {
                if v.len() != self.n_assets {
                    return Err(Error::DimensionMismatch {
                        expected: self.n_assets,
                        actual: v.len(),
                    });
                }
                Ok(v.clone())
            }
            Volatility::PerAsset(_) => Err(Error::invalid(format!(
                "scenario `{}`: a volatility list is only valid for baskets",
                self.name
            ))),
        }
    }

    /// Copy with every volatility replaced by `sigma`.
    pub fn with_sigma(&self, sigma: f64) -> Self {
        Self {
            sigma: Volatility::Flat(sigma),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(format!("scenario `{}`: {m}", self.name)));
        if !(self.s0 > 0.0 && self.s0.is_finite()) {
            return bad(format!("s0 must be positive, got {}", self.s0));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return bad(format!("t must be positive, got {}", self.t));
        }
        if !self.r.is_finite() {
            return bad("r must be finite".into());
        }
        if self.n_steps == 0 || self.n_assets == 0 {
            return bad("n_steps and n_assets must be positive".into());
        }
        if self.sigmas()?.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return bad("volatilities must be non-negative".into());
        }
        if self.kind != OptionKind::Lookback {
            match self.k {
                Some(k) if k.is_finite() && k >= 0.0 => {}
                _ => return bad("a non-negative strike `k` is required".into()),
            }
        }
        match self.kind {
            OptionKind::Barrier => {
                if !matches!(self.barrier_level, Some(b) if b.is_finite()) {
                    return bad("barrier_level is required".into());
                }
            }
            OptionKind::Basket => {
                let rho = self.rho.unwrap_or(f64::NAN);
                let lower = if self.n_assets > 1 {
                    -1.0 / (self.n_assets - 1) as f64
                } else {
                    f64::NEG_INFINITY
                };
                if !(rho > lower && rho <= 1.0) {
                    return bad(format!("rho must lie in ({lower}, 1], got {rho}"));
                }
            }
            OptionKind::Bermudan => match self.n_exercise {
                Some(e) if e >= 1 && self.n_steps.is_multiple_of(e) => {}
                _ => return bad("n_exercise must be positive and divide n_steps".into()),
            },
            _ => {}
        }
        Ok(())
    }
}

/// The sixteen built-in scenarios, in catalog order.
pub fn catalog() -> Vec<OptionScenario> {
    use OptionKind::*;
    let asian = |name: &str, k: f64, sigma: f64, price: f64, reference: f64| OptionScenario {
        true_price: Some(price),
        reference_price: Some(reference),
        ..OptionScenario::base(Asian, name, 50.0, Some(k), sigma)
    };
    let basket = |name: &str, k: f64, sigma: Volatility, rho: f64| OptionScenario {
        sigma,
        rho: Some(rho),
        ..OptionScenario::base(Basket, name, 100.0, Some(k), 0.0)
    };
    let mixed: Vec<f64> = (0..32).map(|i| 0.15 + 0.25 * i as f64 / 31.0).collect();
    vec![
        asian("asian-training", 45.0, 0.3, 7.06, ASIAN_REFERENCE[0]),
        asian("asian-otm", 60.0, 0.3, 1.02, ASIAN_REFERENCE[1]),
        asian("asian-atm", 52.5, 0.3, 2.98, ASIAN_REFERENCE[2]),
        asian("asian-itm", 40.0, 0.3, 11.02, ASIAN_REFERENCE[3]),
        asian("asian-highvol", 52.5, 0.6, 6.43, ASIAN_REFERENCE[4]),
        asian("asian-lowvol", 52.5, 0.1, 0.69, ASIAN_REFERENCE[5]),
        OptionScenario::base(Lookback, "lookback-base", 100.0, None, 0.2),
        OptionScenario::base(Lookback, "lookback-highvol", 100.0, None, 0.4),
        OptionScenario {
            barrier_level: Some(85.0),
            ..OptionScenario::base(Barrier, "barrier-base", 100.0, Some(100.0), 0.2)
        },
        OptionScenario {
            barrier_level: Some(95.0),
            ..OptionScenario::base(Barrier, "barrier-close", 100.0, Some(100.0), 0.2)
        },
        basket("basket-lowcorr", 100.0, Volatility::Flat(0.2), 0.1),
        basket("basket-highcorr", 100.0, Volatility::Flat(0.2), 0.8),
        basket("basket-mixedvol", 100.0, Volatility::PerAsset(mixed), 0.5),
        basket("basket-otm", 110.0, Volatility::Flat(0.2), 0.1),
        OptionScenario {
            n_exercise: Some(4),
            ..OptionScenario::base(Bermudan, "bermudan-atm", 100.0, Some(100.0), 0.2)
        },
        OptionScenario {
            n_exercise: Some(4),
            ..OptionScenario::base(Bermudan, "bermudan-itm", 90.0, Some(100.0), 0.2)
        },
    ]
}

// reference_price(log2n = 20, reps = 64, seed = 20240917) for the six Asian
// scenarios; standard errors 2.5e-5 to 1.4e-4.
const ASIAN_REFERENCE: [f64; 6] = [
    7.064_532_0,
    1.016_151_0,
    2.975_332_2,
    11.015_969_8,
    6.427_470_3,
    0.693_160_7,
];

pub fn scenario_names() -> Vec<String> {
    catalog().into_iter().map(|s| s.name).collect()
}

pub fn scenario(name: &str) -> Result<OptionScenario> {
    catalog()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}

/// Parses a TOML scenario file whose keys are the [`OptionScenario`] fields.
pub fn parse_scenario(text: &str, origin: &Path) -> Result<OptionScenario> {
    let s: OptionScenario = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        line: e
            .span()
            .map(|r| text[..r.start].lines().count().max(1))
            .unwrap_or(0),
        message: e.message().to_string(),
    })?;
    s.validate()?;
    Ok(s)
}

pub fn load_scenario(path: &Path) -> Result<OptionScenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text, path)
}
