//! Declarative run configuration: a TOML file or preset, then flag overrides.

use serde::Deserialize;
use xxchain::chain::saturation_coupling;
use xxchain::{BathSpec, ChainSpec};

use crate::error::CliError;

pub const DEFAULT_FRACTION: f64 = 0.98;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    TempRight,
    TempLeft,
    Delta,
    G,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            Self::TempRight => "temp_right",
            Self::TempLeft => "temp_left",
            Self::Delta => "delta",
            Self::G => "g",
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Weights {
    Uniform(f64),
    PerMode(Vec<f64>),
}

impl Weights {
    fn expand(&self, n: usize, side: &str) -> Result<Vec<f64>, CliError> {
        match self {
            Self::Uniform(w) => Ok(vec![*w; n]),
            Self::PerMode(v) if v.len() == n => Ok(v.clone()),
            Self::PerMode(v) => Err(CliError::Config(format!(
                "baths.weight_{side}: expected {n} entries, got {}",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChain {
    pub n: Option<usize>,
    pub delta: Option<f64>,
    pub g: Option<f64>,
    pub fraction: Option<f64>,
    /// Δ whose saturation bound the fraction refers to; defaults to the chain's own Δ.
    pub g_reference_delta: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBaths {
    pub temp_left: Option<f64>,
    pub temp_right: Option<f64>,
    pub lambda: Option<f64>,
    pub weight_left: Option<Weights>,
    pub weight_right: Option<Weights>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub variable: Option<SweepVariable>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSeries {
    pub delta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutputs {
    #[serde(default)]
    pub flows: Vec<usize>,
    #[serde(default)]
    pub heat: bool,
    #[serde(default)]
    pub concurrence: Vec<[usize; 2]>,
    #[serde(default)]
    pub factors: bool,
    #[serde(default)]
    pub cmax: Vec<[usize; 2]>,
    pub cmax_bracket: Option<[f64; 2]>,
    pub cmax_grid: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub chain: RawChain,
    #[serde(default)]
    pub baths: RawBaths,
    #[serde(default)]
    pub sweep: RawSweep,
    #[serde(default)]
    pub series: RawSeries,
    #[serde(default)]
    pub outputs: RawOutputs,
}

impl RawConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }
}

/// Command-line values that replace the corresponding config entries.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub delta: Option<f64>,
    pub g: Option<f64>,
    pub fraction: Option<f64>,
    pub temp_left: Option<f64>,
    pub temp_right: Option<f64>,
    pub lambda: Option<f64>,
    pub variable: Option<SweepVariable>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, raw: &mut RawConfig) {
        let c = &mut raw.chain;
        set(&mut c.n, self.n);
        set(&mut c.delta, self.delta);
        // An explicit coupling on the command line replaces either form in the file.
        if self.g.is_some() {
            c.g = self.g;
            c.fraction = None;
            c.g_reference_delta = None;
        }
        if self.fraction.is_some() {
            c.fraction = self.fraction;
            c.g = None;
        }
        set(&mut raw.baths.temp_left, self.temp_left);
        set(&mut raw.baths.temp_right, self.temp_right);
        set(&mut raw.baths.lambda, self.lambda);
        set(&mut raw.sweep.variable, self.variable);
        set(&mut raw.sweep.start, self.start);
        set(&mut raw.sweep.stop, self.stop);
        set(&mut raw.sweep.points, self.points);
    }
}

fn set<T: Copy>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Fixed(f64),
    Fraction {
        fraction: f64,
        reference_delta: Option<f64>,
    },
}

impl Coupling {
    pub fn resolve(self, n: usize, delta: f64) -> f64 {
        match self {
            Self::Fixed(g) => g,
            Self::Fraction {
                fraction,
                reference_delta,
            } => fraction * saturation_coupling(n, reference_delta.unwrap_or(delta)),
        }
    }

    pub fn describe(self) -> String {
        match self {
            Self::Fixed(g) => format!("g={g}"),
            Self::Fraction {
                fraction,
                reference_delta: None,
            } => {
                format!("g={fraction}*bound(delta)")
            }
            Self::Fraction {
                fraction,
                reference_delta: Some(d),
            } => {
                format!("g={fraction}*bound({d})")
            }
        }
    }
}

/// One parameter point: chain parameters and bath temperatures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub delta: f64,
    pub g: f64,
    pub temp_left: f64,
    pub temp_right: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub n_sites: usize,
    pub delta: f64,
    pub coupling: Coupling,
    pub temp_left: f64,
    pub temp_right: f64,
    pub lambda: f64,
    pub weight_left: Vec<f64>,
    pub weight_right: Vec<f64>,
    pub notes: Vec<String>,
}

impl Setup {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, CliError> {
        let c = &raw.chain;
        let n_sites =
            c.n.ok_or_else(|| CliError::Config("chain.n is required".into()))?;
        if !(2..=xxchain::chain::MAX_SITES).contains(&n_sites) {
            return Err(CliError::Config(format!(
                "chain.n must lie in 2..=64, got {n_sites}"
            )));
        }
        let delta = c
            .delta
            .ok_or_else(|| CliError::Config("chain.delta is required".into()))?;
        positive("chain.delta", delta)?;
        let coupling = match (c.g, c.fraction) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "chain.g and chain.fraction are exclusive".into(),
                ))
            }
            (Some(g), None) => {
                positive("chain.g", g)?;
                Coupling::Fixed(g)
            }
            (None, fraction) => {
                let fraction = fraction.unwrap_or(DEFAULT_FRACTION);
                positive("chain.fraction", fraction)?;
                if let Some(d) = c.g_reference_delta {
                    positive("chain.g_reference_delta", d)?;
                }
                Coupling::Fraction {
                    fraction,
                    reference_delta: c.g_reference_delta,
                }
            }
        };
        let b = &raw.baths;
        let temp_left = b.temp_left.unwrap_or(0.0);
        let temp_right = b.temp_right.unwrap_or(0.0);
        non_negative("baths.temp_left", temp_left)?;
        non_negative("baths.temp_right", temp_right)?;
        let lambda = b.lambda.unwrap_or(1.0);
        positive("baths.lambda", lambda)?;
        let unit = Weights::Uniform(1.0);
        let weight_left = b
            .weight_left
            .as_ref()
            .unwrap_or(&unit)
            .expand(n_sites, "left")?;
        let weight_right = b
            .weight_right
            .as_ref()
            .unwrap_or(&unit)
            .expand(n_sites, "right")?;
        for (side, w) in [("left", &weight_left), ("right", &weight_right)] {
            if w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(CliError::Config(format!(
                    "baths.weight_{side}: weights must be > 0"
                )));
            }
        }
        Ok(Self {
            n_sites,
            delta,
            coupling,
            temp_left,
            temp_right,
            lambda,
            weight_left,
            weight_right,
            notes: raw.notes.clone(),
        })
    }

    pub fn base_point(&self) -> Point {
        Point {
            delta: self.delta,
            g: self.coupling.resolve(self.n_sites, self.delta),
            temp_left: self.temp_left,
            temp_right: self.temp_right,
        }
    }

    /// Chain and baths at `p`; an infeasible chain maps to exit status 3.
    pub fn build(&self, p: &Point) -> Result<(ChainSpec, BathSpec), CliError> {
        let spec = ChainSpec::new(self.n_sites, p.delta, p.g).map_err(CliError::infeasible)?;
        spec.require_positive_frequencies(None)
            .map_err(CliError::infeasible)?;
        let baths = BathSpec::new(
            p.temp_left,
            p.temp_right,
            self.weight_left.clone(),
            self.weight_right.clone(),
            self.lambda * self.lambda,
        )
        .and_then(|b| {
            b.validate(self.n_sites)?;
            Ok(b)
        })
        .map_err(|e| CliError::Config(e.to_string()))?;
        Ok((spec, baths))
    }

    pub fn metadata(&self) -> Vec<String> {
        let weights = |w: &[f64]| {
            if w.iter().all(|&x| x == w[0]) {
                format!("{}", w[0])
            } else {
                format!("{w:?}")
            }
        };
        let mut lines = vec![
            format!("xxchain {}", env!("CARGO_PKG_VERSION")),
            format!(
                "chain: n={} delta={} {}",
                self.n_sites,
                self.delta,
                self.coupling.describe()
            ),
            format!(
                "baths: temp_left={} temp_right={} lambda={} weight_left={} weight_right={}",
                self.temp_left,
                self.temp_right,
                self.lambda,
                weights(&self.weight_left),
                weights(&self.weight_right)
            ),
        ];
        lines.extend(self.notes.iter().map(|n| format!("note: {n}")));
        lines
    }
}

fn positive(field: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{field} must be > 0, got {x}")))
    }
}

fn non_negative(field: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{field} must be >= 0, got {x}")))
    }
}

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub text: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1",
        summary: "source term Q_R^(4) vs T_R, N=8, Delta=15,30,50 near saturation",
        text: include_str!("../presets/fig1.toml"),
    },
    Preset {
        name: "fig2",
        summary: "heat flow H_R vs T_R, N=8, T_L=0, Delta=15,30,50 near saturation",
        text: include_str!("../presets/fig2.toml"),
    },
    Preset {
        name: "fig3",
        summary: "C_max(1,s) over T_R for s=2..8, N=8, Delta=15, g=7.8",
        text: include_str!("../presets/fig3.toml"),
    },
    Preset {
        name: "fig4",
        summary: "C(3,4) vs T_R, Delta=15,30,50 with g fixed near the Delta=15 bound",
        text: include_str!("../presets/fig4.toml"),
    },
    Preset {
        name: "fig5",
        summary: "C(3,4) vs T_R, Delta=15,30,50 with g near each bound",
        text: include_str!("../presets/fig5.toml"),
    },
];

pub fn preset(name: &str) -> Result<RawConfig, CliError> {
    let p = PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let known: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
        CliError::Config(format!(
            "unknown preset {name:?}; known: {}",
            known.join(", ")
        ))
    })?;
    RawConfig::parse(p.text, &format!("preset {name}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        for p in PRESETS {
            let raw = preset(p.name).unwrap();
            let setup = Setup::from_raw(&raw).unwrap();
            assert_eq!(setup.n_sites, 8);
        }
    }

    #[test]
    fn flags_replace_file_values() {
        let mut raw = preset("fig3").unwrap();
        Overrides {
            fraction: Some(0.5),
            temp_left: Some(2.0),
            ..Default::default()
        }
        .apply(&mut raw);
        let s = Setup::from_raw(&raw).unwrap();
        assert_eq!(
            s.coupling,
            Coupling::Fraction {
                fraction: 0.5,
                reference_delta: None
            }
        );
        assert_eq!(s.temp_left, 2.0);
    }

    #[test]
    fn parse_errors_name_the_location() {
        let err = RawConfig::parse("[chain]\nn = 8\ndelta = \"x\"\n", "cfg.toml").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cfg.toml") && msg.contains("line 3"), "{msg}");
        let err = RawConfig::parse("[chain]\nbogus = 1\n", "cfg.toml").unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn weights_must_match_length() {
        let raw = RawConfig::parse(
            "[chain]\nn = 3\ndelta = 1.0\n[baths]\nweight_left = [1.0, 2.0]\n",
            "cfg",
        )
        .unwrap();
        assert!(matches!(Setup::from_raw(&raw), Err(CliError::Config(_))));
    }

    #[test]
    fn coupling_above_bound_is_infeasible() {
        let raw = RawConfig::parse("[chain]\nn = 4\ndelta = 1.0\ng = 5.0\n", "cfg").unwrap();
        let s = Setup::from_raw(&raw).unwrap();
        assert!(matches!(
            s.build(&s.base_point()),
            Err(CliError::Infeasible(_))
        ));
    }
}
