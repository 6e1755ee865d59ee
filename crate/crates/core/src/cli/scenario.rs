//! Scenario files: one JSON document per run.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::angular::{builtin, HarmonicPotential, PotentialPair};
use crate::estimates::dispersive::ScaledGrid;
use crate::propagator::Flavor;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Builtin(String),
    Harmonic(HarmonicPotential),
}

impl PotentialSpec {
    pub fn resolve(&self, n: usize) -> Result<PotentialPair> {
        match self {
            PotentialSpec::Builtin(name) => builtin(name, n),
            PotentialSpec::Harmonic(h) => PotentialPair::from_harmonic(n, h),
        }
    }
}

/// Grids shared by the kernel dumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    /// Radial panels for Hankel-based scans.
    #[serde(default = "default_r_panels")]
    pub r_panels: usize,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    /// Angle nodes in `[0, π]` for kernel dumps.
    pub angles: usize,
    /// Radii for kernel dumps (both `r₁` and `r₂`).
    pub radii: Vec<f64>,
    pub times: Vec<f64>,
}

fn default_r_panels() -> usize {
    96
}

fn default_r_max() -> f64 {
    40.0
}

fn default_heat_c() -> f64 {
    8.0
}

fn default_samples() -> usize {
    100
}

fn default_n_max() -> f64 {
    8.0
}

fn default_eps_per_decade() -> usize {
    4
}

fn default_pair_count() -> usize {
    9
}

fn default_flavor() -> Flavor {
    Flavor::Schrodinger
}

/// Per-scan parameters. `cutoff` overrides the scenario mode cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScanSpec {
    FreeKernelOracle {
        times: Vec<f64>,
        #[serde(default)]
        grid: Option<ScaledGrid>,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    PathEquivalence {
        #[serde(default = "default_samples")]
        samples: usize,
        times: Vec<f64>,
        r_min: f64,
        r_max: f64,
        #[serde(default = "default_flavor")]
        flavor: Flavor,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    DispersiveSmall {
        times: Vec<f64>,
        zs: Vec<f64>,
        angles: Vec<f64>,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    DispersiveLocalized {
        times: Vec<f64>,
        zs: Vec<f64>,
        angles: Vec<f64>,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    AntipodalContrast {
        times: Vec<f64>,
        zs: Vec<f64>,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    HeatBound {
        times: Vec<f64>,
        #[serde(default)]
        grid: Option<ScaledGrid>,
        #[serde(default)]
        small_zs: Vec<f64>,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    ModeSum {
        zs: Vec<f64>,
        angles: Vec<f64>,
        #[serde(default = "default_n_max")]
        n_max: f64,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    HankelL2 {
        nus: Vec<f64>,
        times: Vec<f64>,
    },
    Strichartz {
        /// Use `"inf"` for an infinite exponent.
        q: Exponent,
        p: Exponent,
        #[serde(default)]
        mode: usize,
        #[serde(default)]
        t_min: Option<f64>,
        #[serde(default)]
        t_max: Option<f64>,
        #[serde(default)]
        panels_per_decade: Option<usize>,
    },
    Counterexample {
        q: Exponent,
        p: Exponent,
        #[serde(default = "default_eps_per_decade")]
        eps_per_decade: usize,
    },
    Tnu {
        nu: f64,
        p: f64,
        times: Vec<f64>,
    },
    Pairs {
        s: Vec<f64>,
        #[serde(default = "default_pair_count")]
        count: usize,
    },
}

impl ScanSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ScanSpec::FreeKernelOracle { .. } => "free_kernel_oracle",
            ScanSpec::PathEquivalence { .. } => "path_equivalence",
            ScanSpec::DispersiveSmall { .. } => "dispersive_small",
            ScanSpec::DispersiveLocalized { .. } => "dispersive_localized",
            ScanSpec::AntipodalContrast { .. } => "antipodal_contrast",
            ScanSpec::HeatBound { .. } => "heat_bound",
            ScanSpec::ModeSum { .. } => "mode_sum",
            ScanSpec::HankelL2 { .. } => "hankel_l2",
            ScanSpec::Strichartz { .. } => "strichartz",
            ScanSpec::Counterexample { .. } => "counterexample",
            ScanSpec::Tnu { .. } => "tnu",
            ScanSpec::Pairs { .. } => "pairs",
        }
    }

    pub fn cutoff(&self) -> Option<usize> {
        match self {
            ScanSpec::FreeKernelOracle { cutoff, .. }
            | ScanSpec::PathEquivalence { cutoff, .. }
            | ScanSpec::DispersiveSmall { cutoff, .. }
            | ScanSpec::DispersiveLocalized { cutoff, .. }
            | ScanSpec::AntipodalContrast { cutoff, .. }
            | ScanSpec::HeatBound { cutoff, .. }
            | ScanSpec::ModeSum { cutoff, .. } => *cutoff,
            _ => None,
        }
    }

    /// Whether the scan doubles its cutoff internally.
    fn doubles(&self) -> bool {
        matches!(
            self,
            ScanSpec::DispersiveSmall { .. } | ScanSpec::DispersiveLocalized { .. } | ScanSpec::HeatBound { .. }
        )
    }

    fn numbers(&self) -> Vec<(&'static str, f64)> {
        let mut out = Vec::new();
        let mut push = |name: &'static str, xs: &[f64]| out.extend(xs.iter().map(|&x| (name, x)));
        match self {
            ScanSpec::FreeKernelOracle { times, .. } => push("times", times),
            ScanSpec::PathEquivalence { times, r_min, r_max, .. } => {
                push("times", &times.iter().map(|t| t.abs()).collect::<Vec<_>>());
                push("r_min", &[*r_min]);
                push("r_max", &[*r_max]);
            }
            ScanSpec::DispersiveSmall { times, zs, .. } | ScanSpec::DispersiveLocalized { times, zs, .. } => {
                push("times", &times.iter().map(|t| t.abs()).collect::<Vec<_>>());
                push("zs", zs);
            }
            ScanSpec::AntipodalContrast { times, zs, .. } => {
                push("times", &times.iter().map(|t| t.abs()).collect::<Vec<_>>());
                push("zs", zs);
            }
            ScanSpec::HeatBound { times, small_zs, .. } => {
                push("times", times);
                push("small_zs", small_zs);
            }
            ScanSpec::ModeSum { zs, n_max, .. } => {
                push("zs", zs);
                push("n_max", &[*n_max]);
            }
            ScanSpec::HankelL2 { nus, times } => {
                push("nus", nus);
                push("times", &times.iter().map(|t| t.abs()).collect::<Vec<_>>());
            }
            ScanSpec::Strichartz {
                q,
                p,
                t_min,
                t_max,
                panels_per_decade,
                ..
            } => {
                push("q", &[q.0]);
                push("p", &[p.0]);
                push("t_min", &t_min.iter().copied().collect::<Vec<_>>());
                push("t_max", &t_max.iter().copied().collect::<Vec<_>>());
                push("panels_per_decade", &panels_per_decade.iter().map(|&k| k as f64).collect::<Vec<_>>());
            }
            ScanSpec::Counterexample { q, p, .. } => {
                push("q", &[q.0]);
                push("p", &[p.0]);
            }
            ScanSpec::Tnu { nu, p, times } => {
                push("nu", &[*nu]);
                push("p", &[*p]);
                push("times", times);
            }
            ScanSpec::Pairs { .. } => {}
        }
        out
    }
}

/// A Lebesgue exponent; accepts a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serde_util::serialize_extended(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Exponent(x)),
            Raw::Text(s) if s == "inf" || s == "infinity" => Ok(Exponent(f64::INFINITY)),
            Raw::Text(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got \"{s}\""))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub n: usize,
    pub potential: PotentialSpec,
    /// Galerkin degree (or closed-form degree on the circle).
    pub basis_size: usize,
    /// Default mode cutoff `K` for kernel sums.
    pub cutoff: usize,
    /// Modes to compute; defaults to twice the largest cutoff any scan uses.
    #[serde(default)]
    pub modes: Option<usize>,
    pub grids: Grids,
    #[serde(default)]
    pub scans: Vec<ScanSpec>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Constant `c` in the heat bound `e^{−|x−y|²/(ct)}`.
    #[serde(default = "default_heat_c")]
    pub heat_c: f64,
}

/// Config problem found after the JSON parsed; `field` locates it.
#[derive(Debug, Clone, PartialEq)]
pub struct Invalid {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> Invalid {
    Invalid {
        field: field.into(),
        message: message.into(),
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Largest mode cutoff any part of the run asks for.
    pub fn max_cutoff(&self) -> usize {
        let mut k = self.cutoff;
        for s in &self.scans {
            let c = s.cutoff().unwrap_or(self.cutoff);
            k = k.max(if s.doubles() { c.saturating_mul(2) } else { c });
        }
        k
    }

    pub fn mode_count(&self) -> usize {
        self.modes.unwrap_or_else(|| self.max_cutoff().saturating_mul(2))
    }

    pub fn validate(&self) -> std::result::Result<(), Invalid> {
        if self.name.trim().is_empty() {
            return Err(invalid("name", "must not be empty"));
        }
        if self.n != 2 && self.n != 3 {
            return Err(invalid("n", format!("must be 2 (validation) or 3, got {}", self.n)));
        }
        if let PotentialSpec::Builtin(name) = &self.potential {
            let head = name.split(':').next().unwrap_or("").trim();
            if !crate::angular::list_builtins()
                .iter()
                .any(|(b, _)| b.split(':').next() == Some(head))
            {
                return Err(invalid("potential.builtin", format!("unknown built-in '{name}'")));
            }
        }
        for (field, v) in [("basis_size", self.basis_size), ("cutoff", self.cutoff), ("grids.r_panels", self.grids.r_panels), ("grids.angles", self.grids.angles)] {
            if v == 0 {
                return Err(invalid(field, "must be positive"));
            }
        }
        if self.modes == Some(0) {
            return Err(invalid("modes", "must be positive"));
        }
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, format!("must be positive and finite, got {v}")))
            }
        };
        positive("grids.r_max", self.grids.r_max)?;
        positive("heat_c", self.heat_c)?;
        for &r in &self.grids.radii {
            positive("grids.radii", r)?;
        }
        for &t in &self.grids.times {
            positive("grids.times", t.abs())?;
        }
        for (i, scan) in self.scans.iter().enumerate() {
            if scan.cutoff() == Some(0) {
                return Err(invalid(format!("scans[{i}].cutoff"), "must be positive"));
            }
            for (name, v) in scan.numbers() {
                if !(v > 0.0) {
                    return Err(invalid(format!("scans[{i}].{name}"), format!("must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }
}
