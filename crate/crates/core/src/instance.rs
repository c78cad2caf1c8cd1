//! Instance files: a labeled permutation pair, a Rauzy loop and optional
//! cocycle, Maharam parameters, depth and seed.
//!
//! ```json
//! { "name": "d3", "top": [1, 2, 3], "bottom": [3, 2, 1], "loop": "tbtbtb",
//!   "phi": [[1], [0], [0]], "psi": [[0.5]], "grid": ["-1:1:9"],
//!   "level": 4, "seed": 7 }
//! ```
//!
//! Only `top`, `bottom` and `loop` are required. Orderings are 1-based and
//! read left to right; `phi` has one row per interval. Without `phi` the first
//! eigencocycle basis vector is used (`m = 1`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bratteli::{build_diagram, Diagram};
use crate::error::{Error, Result};
use crate::iet::{compose_loop, IetCombinatorics, Move, RauzyLoop, TowerSystem};
use crate::skew::{check_periodic_type, eigencocycles, Eigencocycles, SkewCocycle};

pub const DEFAULT_LEVEL: usize = 5;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
    /// Moves as a string of `t` / `b`.
    #[serde(rename = "loop")]
    pub steps: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<Vec<f64>>>,
    /// `min:max:steps`, one entry per fiber coordinate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl InstanceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Instance(format!("line {} column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Instance(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Instance(msg) => Error::Instance(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

/// Parse `min:max:steps` into `steps` evenly spaced values.
pub fn parse_grid_axis(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Instance(format!("grid axis {s:?} is not min:max:steps"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

/// A validated instance. The loop is the smallest power of the given loop
/// with a strictly positive matrix.
#[derive(Clone, Debug)]
pub struct RauzyInstance {
    pub name: String,
    pub given: RauzyLoop,
    pub repetitions: u32,
    pub lp: RauzyLoop,
    pub towers: TowerSystem,
    pub eigen: Eigencocycles,
    /// `None` when the loop matrix has no integer eigencocycle.
    pub phi: Option<SkewCocycle>,
    pub psi: Vec<Vec<f64>>,
    pub grid: Option<Vec<String>>,
    pub level: usize,
    pub seed: u64,
}

impl RauzyInstance {
    pub fn from_spec(spec: &InstanceSpec) -> Result<Self> {
        let start = IetCombinatorics::from_one_based(&spec.top, &spec.bottom)?;
        let steps = spec
            .steps
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(Move::from_letter)
            .collect::<Result<Vec<_>>>()?;
        if steps.is_empty() {
            return Err(Error::Instance(
                "empty loop has matrix I, which is not positive; give a loop whose power is positive"
                    .into(),
            ));
        }
        let given = RauzyLoop::new(start, steps)?;
        let repetitions = given.positivity_exponent().map_err(|e| {
            Error::Instance(format!(
                "{e}; the loop matrix is not primitive, so no power is positive (amplification tries up to 2d^2 repetitions)"
            ))
        })?;
        let lp = given.repeated(repetitions as usize);
        let a = lp.matrix();
        let eigen = eigencocycles(&a)?;
        let phi = match &spec.phi {
            Some(rows) => {
                if rows.len() != lp.d() {
                    return Err(Error::DimensionMismatch {
                        expected: lp.d(),
                        found: rows.len(),
                    });
                }
                let phi = SkewCocycle::from_rows(rows)?;
                if !check_periodic_type(&a, &phi) {
                    return Err(Error::InvalidCocycle(
                        "phi is not fixed by the transposed loop matrix".into(),
                    ));
                }
                Some(phi)
            }
            None => eigen.cocycle_from(1),
        };
        let m = phi.as_ref().map_or(0, SkewCocycle::m);
        let psi = spec.psi.clone().unwrap_or_else(|| vec![vec![0.0; m.max(1)]]);
        if let Some(bad) = psi.iter().find(|p| p.len() != m) {
            if m > 0 {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: bad.len(),
                });
            }
        }
        if let Some(grid) = &spec.grid {
            if grid.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: grid.len(),
                });
            }
            for axis in grid {
                parse_grid_axis(axis)?;
            }
        }
        Ok(Self {
            name: spec.name.clone().unwrap_or_else(|| "instance".into()),
            towers: compose_loop(&lp, 1)?,
            given,
            repetitions,
            lp,
            eigen,
            phi,
            psi,
            grid: spec.grid.clone(),
            level: spec.level.unwrap_or(DEFAULT_LEVEL),
            seed: spec.seed.unwrap_or(DEFAULT_SEED),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_spec(&InstanceSpec::load(path)?)
    }

    pub fn d(&self) -> usize {
        self.lp.d()
    }

    pub fn diagram(&self) -> Diagram {
        build_diagram(&self.towers)
    }

    /// The cocycle, or an error for loops without one.
    pub fn require_phi(&self) -> Result<&SkewCocycle> {
        self.phi
            .as_ref()
            .ok_or_else(|| Error::InvalidCocycle("no periodic-type skew-product on this loop".into()))
    }
}

/// Instances shipped with the crate, as `(name, json)`.
pub const PACKAGED: [(&str, &str); 3] = [
    ("d3", include_str!("../instances/d3.json")),
    ("d4", include_str!("../instances/d4.json")),
    ("d5", include_str!("../instances/d5.json")),
];

pub fn packaged() -> Vec<RauzyInstance> {
    PACKAGED
        .iter()
        .map(|(name, text)| {
            let spec = InstanceSpec::from_json(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            RauzyInstance::from_spec(&spec).unwrap_or_else(|e| panic!("{name}: {e}"))
        })
        .collect()
}
