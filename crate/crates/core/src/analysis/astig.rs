use serde::{Deserialize, Serialize};

use super::{sideband_probabilities, spectrum, GridSpec};
use crate::dispersion::CrystalConfig;
use crate::error::{Error, Result};
use crate::oam::DEFAULT_L_MAX;
use crate::pump::PumpConfig;

pub const DEFAULT_BETA_RANGE: (f64, f64) = (-10.0, 10.0);
pub const DEFAULT_BETA_TOLERANCE: f64 = 1e-3;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// `P(-3) + P(-1) + P(1) + P(3)`.
    OddSidebands,
    /// `f_leak`.
    TotalLeak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AstigmatismResult {
    pub objective: Objective,
    pub beta: f64,
    pub objective_at_zero: f64,
    pub objective_at_beta: f64,
    /// `P(n)`, `n = -3..=3`, without and with the correction.
    pub before: [f64; 7],
    pub after: [f64; 7],
    /// The minimum sits on the edge of the search range.
    pub boundary: bool,
    pub evaluations: usize,
}

struct Eval {
    value: f64,
    sidebands: [f64; 7],
}

/// Golden-section search for the astigmatism `beta` minimizing the
/// objective. If nothing beats `beta = 0` it is returned unchanged.
pub fn optimize_astigmatism(
    crystal: &CrystalConfig,
    pump: &PumpConfig,
    beta_range: (f64, f64),
    objective: Objective,
    grid: GridSpec,
    tolerance: f64,
) -> Result<AstigmatismResult> {
    let (lo, hi) = beta_range;
    if !(hi > 0.0) || (lo + hi).abs() > 1e-12 * hi {
        return Err(Error::Parameter(format!(
            "astigmatism range [{lo}, {hi}] must be symmetric about zero"
        )));
    }
    if !(tolerance > 0.0) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    let l_max = DEFAULT_L_MAX;
    let resolution = grid.resolve(crystal, pump, l_max)?;
    let mut evaluations = 0;
    let mut eval = |beta: f64| -> Result<Eval> {
        evaluations += 1;
        let p = pump.clone().with_astigmatism(beta);
        let s = spectrum(crystal, &p, GridSpec::Fixed(resolution), l_max)?;
        let sidebands = sideband_probabilities(&s);
        let value = match objective {
            Objective::OddSidebands => sidebands[0] + sidebands[2] + sidebands[4] + sidebands[6],
            Objective::TotalLeak => s.f_leak(),
        };
        Ok(Eval { value, sidebands })
    };

    let zero = eval(0.0)?;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    while b - a > tolerance {
        if fc.value < fd.value {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        }
    }
    let (mut beta, mut best) = if fc.value < fd.value { (c, fc) } else { (d, fd) };
    if !(best.value < zero.value) {
        beta = 0.0;
        best = Eval {
            value: zero.value,
            sidebands: zero.sidebands,
        };
    }
    let boundary = beta != 0.0 && (beta - lo < tolerance || hi - beta < tolerance);
    Ok(AstigmatismResult {
        objective,
        beta,
        objective_at_zero: zero.value,
        objective_at_beta: best.value,
        before: zero.sidebands,
        after: best.sidebands,
        boundary,
        evaluations,
    })
}
