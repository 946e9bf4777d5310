//! Two-photon amplitude on polar transverse-wavevector grids.
//!
//! The amplitude is
//!
//! ```text
//! Phi = E_p(q_s + q_i) sinc(dk L / 2) exp(i dk L / 2)
//! dk  = k_pz - k_sz - k_iz + (q_s cos(phi_s - a) + q_i cos(phi_i - a)) tan(rho)
//! ```
//!
//! with `a` the azimuth of the walk-off direction (zero for walk-off along
//! +x). The radial integration that produces the azimuthal kernel
//! `W(phi_s, phi_i)` uses Gauss-Legendre nodes on `[q_min, q_max]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{ring_radius, CrystalConfig, Geometry, Wavevectors};
use crate::error::{Error, Result};
use crate::pump::{pump_envelope, EnvelopeMode, PumpConfig};
use crate::special::gauss_legendre;

/// Pump and daughter wavevectors plus everything needed to evaluate the
/// phase mismatch and the two-photon amplitude.
#[derive(Debug, Clone)]
pub struct TwoPhoton {
    pub crystal: CrystalConfig,
    pub pump: PumpConfig,
    pub k: Wavevectors,
    tan_rho: f64,
    /// `k_p - k_s - k_i`.
    dk_axial: f64,
}

impl TwoPhoton {
    pub fn new(crystal: &CrystalConfig, pump: &PumpConfig) -> Result<Self> {
        pump.validate()?;
        let k = crystal.sellmeier.wavevectors(crystal.theta, pump.lambda_p)?;
        Ok(Self {
            crystal: crystal.clone(),
            pump: pump.clone(),
            k,
            tan_rho: pump.walkoff.tan(),
            dk_axial: k.k_p - k.k_s - k.k_i,
        })
    }

    pub fn tan_rho(&self) -> f64 {
        self.tan_rho
    }

    /// Phase mismatch in inverse meters.
    pub fn delta_k(&self, q_s: f64, phi_s: f64, q_i: f64, phi_i: f64) -> Result<f64> {
        let q2 = pair_momentum_sq(q_s, q_i, phi_s - phi_i);
        let t_s = daughter_term(q_s, self.k.k_s)
            .ok_or_else(|| Error::Evanescent(format!("signal q = {q_s} >= k_s")))?;
        let t_i = daughter_term(q_i, self.k.k_i)
            .ok_or_else(|| Error::Evanescent(format!("idler q = {q_i} >= k_i")))?;
        let axial = self
            .axial_mismatch(q2, t_s + t_i)
            .ok_or_else(|| Error::Evanescent(format!("|q_s + q_i|^2 = {q2} >= k_p^2")))?;
        let a = self.pump.walkoff_azimuth;
        Ok(axial + (q_s * (phi_s - a).cos() + q_i * (phi_i - a).cos()) * self.tan_rho)
    }

    /// Mismatch without the walk-off term, given `|q_s + q_i|^2` and the
    /// summed daughter terms `q^2 / (k + k_z)`.
    #[inline]
    pub(crate) fn axial_mismatch(&self, q2: f64, daughters: f64) -> Option<f64> {
        let kp2 = self.k.k_p * self.k.k_p - q2;
        if kp2 <= 0.0 {
            return None;
        }
        Some(self.dk_axial - q2 / (self.k.k_p + kp2.sqrt()) + daughters)
    }

    /// Two-photon amplitude; zero where any wave is evanescent.
    pub fn amplitude(&self, q_s: f64, phi_s: f64, q_i: f64, phi_i: f64) -> Complex64 {
        let Ok(dk) = self.delta_k(q_s, phi_s, q_i, phi_i) else {
            return Complex64::new(0.0, 0.0);
        };
        let (ss, cs) = phi_s.sin_cos();
        let (si, ci) = phi_i.sin_cos();
        let env = pump_envelope(&self.pump, q_s * cs + q_i * ci, q_s * ss + q_i * si);
        env * phase_sinc(0.5 * dk * self.crystal.length)
    }
}

/// `|q_s + q_i|^2` for transverse vectors separated by `dphi`, written as
/// `(q_s - q_i)^2 + 4 q_s q_i cos^2(dphi / 2)` to stay accurate near
/// anti-parallel pairs.
#[inline]
pub fn pair_momentum_sq(q_s: f64, q_i: f64, dphi: f64) -> f64 {
    let c = (0.5 * dphi).cos();
    let d = q_s - q_i;
    d * d + 4.0 * q_s * q_i * c * c
}

/// `k - sqrt(k^2 - q^2)` in cancellation-free form.
#[inline]
pub(crate) fn daughter_term(q: f64, k: f64) -> Option<f64> {
    let kz2 = k * k - q * q;
    if kz2 <= 0.0 {
        return None;
    }
    Some(q * q / (k + kz2.sqrt()))
}

/// `sinc(x) exp(i x)` with the unnormalized `sinc(x) = sin(x) / x`.
#[inline]
pub fn phase_sinc(x: f64) -> Complex64 {
    if x.abs() < 1e-8 {
        // sin(x)/x = 1 - x^2/6 + ...; keep the first correction for continuity
        let s = 1.0 - x * x / 6.0;
        return Complex64::new(s * x.cos(), s * x.sin());
    }
    let (s, c) = x.sin_cos();
    let sinc = s / x;
    Complex64::new(sinc * c, sinc * s)
}

/// Phase mismatch for one configuration.
pub fn delta_k(
    crystal: &CrystalConfig,
    pump: &PumpConfig,
    q_s: f64,
    phi_s: f64,
    q_i: f64,
    phi_i: f64,
) -> Result<f64> {
    TwoPhoton::new(crystal, pump)?.delta_k(q_s, phi_s, q_i, phi_i)
}

/// Two-photon amplitude for one configuration, without normalization.
pub fn two_photon_amplitude(
    crystal: &CrystalConfig,
    pump: &PumpConfig,
    q_s: f64,
    phi_s: f64,
    q_i: f64,
    phi_i: f64,
) -> Result<Complex64> {
    Ok(TwoPhoton::new(crystal, pump)?.amplitude(q_s, phi_s, q_i, phi_i))
}

/// Number of radial and azimuthal nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub n_radial: usize,
    pub n_azimuthal: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            n_radial: 96,
            n_azimuthal: 128,
        }
    }
}

impl Resolution {
    /// Resolution that scales with the pump spiral bandwidth `w_p q_max`,
    /// the walk-off phase `q_max L tan(rho)` and the number of
    /// pump-envelope widths and phase-matching fringes across the radial
    /// window. Never below the default, and wide enough for an `l_max`
    /// window.
    pub fn auto(crystal: &CrystalConfig, pump: &PumpConfig, l_max: usize) -> Result<Self> {
        let (lo, hi) = emission_window(crystal, pump)?;
        let base = Self::default();
        let walk = 0.5 * hi * crystal.length * pump.walkoff.tan().abs();
        let az = (4.0 * pump.waist * hi).max(walk).ceil() as usize;
        let n_azimuthal = az.max(4 * l_max + 8).max(base.n_azimuthal).next_power_of_two();
        let radial = (0.75 * pump.waist * (hi - lo)).ceil() as usize;
        // back-to-back pairs see no walk-off, so this counts sinc fringes only
        let model = TwoPhoton::new(crystal, pump)?;
        let dk = |q: f64| model.delta_k(q, 0.0, q, PI);
        let fringes = ((dk(hi)? - dk(lo)?).abs() * crystal.length / (2.0 * PI)).ceil() as usize + 16;
        let n_radial = radial.max(fringes).max(base.n_radial).div_ceil(8) * 8;
        Ok(Self {
            n_radial,
            n_azimuthal,
        })
    }
}

/// Radial Gauss-Legendre nodes times a uniform azimuthal grid, shared by
/// signal and idler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub n_radial: usize,
    pub n_azimuthal: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub radial_nodes: Vec<f64>,
    pub radial_weights: Vec<f64>,
}

impl PolarGrid {
    pub fn new(n_radial: usize, n_azimuthal: usize, q_min: f64, q_max: f64) -> Result<Self> {
        if n_radial == 0 {
            return Err(Error::Parameter("radial grid needs at least one node".into()));
        }
        if n_azimuthal < 4 || !n_azimuthal.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "azimuthal size {n_azimuthal} must be a power of two >= 4"
            )));
        }
        if !(q_min >= 0.0 && q_max > q_min) || !q_max.is_finite() {
            return Err(Error::Parameter(format!(
                "invalid radial window [{q_min}, {q_max}]"
            )));
        }
        let (radial_nodes, radial_weights) = gauss_legendre(n_radial, q_min, q_max);
        Ok(Self {
            n_radial,
            n_azimuthal,
            q_min,
            q_max,
            radial_nodes,
            radial_weights,
        })
    }

    /// Grid over the emission window of a configuration.
    pub fn for_configuration(crystal: &CrystalConfig, pump: &PumpConfig, res: Resolution) -> Result<Self> {
        let (lo, hi) = emission_window(crystal, pump)?;
        Self::new(res.n_radial, res.n_azimuthal, lo, hi)
    }

    pub fn azimuthal_step(&self) -> f64 {
        2.0 * PI / self.n_azimuthal as f64
    }

    pub fn azimuth(&self, j: usize) -> f64 {
        self.azimuthal_step() * j as f64
    }

    pub fn resolution(&self) -> Resolution {
        Resolution {
            n_radial: self.n_radial,
            n_azimuthal: self.n_azimuthal,
        }
    }
}

/// Half-width of the radial window: the larger of the pump bandwidth and
/// three phase-matching lobes.
pub fn emission_half_width(crystal: &CrystalConfig, pump: &PumpConfig) -> f64 {
    let lambda_s = 2.0 * pump.lambda_p * 1e-6;
    let pump_width = 6.0 / pump.waist;
    let lobe = 3.0 * (4.0 * PI / (lambda_s * crystal.length)).sqrt();
    pump_width.max(lobe)
}

/// Radial window `[q_min, q_max]` covering the emission.
///
/// Collinear emission starts at the axis; non-collinear emission is an
/// annulus around the phase-matched ring radius at the configured cut.
pub fn emission_window(crystal: &CrystalConfig, pump: &PumpConfig) -> Result<(f64, f64)> {
    let half = emission_half_width(crystal, pump);
    let (lo, hi) = match crystal.geometry {
        Geometry::Collinear => (0.0, half),
        Geometry::NonCollinear => {
            let q0 = ring_radius(&crystal.sellmeier, crystal.theta, pump.lambda_p)?;
            ((q0 - half).max(0.0), q0 + half)
        }
    };
    let k = crystal.sellmeier.wavevectors(crystal.theta, pump.lambda_p)?;
    if hi >= k.k_s {
        return Err(Error::Domain(format!(
            "emission window reaches {hi} 1/m, beyond k_s = {}",
            k.k_s
        )));
    }
    Ok((lo, hi))
}

/// Azimuthal kernel `W(phi_s, phi_i)` after radial integration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiphotonField {
    /// Row-major `n_azimuthal x n_azimuthal`, indexed `[j_s * n + j_i]`.
    pub kernel: Vec<Complex64>,
    pub grid: PolarGrid,
    /// `sum |W|^2 (2 pi / n)^2`.
    pub norm: f64,
    /// OAM carried by the pump, the conserved total.
    pub pump_oam: i32,
}

impl BiphotonField {
    pub fn n(&self) -> usize {
        self.grid.n_azimuthal
    }

    pub fn at(&self, j_s: usize, j_i: usize) -> Complex64 {
        self.kernel[j_s * self.n() + j_i]
    }

    pub fn max_abs(&self) -> f64 {
        self.kernel.iter().map(|w| w.norm()).fold(0.0, f64::max)
    }
}

/// One signal/idler radial node pair and the range of azimuthal offsets
/// where the pump envelope is non-negligible.
#[derive(Debug, Clone, Copy)]
struct NodePair {
    a: usize,
    b: usize,
    /// `(q_a - q_b)^2`
    base: f64,
    /// `q_a q_b`
    qq: f64,
    /// Offsets `d = j_s - j_i (mod n)` run over `d_lo..=d_hi`.
    d_lo: usize,
    d_hi: usize,
}

/// Tabulated evaluation of the amplitude on a polar grid.
///
/// The visiting order is fixed (radial pairs, then offsets), so any
/// reduction over it is deterministic regardless of threading.
pub(crate) struct GridEvaluator<'a> {
    model: &'a TwoPhoton,
    grid: &'a PolarGrid,
    pairs: Vec<NodePair>,
    /// `q^2 / (k + k_z)` per radial node, `None` when evanescent.
    daughter: Vec<Option<f64>>,
    /// `cos^2(pi d / n)`, symmetric in `d <-> n - d`.
    half_cos_sq: Vec<f64>,
    cos_phi: Vec<f64>,
    sin_phi: Vec<f64>,
    /// `cos(phi_j - walkoff_azimuth)`.
    walk_cos: Vec<f64>,
    cutoff: Option<f64>,
    plain_gaussian: bool,
}

impl<'a> GridEvaluator<'a> {
    pub(crate) fn new(model: &'a TwoPhoton, grid: &'a PolarGrid) -> Self {
        let n = grid.n_azimuthal;
        let pump = &model.pump;
        let w2 = pump.waist * pump.waist;
        let cutoff = pump.exponent_cutoff();
        let q = &grid.radial_nodes;
        let daughter: Vec<Option<f64>> = q.iter().map(|&q| daughter_term(q, model.k.k_s)).collect();
        let half_cos_sq: Vec<f64> = (0..n)
            .map(|d| {
                let d = d.min(n - d);
                let c = (PI * d as f64 / n as f64).cos();
                c * c
            })
            .collect();
        let step = grid.azimuthal_step();
        let cos_phi = (0..n).map(|j| (step * j as f64).cos()).collect();
        let sin_phi = (0..n).map(|j| (step * j as f64).sin()).collect();
        let walk_cos = (0..n)
            .map(|j| (step * j as f64 - pump.walkoff_azimuth).cos())
            .collect();

        let mut pairs = Vec::new();
        for a in 0..grid.n_radial {
            for b in 0..grid.n_radial {
                if daughter[a].is_none() || daughter[b].is_none() {
                    continue;
                }
                let diff = q[a] - q[b];
                let base = diff * diff;
                let qq = q[a] * q[b];
                let (d_lo, d_hi) = match cutoff {
                    None => (0, n - 1),
                    Some(g) => {
                        let budget = 4.0 * g / w2 - base;
                        if budget < 0.0 {
                            continue;
                        }
                        let cmax = if qq > 0.0 { budget / (4.0 * qq) } else { f64::INFINITY };
                        if cmax >= 1.0 {
                            (0, n - 1)
                        } else {
                            // |cos(pi d / n)| <= sqrt(cmax) around d = n / 2
                            let edge = cmax.sqrt().acos() * n as f64 / PI;
                            let lo = (edge.floor() as usize).saturating_sub(1);
                            let hi = ((n as f64 - edge).ceil() as usize + 1).min(n - 1);
                            (lo, hi.max(lo))
                        }
                    }
                };
                pairs.push(NodePair {
                    a,
                    b,
                    base,
                    qq,
                    d_lo,
                    d_hi,
                });
            }
        }
        let plain_gaussian = pump.envelope == EnvelopeMode::Isotropic
            && pump.oam == 0
            && pump.astigmatism == 0.0;
        Self {
            model,
            grid,
            pairs,
            daughter,
            half_cos_sq,
            cos_phi,
            sin_phi,
            walk_cos,
            cutoff,
            plain_gaussian,
        }
    }

    /// Calls `f(a, b, j_i, Phi)` for every non-negligible amplitude with
    /// signal azimuth index `j_s`.
    #[inline]
    pub(crate) fn visit_row<F: FnMut(usize, usize, usize, Complex64)>(&self, j_s: usize, mut f: F) {
        let n = self.grid.n_azimuthal;
        let q = &self.grid.radial_nodes;
        let pump = &self.model.pump;
        let w2 = pump.waist * pump.waist;
        let half_l = 0.5 * self.model.crystal.length;
        let tan_rho = self.model.tan_rho;
        for p in &self.pairs {
            let (qa, qb) = (q[p.a], q[p.b]);
            let daughters = self.daughter[p.a].unwrap_or(0.0) + self.daughter[p.b].unwrap_or(0.0);
            for d in p.d_lo..=p.d_hi {
                let q2 = p.base + 4.0 * p.qq * self.half_cos_sq[d];
                if let Some(g) = self.cutoff {
                    if 0.25 * w2 * q2 > g {
                        continue;
                    }
                }
                let Some(axial) = self.model.axial_mismatch(q2, daughters) else {
                    continue;
                };
                let j_i = (j_s + n - d) % n;
                let dk = axial + (qa * self.walk_cos[j_s] + qb * self.walk_cos[j_i]) * tan_rho;
                let env = if self.plain_gaussian {
                    Complex64::new((-0.25 * w2 * q2).exp(), 0.0)
                } else {
                    let qx = qa * self.cos_phi[j_s] + qb * self.cos_phi[j_i];
                    let qy = qa * self.sin_phi[j_s] + qb * self.sin_phi[j_i];
                    pump_envelope(pump, qx, qy)
                };
                f(p.a, p.b, j_i, env * phase_sinc(dk * half_l));
            }
        }
    }
}

/// Radially integrated kernel `W[j_s, j_i] = sum_ab w_a q_a w_b q_b Phi`.
pub fn azimuthal_kernel(crystal: &CrystalConfig, pump: &PumpConfig, grid: &PolarGrid) -> Result<BiphotonField> {
    let model = TwoPhoton::new(crystal, pump)?;
    kernel_for_model(&model, grid)
}

pub(crate) fn kernel_for_model(model: &TwoPhoton, grid: &PolarGrid) -> Result<BiphotonField> {
    let n = grid.n_azimuthal;
    let eval = GridEvaluator::new(model, grid);
    let wq: Vec<f64> = grid
        .radial_nodes
        .iter()
        .zip(&grid.radial_weights)
        .map(|(q, w)| q * w)
        .collect();
    let mut kernel = vec![Complex64::new(0.0, 0.0); n * n];
    kernel.par_chunks_mut(n).enumerate().for_each(|(j_s, row)| {
        eval.visit_row(j_s, |a, b, j_i, phi| {
            row[j_i] += phi * (wq[a] * wq[b]);
        });
    });
    if kernel.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
        return Err(Error::DegenerateConfiguration("non-finite kernel entry".into()));
    }
    let step = grid.azimuthal_step();
    let norm = kernel.iter().map(|w| w.norm_sqr()).sum::<f64>() * step * step;
    if !(norm > 0.0) {
        return Err(Error::DegenerateConfiguration(
            "two-photon amplitude vanishes on the whole grid".into(),
        ));
    }
    Ok(BiphotonField {
        kernel,
        grid: grid.clone(),
        norm,
        pump_oam: model.pump.oam,
    })
}
