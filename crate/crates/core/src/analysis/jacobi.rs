//! Sideband probabilities from the Bessel expansion of the walk-off phase.
//!
//! Writing `sinc(dk L / 2) exp(i dk L / 2)` as `(1/L) int_0^L exp(i dk z) dz`
//! and expanding
//!
//! ```text
//! exp(i q z tan(rho) cos(phi)) = sum_m i^m J_m(q z tan(rho)) exp(i m phi)
//! ```
//!
//! for signal and idler separately, the terms with `m_s + m_i = n` are the
//! only ones that survive a projection onto total OAM `n`. What remains
//! depends on `u = phi_s - phi_i` alone:
//!
//! ```text
//! f_n(u) = sum_ab w_a q_a w_b q_b E(Q) (1/L) int dz exp(i dk0 z)
//!          sum_m exp(i m u) J_m(q_a z t) J_{n-m}(q_b z t)
//! ```
//!
//! and `P(n)` is proportional to `int |f_n(u)|^2 du`. It is normalized over
//! the orders `|n'| <= max(|n| + 2, 3)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::GridSpec;
use crate::biphoton::{daughter_term, emission_window, pair_momentum_sq, TwoPhoton};
use crate::dispersion::CrystalConfig;
use crate::error::{Error, Result};
use crate::pump::{EnvelopeMode, PumpConfig};
use crate::special::{bessel_j_upto, gauss_legendre};

const Z_NODES: usize = 48;

/// Largest `L tan(rho) / w_p` the expansion is trusted for.
pub const MAX_PERTURBATION: f64 = 0.3;

/// Bessel truncation that covers the largest argument `q_max L tan(rho)`
/// on the emission window, with room for sideband `n`.
pub fn bessel_truncation(crystal: &CrystalConfig, pump: &PumpConfig, n: i32) -> Result<usize> {
    let (_, q_max) = emission_window(crystal, pump)?;
    let x = q_max * crystal.length * pump.walkoff.tan().abs();
    Ok((x + 4.0 * x.cbrt() + 10.0).ceil() as usize + n.unsigned_abs() as usize)
}

pub fn jacobi_anger_sideband(
    crystal: &CrystalConfig,
    pump: &PumpConfig,
    n: i32,
    max_bessel_order: usize,
    grid: GridSpec,
) -> Result<f64> {
    if (n.unsigned_abs() as usize) > max_bessel_order {
        return Err(Error::Parameter(format!(
            "Bessel truncation {max_bessel_order} cannot reach sideband {n}"
        )));
    }
    if pump.oam != 0 || pump.astigmatism != 0.0 || pump.envelope != EnvelopeMode::Isotropic {
        return Err(Error::Parameter(
            "the expansion needs a rotationally symmetric Gaussian pump (l_p = 0, no astigmatism, isotropic envelope)"
                .into(),
        ));
    }
    let t = pump.walkoff.tan().abs();
    let strength = crystal.length * t / pump.waist;
    if strength >= MAX_PERTURBATION {
        return Err(Error::Parameter(format!(
            "L tan(rho) / w_p = {strength:.3} is outside the perturbative range (< {MAX_PERTURBATION})"
        )));
    }
    let model = TwoPhoton::new(crystal, pump)?;
    let g = grid.grid(crystal, pump, 0)?;
    let q = &g.radial_nodes;
    let nr = g.n_radial;
    let nu = g.n_azimuthal;
    let m_max = max_bessel_order as i32;
    let k_orders = (n.abs() + 2).max(3);
    let n_orders = (2 * k_orders + 1) as usize;

    let length = crystal.length;
    let (z, wz) = gauss_legendre(Z_NODES, 0.0, length);
    let wz: Vec<f64> = wz.iter().map(|w| w / length).collect();
    // bessel[a][k][m + m_max] = J_m(q_a z_k t)
    let width = (2 * m_max + 1) as usize;
    let bessel: Vec<Vec<Vec<f64>>> = q
        .iter()
        .map(|&qa| {
            z.iter()
                .map(|&zk| {
                    let pos = bessel_j_upto(max_bessel_order, qa * zk * t);
                    let mut row = vec![0.0; width];
                    for m in -m_max..=m_max {
                        let j = pos[m.unsigned_abs() as usize];
                        row[(m + m_max) as usize] = if m < 0 && m % 2 != 0 { -j } else { j };
                    }
                    row
                })
                .collect()
        })
        .collect();
    let daughter: Vec<Option<f64>> = q.iter().map(|&v| daughter_term(v, model.k.k_s)).collect();
    let wq: Vec<f64> = q.iter().zip(&g.radial_weights).map(|(q, w)| q * w).collect();
    let w2 = pump.waist * pump.waist;
    let cutoff = pump.exponent_cutoff().unwrap_or(f64::INFINITY);

    let rows: Vec<Vec<Complex64>> = (0..nu)
        .into_par_iter()
        .map(|j| {
            let u = 2.0 * PI * j as f64 / nu as f64;
            let phase: Vec<Complex64> = (-m_max..=m_max)
                .map(|m| Complex64::from_polar(1.0, m as f64 * u))
                .collect();
            let mut f = vec![Complex64::new(0.0, 0.0); n_orders];
            let mut inner = vec![Complex64::new(0.0, 0.0); n_orders];
            for a in 0..nr {
                let Some(da) = daughter[a] else { continue };
                for b in 0..nr {
                    let Some(db) = daughter[b] else { continue };
                    let q2 = pair_momentum_sq(q[a], q[b], u);
                    let expo = 0.25 * w2 * q2;
                    if expo > cutoff {
                        continue;
                    }
                    let Some(dk0) = model.axial_mismatch(q2, da + db) else {
                        continue;
                    };
                    let amp = wq[a] * wq[b] * (-expo).exp();
                    for (k, &zk) in z.iter().enumerate() {
                        let c = Complex64::from_polar(amp * wz[k], dk0 * zk);
                        let (ja, jb) = (&bessel[a][k], &bessel[b][k]);
                        inner.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                        for m in -m_max..=m_max {
                            let em = phase[(m + m_max) as usize] * ja[(m + m_max) as usize];
                            for (o, slot) in inner.iter_mut().enumerate() {
                                let order = o as i32 - k_orders;
                                let mi = order - m;
                                if mi.abs() <= m_max {
                                    *slot += em * jb[(mi + m_max) as usize];
                                }
                            }
                        }
                        for (acc, v) in f.iter_mut().zip(&inner) {
                            *acc += c * v;
                        }
                    }
                }
            }
            f
        })
        .collect();

    let power: Vec<f64> = (0..n_orders)
        .map(|o| rows.iter().map(|r| r[o].norm_sqr()).sum())
        .collect();
    let total: f64 = power.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegenerateConfiguration("expansion carries no power".into()));
    }
    Ok(power[(n + k_orders) as usize] / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biphoton::Resolution;
    use crate::dispersion::{phase_match_angle, Geometry, SellmeierModel};

    fn crystal() -> CrystalConfig {
        let m = SellmeierModel::bbo();
        let theta = phase_match_angle(&m, 0.355, 0.0).unwrap();
        CrystalConfig::new(m, theta, 1e-3, Geometry::Collinear).unwrap()
    }

    fn coarse() -> GridSpec {
        GridSpec::Fixed(Resolution {
            n_radial: 24,
            n_azimuthal: 64,
        })
    }

    #[test]
    fn no_walkoff_keeps_everything_in_order_zero() {
        let p = PumpConfig::gaussian(0.355, 50e-6);
        let p0 = jacobi_anger_sideband(&crystal(), &p, 0, 0, coarse()).unwrap();
        assert!((p0 - 1.0).abs() < 1e-14);
        let p1 = jacobi_anger_sideband(&crystal(), &p, 1, 4, coarse()).unwrap();
        assert!(p1 < 1e-28);
    }

    #[test]
    fn first_sideband_is_quadratic_in_tan_rho() {
        let c = crystal();
        let at = |deg: f64| {
            let p = PumpConfig::gaussian(0.355, 50e-6).with_walkoff(deg.to_radians());
            jacobi_anger_sideband(&c, &p, 1, 8, coarse()).unwrap()
        };
        let (a, b) = (at(0.05), at(0.1));
        let ratio = b / a;
        let expect = (0.1f64.to_radians().tan() / 0.05f64.to_radians().tan()).powi(2);
        assert!((ratio / expect - 1.0).abs() < 1e-2, "ratio {ratio} vs {expect}");
        // mirror
        let m = jacobi_anger_sideband(
            &c,
            &PumpConfig::gaussian(0.355, 50e-6).with_walkoff(0.1f64.to_radians()),
            -1,
            8,
            coarse(),
        )
        .unwrap();
        assert!((m / b - 1.0).abs() < 1e-10);
    }

    #[test]
    fn chosen_truncation_is_converged() {
        let c = crystal();
        let p = PumpConfig::gaussian(0.355, 50e-6).with_walkoff(0.5f64.to_radians());
        let m = bessel_truncation(&c, &p, 1).unwrap();
        let a = jacobi_anger_sideband(&c, &p, 1, m, coarse()).unwrap();
        let b = jacobi_anger_sideband(&c, &p, 1, m + 8, coarse()).unwrap();
        assert!((a / b - 1.0).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn preconditions() {
        let c = crystal();
        let p = PumpConfig::gaussian(0.355, 50e-6).with_walkoff(0.01);
        assert!(matches!(jacobi_anger_sideband(&c, &p, 3, 2, coarse()), Err(Error::Parameter(_))));
        assert!(jacobi_anger_sideband(&c, &p.clone().with_oam(1), 1, 4, coarse()).is_err());
        assert!(jacobi_anger_sideband(&c, &p.clone().with_astigmatism(1.0), 1, 4, coarse()).is_err());
        let strong = PumpConfig::gaussian(0.355, 50e-6).with_walkoff(0.1);
        assert!(jacobi_anger_sideband(&c, &strong, 1, 4, coarse()).is_err());
    }
}
