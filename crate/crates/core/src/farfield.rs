//! Far-field intensity of the signal arm, marginalized over the idler.
//!
//! With the walk-off phase `+q_x tan(rho) z` a positive `rho` moves the pump
//! towards `-x` as it propagates, and the emission centroid follows it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biphoton::{GridEvaluator, PolarGrid, TwoPhoton};
use crate::dispersion::CrystalConfig;
use crate::error::{Error, Result};
use crate::pump::PumpConfig;

/// Peak-normalized signal intensity on the polar grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityMap {
    pub radial_nodes: Vec<f64>,
    pub n_azimuthal: usize,
    /// Row-major `[a * n_azimuthal + j]` over radial node `a` and azimuth `j`.
    pub values: Vec<f64>,
    /// `(q, phi)` of the brightest grid point.
    pub peak: (f64, f64),
    /// Intensity-weighted mean of `(q cos phi, q sin phi)` in units of `1 / w_p`.
    pub centroid: (f64, f64),
    pub waist: f64,
}

impl IntensityMap {
    pub fn at(&self, a: usize, j: usize) -> f64 {
        self.values[a * self.n_azimuthal + j]
    }

    pub fn azimuth(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * j as f64 / self.n_azimuthal as f64
    }

    /// Azimuthal average at each radial node.
    pub fn radial_profile(&self) -> Vec<f64> {
        self.values
            .chunks(self.n_azimuthal)
            .map(|r| r.iter().sum::<f64>() / self.n_azimuthal as f64)
            .collect()
    }

    /// Largest azimuthal variance over the radial nodes.
    pub fn max_azimuthal_variance(&self) -> f64 {
        self.values
            .chunks(self.n_azimuthal)
            .map(|r| {
                let mean = r.iter().sum::<f64>() / r.len() as f64;
                r.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / r.len() as f64
            })
            .fold(0.0, f64::max)
    }
}

/// `I(q_s, phi_s) = sum_{b, j_i} w_b q_b |Phi(q_s, phi_s, q_b, phi_i)|^2`.
pub fn signal_intensity(crystal: &CrystalConfig, pump: &PumpConfig, grid: &PolarGrid) -> Result<IntensityMap> {
    let model = TwoPhoton::new(crystal, pump)?;
    let eval = GridEvaluator::new(&model, grid);
    let n = grid.n_azimuthal;
    let nr = grid.n_radial;
    let q = &grid.radial_nodes;
    let wq: Vec<f64> = q.iter().zip(&grid.radial_weights).map(|(q, w)| q * w).collect();

    // columns indexed by j_s, each holding one value per radial node
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j_s| {
            let mut col = vec![0.0; nr];
            eval.visit_row(j_s, |a, b, _, phi| col[a] += wq[b] * phi.norm_sqr());
            col
        })
        .collect();
    let mut values = vec![0.0; nr * n];
    for (j, col) in columns.iter().enumerate() {
        for (a, v) in col.iter().enumerate() {
            values[a * n + j] = *v;
        }
    }

    let (imax, peak) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::DegenerateConfiguration("signal intensity vanishes".into()));
    }
    values.iter_mut().for_each(|v| *v /= peak);

    let step = grid.azimuthal_step();
    let (mut sx, mut sy, mut total) = (0.0, 0.0, 0.0);
    for a in 0..nr {
        for j in 0..n {
            let w = wq[a] * values[a * n + j];
            let phi = step * j as f64;
            sx += w * q[a] * phi.cos();
            sy += w * q[a] * phi.sin();
            total += w;
        }
    }
    let scale = pump.waist / total;
    Ok(IntensityMap {
        radial_nodes: q.clone(),
        n_azimuthal: n,
        values,
        peak: (q[imax / n], step * (imax % n) as f64),
        centroid: (sx * scale, sy * scale),
        waist: pump.waist,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biphoton::Resolution;
    use crate::dispersion::{phase_match_angle, Geometry, SellmeierModel};

    fn crystal(geometry: Geometry) -> CrystalConfig {
        let m = SellmeierModel::bbo();
        let theta = match geometry {
            Geometry::Collinear => phase_match_angle(&m, 0.355, 0.0).unwrap(),
            Geometry::NonCollinear => 39.935f64.to_radians(),
        };
        CrystalConfig::new(m, theta, 3e-3, geometry).unwrap()
    }

    fn map(geometry: Geometry, rho_deg: f64) -> IntensityMap {
        let c = crystal(geometry);
        let p = PumpConfig::gaussian(0.355, 200e-6).with_walkoff(rho_deg.to_radians());
        let res = Resolution {
            n_radial: 48,
            n_azimuthal: 64,
        };
        let g = PolarGrid::for_configuration(&c, &p, res).unwrap();
        signal_intensity(&c, &p, &g).unwrap()
    }

    #[test]
    fn collinear_without_walkoff_is_round() {
        let m = map(Geometry::Collinear, 0.0);
        assert!(m.max_azimuthal_variance() < 1e-12);
        assert!(m.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!(m.centroid.0.hypot(m.centroid.1) < 1e-10);
    }

    #[test]
    fn noncollinear_emission_is_a_ring() {
        let m = map(Geometry::NonCollinear, 0.0);
        let prof = m.radial_profile();
        let a = prof
            .iter()
            .enumerate()
            .fold(0, |best, (i, v)| if *v > prof[best] { i } else { best });
        assert!(a > 0 && a < prof.len() - 1);
        assert!(prof[a] > 10.0 * prof[0]);
    }

    #[test]
    fn walkoff_shifts_the_centroid_along_x() {
        let plus = map(Geometry::Collinear, 3.0);
        let minus = map(Geometry::Collinear, -3.0);
        assert!(plus.centroid.0 < 0.0);
        assert!((plus.centroid.1 / plus.centroid.0).abs() < 1e-3);
        assert!((plus.centroid.0 + minus.centroid.0).abs() < 1e-6);
    }

    #[test]
    fn mirror_symmetric_about_the_walkoff_plane() {
        let m = map(Geometry::Collinear, 3.0);
        let n = m.n_azimuthal;
        for a in 0..m.radial_nodes.len() {
            for j in 0..n {
                assert!((m.at(a, j) - m.at(a, (n - j) % n)).abs() < 1e-6);
            }
        }
    }
}
