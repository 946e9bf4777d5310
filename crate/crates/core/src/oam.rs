//! Joint OAM spectrum of the two-photon state.
//!
//! `S[l_s, l_i] = |sum W[j_s, j_i] exp(-i l_s phi_s) exp(-i l_i phi_i) (2 pi / n)^2|^2`,
//! the overlap with the modes `exp(i l phi)`, is evaluated for every mode the
//! azimuthal grid resolves, `l in [-n/2, n/2)`, with one forward 2D FFT, then normalized over all
//! `n^2` modes. The window `[-l_max, l_max]^2` is what gets reported; mass
//! outside it is kept as `truncation_mass`.
//!
//! The total-OAM marginal and `f_leak` are taken over the symmetric band
//! `|l| < n/2`, not the window. The Nyquist row and column have no mirror
//! partner on the grid, so their mass is left out of the marginal and counts
//! as leaked.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::biphoton::BiphotonField;
use crate::error::{Error, Result};

pub const DEFAULT_L_MAX: i32 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OamSpectrum {
    pub l_max: i32,
    pub l_tot_pump: i32,
    /// Window entries, row-major over `l_s` then `l_i`, both from `-l_max`.
    pub s: Vec<f64>,
    pub truncation_mass: f64,
    /// Half the azimuthal grid size; modes span `[-band, band)`.
    pub band: i32,
    /// Every resolved mode, row-major, centered so index 0 is `-band`.
    full: Vec<f64>,
}

impl OamSpectrum {
    /// Builds a spectrum from unnormalized squared amplitudes over the full
    /// band, laid out centered and row-major.
    pub fn from_band(full: Vec<f64>, band: i32, l_max: i32, l_tot_pump: i32) -> Result<Self> {
        let n = 2 * band as usize;
        if full.len() != n * n {
            return Err(Error::Parameter(format!(
                "band data has {} entries, expected {}",
                full.len(),
                n * n
            )));
        }
        check_window(l_max, n)?;
        let total: f64 = full.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::DegenerateConfiguration(
                "OAM spectrum carries no power".into(),
            ));
        }
        let full: Vec<f64> = full.into_iter().map(|v| v / total).collect();
        let width = (2 * l_max + 1) as usize;
        let mut s = Vec::with_capacity(width * width);
        for l_s in -l_max..=l_max {
            for l_i in -l_max..=l_max {
                s.push(full[centered(l_s, band) * n + centered(l_i, band)]);
            }
        }
        let inside: f64 = s.iter().sum();
        Ok(Self {
            l_max,
            l_tot_pump,
            s,
            truncation_mass: (1.0 - inside).max(0.0),
            band,
            full,
        })
    }

    /// Window entry; `None` outside `[-l_max, l_max]^2`.
    pub fn get(&self, l_s: i32, l_i: i32) -> Option<f64> {
        let w = self.l_max;
        if l_s.abs() > w || l_i.abs() > w {
            return None;
        }
        let width = (2 * w + 1) as usize;
        Some(self.s[(l_s + w) as usize * width + (l_i + w) as usize])
    }

    /// Any resolved entry; `None` outside the band.
    pub fn band_entry(&self, l_s: i32, l_i: i32) -> Option<f64> {
        let b = self.band;
        if l_s < -b || l_s >= b || l_i < -b || l_i >= b {
            return None;
        }
        let n = 2 * b as usize;
        Some(self.full[centered(l_s, b) * n + centered(l_i, b)])
    }

    /// Probability of total OAM `n`, summed over `|l_s|, |l_i| < band`.
    pub fn total_oam_probability(&self, n: i32) -> f64 {
        let b = self.band;
        (1 - b..b)
            .filter(|l_s| (n - l_s).abs() < b)
            .filter_map(|l_s| self.band_entry(l_s, n - l_s))
            .sum()
    }

    /// Total-OAM marginal `P(n)` over `|l_s|, |l_i| < band`.
    pub fn total_oam_distribution(&self) -> BTreeMap<i32, f64> {
        let b = self.band;
        let n = 2 * b as usize;
        let mut out = BTreeMap::new();
        for (r, row) in self.full.chunks(n).enumerate().skip(1) {
            let l_s = r as i32 - b;
            for (c, &v) in row.iter().enumerate().skip(1) {
                *out.entry(l_s + c as i32 - b).or_insert(0.0) += v;
            }
        }
        out
    }

    /// Mass on the Nyquist row and column, `l_s = -band` or `l_i = -band`.
    pub fn nyquist_mass(&self) -> f64 {
        let n = 2 * self.band as usize;
        let row: f64 = self.full[..n].iter().sum();
        let col: f64 = self.full.chunks(n).skip(1).map(|r| r[0]).sum();
        row + col
    }

    /// `1 - sum_l S[l, l_tot - l]`.
    pub fn f_leak(&self) -> f64 {
        (1.0 - self.total_oam_probability(self.l_tot_pump)).clamp(0.0, 1.0)
    }

    /// Signal-photon marginal over the band.
    pub fn signal_marginal(&self) -> BTreeMap<i32, f64> {
        let b = self.band;
        let n = 2 * b as usize;
        self.full
            .chunks(n)
            .enumerate()
            .map(|(r, row)| (r as i32 - b, row.iter().sum()))
            .collect()
    }

    pub fn window_sum(&self) -> f64 {
        self.s.iter().sum()
    }
}

fn centered(l: i32, band: i32) -> usize {
    (l + band) as usize
}

fn check_window(l_max: i32, n: usize) -> Result<()> {
    if l_max < 0 {
        return Err(Error::Parameter(format!("l_max {l_max} must be non-negative")));
    }
    if 4 * l_max as usize + 8 > n {
        return Err(Error::Aliasing(format!(
            "l_max = {l_max} needs at least {} azimuthal nodes, grid has {n}",
            4 * l_max + 8
        )));
    }
    Ok(())
}

/// Projects the kernel onto the joint OAM basis with a forward 2D FFT.
pub fn oam_spectrum(field: &BiphotonField, l_max: i32) -> Result<OamSpectrum> {
    let n = field.n();
    check_window(l_max, n)?;
    let mut data = field.kernel.clone();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    // rows: j_i -> l_i
    fft.process(&mut data);
    let mut t = transpose(&data, n);
    // columns: j_s -> l_s
    fft.process(&mut t);
    let amp = transpose(&t, n);

    let step = 2.0 * PI / n as f64;
    let scale = step * step;
    let band = (n / 2) as i32;
    let mut full = vec![0.0; n * n];
    for k_s in 0..n {
        for k_i in 0..n {
            let v: Complex64 = amp[k_s * n + k_i] * scale;
            let r = (fft_mode(k_s, n) + band) as usize;
            let c = (fft_mode(k_i, n) + band) as usize;
            full[r * n + c] = v.norm_sqr();
        }
    }
    OamSpectrum::from_band(full, band, l_max, field.pump_oam)
}

/// OAM index of FFT bin `k`.
pub(crate) fn fft_mode(k: usize, n: usize) -> i32 {
    if k < n / 2 {
        k as i32
    } else {
        k as i32 - n as i32
    }
}

fn transpose(data: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for r in 0..n {
        for c in 0..n {
            out[c * n + r] = data[r * n + c];
        }
    }
    out
}

/// Total-OAM marginal of a spectrum.
pub fn total_oam_distribution(spec: &OamSpectrum) -> BTreeMap<i32, f64> {
    spec.total_oam_distribution()
}

/// Infidelity with respect to perfect total-OAM conservation.
pub fn f_leak(spec: &OamSpectrum) -> f64 {
    spec.f_leak()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biphoton::PolarGrid;

    fn field_from(n: usize, f: impl Fn(f64, f64) -> Complex64) -> BiphotonField {
        let grid = PolarGrid::new(4, n, 0.0, 1.0).unwrap();
        let mut kernel = Vec::with_capacity(n * n);
        for js in 0..n {
            for ji in 0..n {
                kernel.push(f(grid.azimuth(js), grid.azimuth(ji)));
            }
        }
        BiphotonField {
            kernel,
            grid,
            norm: 1.0,
            pump_oam: 0,
        }
    }

    #[test]
    fn single_mode_lands_in_the_right_bin() {
        // W = exp(i 2 phi_s) exp(-i 3 phi_i) projects onto l_s = 2, l_i = -3
        let f = field_from(32, |ps, pi| Complex64::from_polar(1.0, 2.0 * ps - 3.0 * pi));
        let s = oam_spectrum(&f, 4).unwrap();
        assert!((s.get(2, -3).unwrap() - 1.0).abs() < 1e-14);
        assert!(s.truncation_mass < 1e-14);
        assert!((s.total_oam_probability(-1) - 1.0).abs() < 1e-14);
        assert!((s.f_leak() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn normalization_and_truncation() {
        let f = field_from(32, |ps, pi| {
            Complex64::from_polar(1.0, 7.0 * (ps - pi)) + Complex64::from_polar(0.5, ps + pi)
        });
        let s = oam_spectrum(&f, 4).unwrap();
        assert!((s.window_sum() + s.truncation_mass - 1.0).abs() < 1e-12);
        assert!((s.truncation_mass - 0.8).abs() < 1e-12);
        assert!((s.get(1, 1).unwrap() - 0.2).abs() < 1e-12);
        let p = s.total_oam_distribution();
        assert!((p.values().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((p[&0] - 0.8).abs() < 1e-12);
        assert!((p[&2] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn window_too_large_for_grid() {
        let f = field_from(32, |_, _| Complex64::new(1.0, 0.0));
        assert!(matches!(oam_spectrum(&f, 7), Err(Error::Aliasing(_))));
        assert!(oam_spectrum(&f, 6).is_ok());
    }

    #[test]
    fn zero_field_is_degenerate() {
        let f = field_from(16, |_, _| Complex64::new(0.0, 0.0));
        assert!(matches!(oam_spectrum(&f, 2), Err(Error::DegenerateConfiguration(_))));
    }

    #[test]
    fn nyquist_edge_counts_as_leak() {
        // all power at (-n/2, -n/2) has total -n, not 0
        let n = 16;
        let f = field_from(n, |ps, pi| Complex64::from_polar(1.0, -8.0 * (ps + pi)));
        let s = oam_spectrum(&f, 2).unwrap();
        assert!((s.band_entry(-8, -8).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.f_leak() - 1.0).abs() < 1e-12);
        assert!((s.nyquist_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nyquist_row_stays_out_of_the_marginal() {
        // (-8, 6) has total -2 but its mirror image (8, -6) is not on the grid
        let n = 16;
        let f = field_from(n, |ps, pi| {
            Complex64::from_polar(1.0, -8.0 * ps + 6.0 * pi) + Complex64::from_polar(1.0, ps + pi)
        });
        let s = oam_spectrum(&f, 2).unwrap();
        assert!((s.nyquist_mass() - 0.5).abs() < 1e-12);
        assert!(s.total_oam_probability(-2).abs() < 1e-12);
        assert!((s.total_oam_probability(2) - 0.5).abs() < 1e-12);
        let p = s.total_oam_distribution();
        assert!((p.values().sum::<f64>() - 0.5).abs() < 1e-12);
        assert!((s.f_leak() - 1.0).abs() < 1e-12);
    }
}
