//! Seeded random fields.
//!
//! All randomness goes through `ChaCha8Rng`. Spectral fields are drawn per
//! mode from a generator keyed by `(seed, j, k)`, so the same seed produces
//! the same low-mode content on every grid that resolves it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::spectral::{Grid, PhysicalField, SpectralField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn mode_rng(seed: u64, j: i64, k: i64) -> ChaCha8Rng {
    let key = splitmix(splitmix(splitmix(seed) ^ j as u64) ^ (k as u64).rotate_left(32));
    ChaCha8Rng::seed_from_u64(key)
}

/// Amplitude envelope of a random spectral field, as a function of `|xi|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumShape {
    /// Unit variance on every mode.
    White,
    /// Amplitude `(1 + |xi|^2)^{-decay/2}`.
    Decay(f64),
    /// Unit variance on `lo <= |xi| <= hi`, zero elsewhere.
    Annulus(f64, f64),
}

impl SpectrumShape {
    fn amplitude(&self, r: f64) -> f64 {
        match *self {
            SpectrumShape::White => 1.0,
            SpectrumShape::Decay(p) => (1.0 + r * r).powf(-0.5 * p),
            SpectrumShape::Annulus(lo, hi) => {
                if r >= lo && r <= hi {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// I.i.d. standard normal samples at every collocation point.
pub fn random_physical(grid: &Grid, seed: u64) -> PhysicalField {
    let mut r = rng(seed);
    let values = (0..grid.len()).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
    PhysicalField::new(grid.clone(), values).expect("normal samples are finite")
}

/// Real random field with conjugate-symmetric coefficients and empty Nyquist
/// row and column.
pub fn random_spectral(grid: &Grid, seed: u64, shape: SpectrumShape) -> SpectralField {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    let n1 = grid.n1();
    for kk in 0..grid.n2() {
        for jj in 0..n1 {
            if grid.is_nyquist1(jj) || grid.is_nyquist2(kk) {
                continue;
            }
            let (j, k) = (grid.j_of(jj), grid.k_of(kk));
            // one draw per conjugate pair, taken at the representative with k > 0 or (k = 0, j >= 0)
            if k < 0 || (k == 0 && j < 0) {
                continue;
            }
            let amp = shape.amplitude(grid.xi_norm(jj, kk));
            if amp == 0.0 {
                continue;
            }
            let mut r = mode_rng(seed, j, k);
            let re: f64 = r.sample(StandardNormal);
            let im: f64 = r.sample(StandardNormal);
            let idx = kk * n1 + jj;
            if j == 0 && k == 0 {
                coeffs[idx] = Complex64::new(amp * re, 0.0);
            } else {
                let c = Complex64::new(re, im) * (amp * std::f64::consts::FRAC_1_SQRT_2);
                coeffs[idx] = c;
                coeffs[grid.mirror_index(idx)] = c.conj();
            }
        }
    }
    SpectralField::new(grid.clone(), coeffs).expect("finite coefficients")
}
