use std::sync::Arc;

use super::profile::SmoothStep;
use crate::error::{Result, SqgError};
use crate::spectral::{inverse_transform, lp_norm, Grid, SpectralField};

/// Littlewood-Paley family realized as frequency masks on one grid.
///
/// `Delta_j = phi(2^-j |xi|)` with `phi(r) = chi(r) - chi(2r)` for
/// `0 <= j <= jmax`, supported in `[2^{j-1}, 2^{j+1}]`, and the ball
/// `Delta_{-1} = chi(2 |xi|)` supported in `[0, 1]`. The sum over `j <= J`
/// telescopes to `chi(2^-J |xi|)`, so the blocks form a partition of unity.
/// `jmax` is the last block whose open annulus contains a lattice frequency.
#[derive(Debug, Clone)]
pub struct DyadicFamily {
    grid: Grid,
    step: Arc<SmoothStep>,
    radii: Vec<f64>,
    jmax: i32,
    blocks: Vec<Vec<f64>>,
}

impl DyadicFamily {
    pub fn new(grid: &Grid) -> Self {
        Self::with_step(grid, Arc::new(SmoothStep::new()))
    }

    pub fn with_step(grid: &Grid, step: Arc<SmoothStep>) -> Self {
        let n1 = grid.n1();
        let radii: Vec<f64> = (0..grid.len()).map(|i| grid.xi_norm(i % n1, i / n1)).collect();
        let r_max = radii.iter().cloned().fold(0.0, f64::max);
        let mut jmax = -1;
        while 2f64.powi(jmax) < r_max {
            jmax += 1;
        }
        let mut fam = DyadicFamily { grid: grid.clone(), step, radii, jmax, blocks: Vec::new() };
        fam.blocks = (-1..=jmax).map(|j| fam.compute_block(j)).collect();
        fam
    }

    fn compute_block(&self, j: i32) -> Vec<f64> {
        let scale = 2f64.powi(-j);
        self.radii
            .iter()
            .map(|&r| if j == -1 { self.chi(2.0 * r) } else { self.phi(scale * r) })
            .collect()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn jmax(&self) -> i32 {
        self.jmax
    }
    pub fn chi(&self, r: f64) -> f64 {
        self.step.chi(r)
    }
    pub fn phi(&self, r: f64) -> f64 {
        self.step.chi(r) - self.step.chi(2.0 * r)
    }
    /// `|xi|` per storage index.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Mask of `Delta_j`; empty blocks (j < -1 or j > jmax) are all zero.
    pub fn block_mask(&self, j: i32) -> Vec<f64> {
        if j < -1 || j > self.jmax {
            vec![0.0; self.radii.len()]
        } else {
            self.blocks[(j + 1) as usize].clone()
        }
    }

    fn block_slice(&self, j: i32) -> Option<&[f64]> {
        (j >= -1 && j <= self.jmax).then(|| self.blocks[(j + 1) as usize].as_slice())
    }

    /// Mask of `S_j = chi(2^{1-j} D) = sum_{k < j} Delta_k` evaluated directly.
    pub fn cutoff_mask(&self, j: i32) -> Vec<f64> {
        let scale = 2f64.powi(1 - j);
        self.radii.iter().map(|&r| self.chi(scale * r)).collect()
    }

    fn check(&self, g: &SpectralField) -> Result<()> {
        if g.grid() != &self.grid {
            return Err(SqgError::GridMismatch {
                left: g.grid().spec().to_string(),
                right: self.grid.spec().to_string(),
            });
        }
        Ok(())
    }
}

/// Besov index `(s, p, r)` with `p, r` in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("r", r)] {
            if v.is_nan() || v < 1.0 {
                return Err(SqgError::InvalidArgument(format!("{name} = {v} must lie in [1, inf]")));
            }
        }
        if !s.is_finite() {
            return Err(SqgError::InvalidArgument(format!("s = {s} must be finite")));
        }
        Ok(BesovIndex { s, p, r })
    }

    /// The Hilbert case `B^s_{2,2}`.
    pub fn sobolev(s: f64) -> Self {
        BesovIndex { s, p: 2.0, r: 2.0 }
    }

    /// Whether `B^s_{p,r}` embeds in `W^{1,inf}` in dimension `d`.
    pub fn embeds_in_lipschitz(&self, d: f64) -> bool {
        let critical = 1.0 + d / self.p;
        self.s > critical || (self.s == critical && self.r == 1.0)
    }
}

/// `Delta_j g`; zero for `j <= -2` and above `jmax`.
pub fn dyadic_block(g: &SpectralField, j: i32, fam: &DyadicFamily) -> Result<SpectralField> {
    fam.check(g)?;
    Ok(match fam.block_slice(j) {
        Some(mask) => g.apply_mask(mask),
        None => SpectralField::zeros(g.grid()),
    })
}

/// `S_j g = chi(2^{1-j} D) g`, `j >= 0`, via the direct mask.
pub fn low_freq_cutoff(g: &SpectralField, j: i32, fam: &DyadicFamily) -> Result<SpectralField> {
    fam.check(g)?;
    if j < 0 {
        return Err(SqgError::InvalidArgument(format!("low-frequency cutoff needs j >= 0, got {j}")));
    }
    Ok(g.apply_mask(&fam.cutoff_mask(j)))
}

/// `S_j g` assembled as `sum_{k <= j-1} Delta_k g`.
pub fn low_freq_cutoff_by_blocks(g: &SpectralField, j: i32, fam: &DyadicFamily) -> Result<SpectralField> {
    if j < 0 {
        return Err(SqgError::InvalidArgument(format!("low-frequency cutoff needs j >= 0, got {j}")));
    }
    let mut acc = SpectralField::zeros(g.grid());
    for k in -1..j {
        acc = acc.add(&dyadic_block(g, k, fam)?)?;
    }
    Ok(acc)
}

/// Per-block `L^p` norms `||Delta_j g||_{L^p}` for `j = -1..=jmax`.
pub fn block_norms(g: &SpectralField, p: f64, fam: &DyadicFamily) -> Result<Vec<f64>> {
    fam.check(g)?;
    let cell = g.grid().cell_area();
    Ok((-1..=fam.jmax())
        .map(|j| {
            let b = g.apply_mask(fam.block_slice(j).expect("in range"));
            if p == 2.0 {
                // rectangle rule and Parseval coincide for p = 2
                b.l2_norm()
            } else {
                lp_norm(inverse_transform(&b).values(), cell, p)
            }
        })
        .collect())
}

fn lr_norm(seq: impl Iterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        seq.fold(0.0, f64::max)
    } else {
        seq.map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// `|| (2^{js} ||Delta_j g||_{L^p})_{j >= -1} ||_{l^r}`.
pub fn besov_norm(g: &SpectralField, idx: BesovIndex, fam: &DyadicFamily) -> Result<f64> {
    let norms = block_norms(g, idx.p, fam)?;
    Ok(lr_norm(
        norms.iter().enumerate().map(|(i, &n)| 2f64.powf((i as f64 - 1.0) * idx.s) * n),
        idx.r,
    ))
}

/// Pointwise ratio `sum_j 4^{js} m_j(r)^2 / (1 + r^2)^s` between the squared
/// `B^s_{2,2}` and `H^s` weights at each lattice frequency, reduced to its
/// range `(min, max)` over the grid.
pub fn besov_sobolev_weight_range(s: f64, fam: &DyadicFamily) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for (i, &r) in fam.radii().iter().enumerate() {
        let w: f64 = (-1..=fam.jmax())
            .map(|j| 4f64.powf(j as f64 * s) * fam.blocks[(j + 1) as usize][i].powi(2))
            .sum();
        let ratio = (w / (1.0 + r * r).powf(s)).sqrt();
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    (lo, hi)
}
