use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Result, SqgError};

/// Real samples on the collocation grid, row-major with x1 fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    values: Vec<f64>,
}

impl PhysicalField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(SqgError::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(SqgError::NonFinite { index });
        }
        Ok(PhysicalField { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        PhysicalField { grid: grid.clone(), values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        PhysicalField { grid: grid.clone(), values: vec![value; grid.len()] }
    }

    /// Samples `f(x1, x2)` at every collocation point.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for k in 0..grid.n2() {
            let x2 = grid.x2(k);
            for i in 0..grid.n1() {
                values.push(f(grid.x1(i), x2));
            }
        }
        PhysicalField { grid: grid.clone(), values }
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        PhysicalField { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, i1: usize, i2: usize) -> f64 {
        self.values[i2 * self.grid.n1() + i1]
    }

    /// Rectangle-rule `L^p` norm; `p = inf` gives the grid maximum.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm(&self.values, self.grid.cell_area(), p)
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Fraction of the `L^2` mass located in `|x2| > (1 - frac) L2`.
    pub fn boundary_mass_fraction(&self, frac: f64) -> f64 {
        let g = &self.grid;
        let cut = (1.0 - frac) * g.l2();
        let (mut outer, mut total) = (0.0, 0.0);
        for (k, row) in self.values.chunks(g.n1()).enumerate() {
            let m: f64 = row.iter().map(|v| v * v).sum();
            total += m;
            if g.x2(k).abs() > cut {
                outer += m;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            outer / total
        }
    }

    pub(crate) fn pointwise(&self, other: &PhysicalField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(PhysicalField { grid: self.grid.clone(), values })
    }

    pub fn mul(&self, other: &PhysicalField) -> Result<Self> {
        self.pointwise(other, |a, b| a * b)
    }
}

pub(crate) fn lp_norm(values: &[f64], cell: f64, p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 2.0 {
        (values.iter().map(|v| v * v).sum::<f64>() * cell).sqrt()
    } else if p == 1.0 {
        values.iter().map(|v| v.abs()).sum::<f64>() * cell
    } else {
        (values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
    }
}

/// Fourier coefficients `c(j, k)` in FFT storage order (`kk * n1 + jj`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(SqgError::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        if let Some(index) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(SqgError::NonFinite { index });
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub(crate) fn from_raw(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        SpectralField { grid, coeffs }
    }

    pub fn zeros(grid: &Grid) -> Self {
        SpectralField { grid: grid.clone(), coeffs: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// A single real mode `a cos(xi . x) - b sin(xi . x)` built from `c(j,k) = (a + ib)/2`
    /// and its conjugate mirror.
    pub fn single_mode(grid: &Grid, j: i64, k: i64, c: Complex64) -> Result<Self> {
        let idx = grid
            .mode_index(j, k)
            .ok_or_else(|| SqgError::InvalidArgument(format!("mode ({j},{k}) not on lattice")))?;
        let mut f = Self::zeros(grid);
        let mirror = grid.mirror_index(idx);
        if mirror == idx {
            f.coeffs[idx] = Complex64::new(2.0 * c.re, 0.0);
        } else {
            f.coeffs[idx] = c;
            f.coeffs[mirror] = c.conj();
        }
        Ok(f)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of the signed mode `(j, k)`; zero off the lattice.
    pub fn mode(&self, j: i64, k: i64) -> Complex64 {
        self.grid.mode_index(j, k).map(|i| self.coeffs[i]).unwrap_or_default()
    }

    pub fn zero_mode(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Sum of squared coefficient moduli (no area weight).
    pub fn coeff_norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `L^2(Omega)` norm via Parseval: `|Omega| * sum |c|^2`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.area() * self.coeff_norm_sqr()).sqrt()
    }

    /// Real `L^2` inner product `int f g dx` via Parseval.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let s: f64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a * b.conj()).re).sum();
        Ok(self.grid.area() * s)
    }

    /// Complex pairing `int f conj(g) dx`.
    pub fn inner_complex(&self, other: &SpectralField) -> Result<Complex64> {
        self.grid.ensure_same(&other.grid)?;
        let s: Complex64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.area())
    }

    /// Non-homogeneous Sobolev norm with weight `(1 + |xi|^2)^{s/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let g = &self.grid;
        let n1 = g.n1();
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let r2 = g.xi1(i % n1).powi(2) + g.xi2(i / n1).powi(2);
                (1.0 + r2).powf(s) * c.norm_sqr()
            })
            .sum();
        (g.area() * sum).sqrt()
    }

    /// Homogeneous seminorm `||Lambda^s f||_{L^2}`; the zero mode is dropped.
    pub fn homogeneous_norm(&self, s: f64) -> f64 {
        let g = &self.grid;
        let n1 = g.n1();
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| g.xi_norm(i % n1, i / n1).powf(2.0 * s) * c.norm_sqr())
            .sum();
        (g.area() * sum).sqrt()
    }

    /// Largest violation of `c(-j,-k) = conj(c(j,k))`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[self.grid.mirror_index(i)] - self.coeffs[i].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Projects onto conjugate-symmetric coefficients (real data).
    pub fn symmetrize(&self) -> Self {
        let coeffs = (0..self.coeffs.len())
            .map(|i| 0.5 * (self.coeffs[i] + self.coeffs[self.grid.mirror_index(i)].conj()))
            .collect();
        SpectralField { grid: self.grid.clone(), coeffs }
    }

    /// Copy with the zero mode removed.
    pub fn mean_free(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = Complex64::new(0.0, 0.0);
        SpectralField { grid: self.grid.clone(), coeffs }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|c| c * a)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        SpectralField { grid: self.grid.clone(), coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }

    pub fn zip_with(&self, other: &SpectralField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect();
        Ok(SpectralField { grid: self.grid.clone(), coeffs })
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &SpectralField) -> Result<Self> {
        self.zip_with(other, |x, y| x + y * a)
    }

    /// Multiplies each coefficient by `symbol(jj, kk)`.
    pub fn apply_symbol(&self, symbol: impl Fn(usize, usize) -> Complex64) -> Self {
        let n1 = self.grid.n1();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * symbol(i % n1, i / n1))
            .collect();
        SpectralField { grid: self.grid.clone(), coeffs }
    }

    /// Multiplies each coefficient by the real weight `mask[i]`.
    pub fn apply_mask(&self, mask: &[f64]) -> Self {
        debug_assert_eq!(mask.len(), self.coeffs.len());
        let coeffs = self.coeffs.iter().zip(mask).map(|(&c, &m)| c * m).collect();
        SpectralField { grid: self.grid.clone(), coeffs }
    }

    /// Relative coefficient-space `L^2` distance `|self - other| / |other|`
    /// (absolute when `other` is zero).
    pub fn rel_distance(&self, other: &SpectralField) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let num: f64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den = other.coeff_norm_sqr();
        Ok(if den == 0.0 { num.sqrt() } else { (num / den).sqrt() })
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}
