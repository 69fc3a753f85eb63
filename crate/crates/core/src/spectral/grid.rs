use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, SqgError};

/// Default horizontal period, so that horizontal wavenumbers are integers.
pub const DEFAULT_L1: f64 = 2.0 * PI;
/// Default vertical half-length of the truncated strip.
pub const DEFAULT_L2: f64 = 8.0 * PI;

/// Discretization of the strip `T x [-L2, L2)` with periodic wrap in both
/// directions.
///
/// Collocation points are `x1 = i * L1 / n1` and `x2 = -L2 + k * 2 L2 / n2`.
/// The frequency lattice is `xi1(j) = 2 pi j / L1`, `xi2(k) = pi k / L2` for
/// `j in -n1/2..n1/2`, `k in -n2/2..n2/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
    pub l1: f64,
    pub l2: f64,
}

impl GridSpec {
    pub fn new(n1: usize, n2: usize, l1: f64, l2: f64) -> Result<Self> {
        let spec = GridSpec { n1, n2, l1, l2 };
        spec.validate()?;
        Ok(spec)
    }

    /// Grid with the default periods `L1 = 2 pi`, `L2 = 8 pi`.
    pub fn with_sizes(n1: usize, n2: usize) -> Result<Self> {
        Self::new(n1, n2, DEFAULT_L1, DEFAULT_L2)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("n1", self.n1), ("n2", self.n2)] {
            if n < 4 || n % 2 != 0 {
                return Err(SqgError::InvalidGrid(format!(
                    "{name} = {n} must be even and >= 4"
                )));
            }
        }
        for (name, l) in [("L1", self.l1), ("L2", self.l2)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(SqgError::InvalidGrid(format!("{name} = {l} must be positive")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} (L1={}, L2={})", self.n1, self.n2, self.l1, self.l2)
    }
}

struct Plans {
    fwd1: Arc<dyn Fft<f64>>,
    inv1: Arc<dyn Fft<f64>>,
    fwd2: Arc<dyn Fft<f64>>,
    inv2: Arc<dyn Fft<f64>>,
}

struct GridInner {
    spec: GridSpec,
    xi1: Vec<f64>,
    xi2: Vec<f64>,
    plans: Plans,
}

/// A validated grid with its wavenumbers and cached FFT plans.
///
/// Cloning is cheap; grids built from equal specs share one plan set.
#[derive(Clone)]
pub struct Grid(Arc<GridInner>);

type GridKey = (usize, usize, u64, u64);

fn grid_cache() -> &'static Mutex<HashMap<GridKey, Grid>> {
    static CACHE: OnceLock<Mutex<HashMap<GridKey, Grid>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn signed(idx: usize, n: usize) -> i64 {
    if idx < n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let key = (spec.n1, spec.n2, spec.l1.to_bits(), spec.l2.to_bits());
        let mut cache = grid_cache().lock().unwrap_or_else(|e| e.into_inner());
        if let Some(g) = cache.get(&key) {
            return Ok(g.clone());
        }
        let mut planner = FftPlanner::<f64>::new();
        let plans = Plans {
            fwd1: planner.plan_fft_forward(spec.n1),
            inv1: planner.plan_fft_inverse(spec.n1),
            fwd2: planner.plan_fft_forward(spec.n2),
            inv2: planner.plan_fft_inverse(spec.n2),
        };
        let xi1 = (0..spec.n1)
            .map(|i| 2.0 * PI / spec.l1 * signed(i, spec.n1) as f64)
            .collect();
        let xi2 = (0..spec.n2)
            .map(|i| PI / spec.l2 * signed(i, spec.n2) as f64)
            .collect();
        let grid = Grid(Arc::new(GridInner { spec, xi1, xi2, plans }));
        cache.insert(key, grid.clone());
        Ok(grid)
    }

    /// Shorthand for `Grid::new(GridSpec::new(..))`.
    pub fn build(n1: usize, n2: usize, l1: f64, l2: f64) -> Result<Self> {
        Self::new(GridSpec::new(n1, n2, l1, l2)?)
    }

    pub fn spec(&self) -> GridSpec {
        self.0.spec
    }
    pub fn n1(&self) -> usize {
        self.0.spec.n1
    }
    pub fn n2(&self) -> usize {
        self.0.spec.n2
    }
    pub fn l1(&self) -> f64 {
        self.0.spec.l1
    }
    pub fn l2(&self) -> f64 {
        self.0.spec.l2
    }
    /// Number of collocation points (and of modes).
    pub fn len(&self) -> usize {
        self.n1() * self.n2()
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Area of the periodic cell `L1 * 2 L2`.
    pub fn area(&self) -> f64 {
        self.l1() * 2.0 * self.l2()
    }
    pub fn h1(&self) -> f64 {
        self.l1() / self.n1() as f64
    }
    pub fn h2(&self) -> f64 {
        2.0 * self.l2() / self.n2() as f64
    }
    pub fn cell_area(&self) -> f64 {
        self.h1() * self.h2()
    }
    pub fn dx_min(&self) -> f64 {
        self.h1().min(self.h2())
    }

    pub fn x1(&self, i: usize) -> f64 {
        i as f64 * self.h1()
    }
    pub fn x2(&self, k: usize) -> f64 {
        -self.l2() + k as f64 * self.h2()
    }

    /// Horizontal wavenumber of storage column `jj`.
    pub fn xi1(&self, jj: usize) -> f64 {
        self.0.xi1[jj]
    }
    /// Vertical wavenumber of storage row `kk`.
    pub fn xi2(&self, kk: usize) -> f64 {
        self.0.xi2[kk]
    }
    pub fn xi1_all(&self) -> &[f64] {
        &self.0.xi1
    }
    pub fn xi2_all(&self) -> &[f64] {
        &self.0.xi2
    }
    /// `|xi|` at storage position `(jj, kk)`.
    pub fn xi_norm(&self, jj: usize, kk: usize) -> f64 {
        self.xi1(jj).hypot(self.xi2(kk))
    }

    /// Signed integer frequency of storage column `jj`.
    pub fn j_of(&self, jj: usize) -> i64 {
        signed(jj, self.n1())
    }
    /// Signed integer frequency of storage row `kk`.
    pub fn k_of(&self, kk: usize) -> i64 {
        signed(kk, self.n2())
    }
    pub fn is_nyquist1(&self, jj: usize) -> bool {
        jj == self.n1() / 2
    }
    pub fn is_nyquist2(&self, kk: usize) -> bool {
        kk == self.n2() / 2
    }

    /// Storage index of the signed mode `(j, k)`, if it lies on the lattice.
    pub fn mode_index(&self, j: i64, k: i64) -> Option<usize> {
        let (n1, n2) = (self.n1() as i64, self.n2() as i64);
        if j < -n1 / 2 || j >= n1 / 2 || k < -n2 / 2 || k >= n2 / 2 {
            return None;
        }
        let jj = j.rem_euclid(n1) as usize;
        let kk = k.rem_euclid(n2) as usize;
        Some(kk * self.n1() + jj)
    }

    /// Storage index of the mirrored mode `(-j, -k)` (Nyquist maps to itself).
    pub fn mirror_index(&self, idx: usize) -> usize {
        let (n1, n2) = (self.n1(), self.n2());
        let (jj, kk) = (idx % n1, idx / n1);
        ((n2 - kk) % n2) * n1 + (n1 - jj) % n1
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if Arc::ptr_eq(&self.0, &other.0) || self.spec() == other.spec() {
            Ok(())
        } else {
            Err(SqgError::GridMismatch {
                left: self.spec().to_string(),
                right: other.spec().to_string(),
            })
        }
    }

    /// Normalized forward transform: physical values (x1 fastest) to Fourier
    /// coefficients `c(j,k)` with `f(x) = sum c(j,k) exp(i (xi1 x1 + xi2 x2))`.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(values.len(), self.len());
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft2(&mut buf, true);
        let scale = 1.0 / self.len() as f64;
        let n1 = self.n1();
        // x2 starts at -L2: shift phase (-1)^k
        for (kk, row) in buf.chunks_mut(n1).enumerate() {
            let s = if kk % 2 == 0 { scale } else { -scale };
            row.iter_mut().for_each(|c| *c *= s);
        }
        buf
    }

    /// Inverse of [`Grid::forward`], returning complex samples.
    pub fn inverse_complex(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(coeffs.len(), self.len());
        let mut buf = coeffs.to_vec();
        let n1 = self.n1();
        for (kk, row) in buf.chunks_mut(n1).enumerate() {
            if kk % 2 == 1 {
                row.iter_mut().for_each(|c| *c = -*c);
            }
        }
        self.fft2(&mut buf, false);
        buf
    }

    /// Inverse transform keeping the real part.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        self.inverse_complex(coeffs).into_iter().map(|c| c.re).collect()
    }

    fn fft2(&self, buf: &mut [Complex64], forward: bool) {
        let (n1, n2) = (self.n1(), self.n2());
        let p = &self.0.plans;
        let (f1, f2) = if forward { (&p.fwd1, &p.fwd2) } else { (&p.inv1, &p.inv2) };
        f1.process(buf);
        let mut cols = vec![Complex64::new(0.0, 0.0); n1 * n2];
        for kk in 0..n2 {
            for jj in 0..n1 {
                cols[jj * n2 + kk] = buf[kk * n1 + jj];
            }
        }
        f2.process(&mut cols);
        for jj in 0..n1 {
            for kk in 0..n2 {
                buf[kk * n1 + jj] = cols[jj * n2 + kk];
            }
        }
    }

    /// Forward transform of an x2-only profile sampled on the `n2` vertical points.
    pub fn forward_vertical(&self, values: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(values.len(), self.n2());
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.0.plans.fwd2.process(&mut buf);
        let scale = 1.0 / self.n2() as f64;
        for (kk, c) in buf.iter_mut().enumerate() {
            *c *= if kk % 2 == 0 { scale } else { -scale };
        }
        buf
    }

    /// Inverse of [`Grid::forward_vertical`] (real part).
    pub fn inverse_vertical(&self, coeffs: &[Complex64]) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.n2());
        let mut buf: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(kk, &c)| if kk % 2 == 0 { c } else { -c })
            .collect();
        self.0.plans.inv2.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.spec() == other.spec()
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Grid").field(&self.0.spec).finish()
    }
}
