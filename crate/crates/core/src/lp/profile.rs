//! The radial cutoff `chi`: equal to 1 on `[0, 1]`, 0 on `[2, inf)`, and a
//! normalized integral of the bump `exp(-1 / (x (1 - x)))` in between.

const PANELS: usize = 256;
const GL_POINTS: usize = 8;

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton iteration on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn bump(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        (-1.0 / (x * (1.0 - x))).exp()
    }
}

/// Smooth non-decreasing step `F` with `F = 0` on `(-inf, 0]` and `F = 1` on `[1, inf)`.
#[derive(Debug, Clone)]
pub struct SmoothStep {
    cumulative: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Default for SmoothStep {
    fn default() -> Self {
        Self::new()
    }
}

impl SmoothStep {
    pub fn new() -> Self {
        let (nodes, weights) = gauss_legendre(GL_POINTS);
        let mut s = SmoothStep { cumulative: vec![0.0; PANELS + 1], nodes, weights };
        let h = 1.0 / PANELS as f64;
        for i in 0..PANELS {
            let a = i as f64 * h;
            s.cumulative[i + 1] = s.cumulative[i] + s.integrate(a, a + h);
        }
        s
    }

    fn integrate(&self, a: f64, b: f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * bump(mid + half * t))
            .sum::<f64>()
            * half
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let h = 1.0 / PANELS as f64;
        let i = ((x / h) as usize).min(PANELS - 1);
        let partial = self.cumulative[i] + self.integrate(i as f64 * h, x);
        (partial / self.cumulative[PANELS]).clamp(0.0, 1.0)
    }

    /// `chi(r) = 1 - F(r - 1)`.
    pub fn chi(&self, r: f64) -> f64 {
        if r <= 1.0 {
            1.0
        } else {
            1.0 - self.eval(r - 1.0)
        }
    }
}
