//! Finite-volume discretization of the transmission problem on a uniform
//! grid with a node at the interface, solved by Sturm-sequence bisection.
//!
//! `-(p u')' = lambda m u` with `p = k, m = eps r` on `(a, 0)` and
//! `p = eps kappa, m = rho` on `(0, b)`. Independent of the shooting code:
//! coefficients come in as plain closures.

#![allow(dead_code)]

pub struct Coefficients<'a> {
    pub a: f64,
    pub b: f64,
    pub k: &'a dyn Fn(f64) -> f64,
    pub r: &'a dyn Fn(f64) -> f64,
    pub kappa: &'a dyn Fn(f64) -> f64,
    pub rho: &'a dyn Fn(f64) -> f64,
}

/// Symmetric tridiagonal `M^{-1/2} K M^{-1/2}`: diagonal and off-diagonal.
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// `intervals` must split both `(a, 0)` and `(0, b)` into whole cells.
pub fn assemble(c: &Coefficients, eps: f64, intervals: usize) -> Tridiagonal {
    let h = (c.b - c.a) / intervals as f64;
    let left_cells = (-c.a / h).round() as usize;
    assert!(((left_cells as f64) * h + c.a).abs() < 1e-9 * h.max(1.0), "interface must be a grid node");
    let x = |i: usize| c.a + h * i as f64;
    let flux = |mid: f64| if mid < 0.0 { (c.k)(mid) } else { eps * (c.kappa)(mid) };
    let mass = |i: usize| {
        let xi = x(i);
        if i < left_cells {
            h * eps * (c.r)(xi)
        } else if i > left_cells {
            h * (c.rho)(xi)
        } else {
            0.5 * h * (eps * (c.r)(0.0) + (c.rho)(0.0))
        }
    };
    let unknowns = intervals - 1;
    let mut diag = Vec::with_capacity(unknowns);
    let mut off = Vec::with_capacity(unknowns.saturating_sub(1));
    let mut prev_sqrt_m = 0.0;
    for j in 0..unknowns {
        let i = j + 1;
        let pl = flux(x(i) - 0.5 * h);
        let pr = flux(x(i) + 0.5 * h);
        let sm = mass(i).sqrt();
        diag.push((pl + pr) / h / (sm * sm));
        if j > 0 {
            off.push(-pl / h / (sm * prev_sqrt_m));
        }
        prev_sqrt_m = sm;
    }
    Tridiagonal { diag, off }
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.diag.len() {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            d = self.diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (self.diag[i].abs() + x.abs());
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin bound on the spectrum.
    pub fn upper_bound(&self) -> f64 {
        (0..self.diag.len())
            .map(|i| {
                let l = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let r = if i < self.off.len() { self.off[i].abs() } else { 0.0 };
                self.diag[i] + l + r
            })
            .fold(0.0, f64::max)
    }

    /// The n-th smallest eigenvalue (1-based) by bisection.
    pub fn eigenvalue(&self, n: usize) -> f64 {
        let (mut lo, mut hi) = (0.0, self.upper_bound());
        while hi - lo > 1e-15 * hi {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) >= n {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// First `count` eigenvalues on `intervals` and `2 intervals` cells,
/// combined by Richardson extrapolation for a second-order scheme.
pub fn eigenvalues(c: &Coefficients, eps: f64, intervals: usize, count: usize) -> Vec<f64> {
    let coarse = assemble(c, eps, intervals);
    let fine = assemble(c, eps, 2 * intervals);
    (1..=count).map(|n| (4.0 * fine.eigenvalue(n) - coarse.eigenvalue(n)) / 3.0).collect()
}
