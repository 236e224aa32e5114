//! Shooting for a regular Sturm–Liouville problem on one interval,
//! `(p u')' + lambda w u = 0`, starting from `u(x0) = 0`, `p u'(x0) = 1`.

use crate::coeffs::ScalarField;
use crate::error::{Error, Result};
use crate::exact::ZERO_SCAN_CELLS;
use crate::numkernel::{adaptive_quadrature, brent_root_fallible, integrate_ivp, DenseSolution, Tolerances};

#[derive(Debug, Clone)]
pub struct IntervalShot {
    pub sol: DenseSolution<2>,
    pub zero_count: usize,
    pub sup: f64,
    /// `u(x1) / sup`.
    pub miss: f64,
}

pub fn shoot_interval(
    p: &ScalarField,
    w: &ScalarField,
    x0: f64,
    x1: f64,
    lambda: f64,
    tol: Tolerances,
) -> Result<IntervalShot> {
    let sol =
        integrate_ivp(|x, y: &[f64; 2]| [y[1] / p.value(x), -lambda * w.value(x) * y[0]], x0, x1, [0.0, 1.0], tol)?;
    let cells = ZERO_SCAN_CELLS;
    let mut last = 0.0f64;
    let mut zero_count = 0;
    let mut sup = 0.0f64;
    for i in 1..=cells {
        let x = if i == cells { x1 } else { x0 + (x1 - x0) * i as f64 / cells as f64 };
        let v = sol.eval(x)[0];
        sup = sup.max(v.abs());
        if v != 0.0 {
            if last != 0.0 && v.signum() != last.signum() {
                zero_count += 1;
            }
            last = v;
        }
    }
    let sup = sup.max(f64::MIN_POSITIVE);
    let miss = sol.end()[0] / sup;
    Ok(IntervalShot { sol, zero_count, sup, miss })
}

/// The n-th Dirichlet eigenvalue on `[x0, x1]`.
pub fn dirichlet_eigenvalue(
    p: &ScalarField,
    w: &ScalarField,
    x0: f64,
    x1: f64,
    n: usize,
    tol: Tolerances,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    let travel = adaptive_quadrature(|x| (w.value(x) / p.value(x)).sqrt(), x0, x1, 1e-12)?;
    let seed = (std::f64::consts::PI * n as f64 / travel).powi(2);
    let count = |lambda: f64| -> Result<usize> { Ok(shoot_interval(p, w, x0, x1, lambda, tol)?.zero_count) };

    let mut lo = 0.5 * seed;
    let mut lo_count = count(lo)?;
    while lo_count >= n {
        lo *= 0.25;
        lo_count = count(lo)?;
    }
    let mut hi = 2.0 * seed;
    let mut hi_count = count(hi)?;
    let mut tries = 0;
    while hi_count < n {
        lo = hi;
        lo_count = hi_count;
        hi *= 2.0;
        tries += 1;
        if tries > 80 {
            return Err(Error::BracketExpansion { n, lo, hi });
        }
        hi_count = count(hi)?;
    }
    let mut isolated = false;
    for _ in 0..200 {
        if lo_count == n - 1 && hi_count == n {
            isolated = true;
            break;
        }
        let mid = 0.5 * (lo + hi);
        let c = count(mid)?;
        if c >= n {
            hi = mid;
            hi_count = c;
        } else {
            lo = mid;
            lo_count = c;
        }
    }
    if !isolated {
        return Err(Error::BracketExpansion { n, lo, hi });
    }
    brent_root_fallible(|lambda| Ok(shoot_interval(p, w, x0, x1, lambda, tol)?.miss), lo, hi, 1e-14 * hi)
}
