//! Exact eigenpairs of the two-part string by shooting.
//!
//! The problem is written as one Sturm–Liouville system in the flux
//! variable `P`, which is continuous across the interface:
//!
//! ```text
//! (a, 0):  u' = P / k,        P' = -eps * lambda * r * u
//! (0, b):  u' = P / (eps*kappa), P' = -lambda * rho * u
//! ```
//!
//! with `u(a) = 0`, `u'(a) = 1` and the miss `u(b)`. The n-th eigenvalue is
//! located by the number of sign changes of `u`, then refined with Brent's
//! method on the miss.

use std::sync::Arc;

use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::numkernel::{adaptive_quadrature, brent_root_fallible, integrate_ivp, DenseSolution, Tolerances};
use crate::profile::{Branch, PiecewiseFunction, SturmBranch};

/// Scan cells over `[a, b]` for sign-change counting.
pub const ZERO_SCAN_CELLS: usize = 4000;

const RESCALE_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub coeffs: CoefficientSet,
    pub epsilon: f64,
    pub tol: Tolerances,
}

impl ProblemInstance {
    pub fn new(coeffs: CoefficientSet, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Epsilon(epsilon));
        }
        Ok(ProblemInstance { coeffs, epsilon, tol: Tolerances::default() })
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    /// Unweighted `L²(a, b)`.
    PlainL2,
    /// `∫ₐ⁰ r f² + ∫₀ᵇ ρ f²`.
    Weighted,
}

/// Integrated trajectory for one trial `lambda`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub lambda: f64,
    pub left: DenseSolution<2>,
    pub right: DenseSolution<2>,
    /// `u(b)` divided by the largest sampled `|u|`.
    pub miss: f64,
    pub zero_count: usize,
    pub sup: f64,
}

/// Integrates left to right at the trial value `lambda`.
pub fn shoot(inst: &ProblemInstance, lambda: f64) -> Result<Trajectory> {
    if !(lambda >= 0.0) {
        return Err(Error::Invalid(format!("lambda must be nonnegative, got {lambda}")));
    }
    let c = &inst.coeffs;
    let eps = inst.epsilon;
    let (k, r, kappa, rho) = (&c.k, &c.r, &c.kappa, &c.rho);

    let mut left = integrate_ivp(
        |x, y: &[f64; 2]| [y[1] / k.value(x), -eps * lambda * r.value(x) * y[0]],
        c.a,
        0.0,
        [0.0, 1.0],
        inst.tol,
    )?;
    let step = (c.b - c.a) / ZERO_SCAN_CELLS as f64;
    let left_samples = sample_piece(&left, c.a, 0.0, step);
    let left_sup = left_samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if left_sup > RESCALE_THRESHOLD {
        left.scale(1.0 / left_sup);
    }
    let right = integrate_ivp(
        |x, y: &[f64; 2]| [y[1] / (eps * kappa.value(x)), -lambda * rho.value(x) * y[0]],
        0.0,
        c.b,
        left.end(),
        inst.tol,
    )?;
    let right_samples = sample_piece(&right, 0.0, c.b, step);

    let scale = if left_sup > RESCALE_THRESHOLD { 1.0 / left_sup } else { 1.0 };
    let samples: Vec<f64> = left_samples.iter().map(|v| v * scale).chain(right_samples.iter().copied()).collect();
    let sup = samples.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let miss = right.end()[0] / sup;
    Ok(Trajectory { lambda, left, right, miss, zero_count: count_sign_changes(&samples), sup })
}

/// Samples of `u` on `(x0, x1]` with spacing at most `step`.
fn sample_piece(sol: &DenseSolution<2>, x0: f64, x1: f64, step: f64) -> Vec<f64> {
    let cells = ((x1 - x0) / step).ceil().max(1.0) as usize;
    (1..=cells)
        .map(|i| {
            let x = if i == cells { x1 } else { x0 + (x1 - x0) * i as f64 / cells as f64 };
            sol.eval(x)[0]
        })
        .collect()
}

fn count_sign_changes(values: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            count += 1;
        }
        last = v;
    }
    count
}

/// `(miss, zero_count)` at `lambda`.
pub fn shoot_miss(inst: &ProblemInstance, lambda: f64) -> Result<(f64, usize)> {
    let t = shoot(inst, lambda)?;
    Ok((t.miss, t.zero_count))
}

/// Constant-coefficient estimate `eps * pi² n² / S(0)²` for the n-th eigenvalue.
pub fn eigenvalue_seed(inst: &ProblemInstance, n: usize) -> Result<f64> {
    let s0 = inst.coeffs.phase_length()?;
    Ok(inst.epsilon * (std::f64::consts::PI * n as f64 / s0).powi(2))
}

/// The n-th eigenvalue (1-based), to relative accuracy of about 1e-9 or better.
pub fn eigenvalue(inst: &ProblemInstance, n: usize) -> Result<f64> {
    let (lo, hi) = isolate(inst, n)?;
    let x_tol = 1e-14 * hi.max(1e-300);
    brent_root_fallible(|lambda| Ok(shoot(inst, lambda)?.miss), lo, hi, x_tol)
}

/// Bracket `[lo, hi]` with `n - 1` sign changes at `lo` and `n` at `hi`.
pub fn isolate(inst: &ProblemInstance, n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    let count = |lambda: f64| -> Result<usize> { Ok(shoot(inst, lambda)?.zero_count) };
    let seed = eigenvalue_seed(inst, n)?;

    let mut lo = 0.5 * seed;
    let mut lo_count = count(lo)?;
    let mut tries = 0;
    while lo_count >= n {
        lo *= 0.25;
        tries += 1;
        if tries > 40 {
            lo = 0.0;
        }
        lo_count = count(lo)?;
    }
    let mut hi = 2.0 * seed;
    let mut hi_count = count(hi)?;
    tries = 0;
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
    for _ in 0..200 {
        if lo_count == n - 1 && hi_count == n {
            return Ok((lo, hi));
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
    Err(Error::BracketExpansion { n, lo, hi })
}

#[derive(Debug, Clone)]
pub struct ExactEigenpair {
    pub n: usize,
    pub lambda: f64,
    pub u: PiecewiseFunction,
    pub norm_mode: NormMode,
}

impl ExactEigenpair {
    pub fn frequency(&self) -> f64 {
        self.lambda.sqrt()
    }

    /// Interior zeros located by sign-change scan and bisection.
    pub fn interior_zeros(&self) -> Vec<f64> {
        interior_zeros(&self.u)
    }
}

/// Zeros of `f` in `(a, b)`: sign changes on a scan of `ZERO_SCAN_CELLS` cells, refined by bisection.
pub fn interior_zeros(f: &PiecewiseFunction) -> Vec<f64> {
    let cells = ZERO_SCAN_CELLS;
    let xs: Vec<f64> =
        (0..=cells).map(|i| if i == cells { f.b } else { f.a + (f.b - f.a) * i as f64 / cells as f64 }).collect();
    let mut zeros = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &x in &xs[1..cells] {
        let v = f.value(x);
        if v == 0.0 {
            continue;
        }
        if let Some((px, pv)) = prev {
            if pv.signum() != v.signum() {
                zeros.push(bisect_zero(f, px, x, pv));
            }
        }
        prev = Some((x, v));
    }
    zeros
}

fn bisect_zero(f: &PiecewiseFunction, mut lo: f64, mut hi: f64, flo: f64) -> f64 {
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let v = f.value(mid);
        if v == 0.0 {
            return mid;
        }
        if v.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The piecewise function carried by a trajectory.
pub fn trajectory_function(inst: &ProblemInstance, t: &Trajectory) -> PiecewiseFunction {
    let c = &inst.coeffs;
    let left: Arc<dyn Branch> = Arc::new(SturmBranch {
        sol: t.left.clone(),
        p: c.k.clone(),
        p_scale: 1.0,
        w: c.r.clone(),
        w_scale: inst.epsilon,
        lambda: t.lambda,
    });
    let right: Arc<dyn Branch> = Arc::new(SturmBranch {
        sol: t.right.clone(),
        p: c.kappa.clone(),
        p_scale: inst.epsilon,
        w: c.rho.clone(),
        w_scale: 1.0,
        lambda: t.lambda,
    });
    PiecewiseFunction::new(c.a, c.b, left, right)
}

/// Eigenfunction for the n-th eigenvalue, normalized in `mode`, with `u'(a) > 0`.
pub fn eigenfunction(inst: &ProblemInstance, n: usize, mode: NormMode) -> Result<ExactEigenpair> {
    let lambda = eigenvalue(inst, n)?;
    eigenfunction_at(inst, n, lambda, mode)
}

/// Eigenfunction reconstructed at an already computed eigenvalue.
pub fn eigenfunction_at(inst: &ProblemInstance, n: usize, lambda: f64, mode: NormMode) -> Result<ExactEigenpair> {
    let mut t = shoot(inst, lambda)?;
    // bring the magnitude to order one before measuring the norm
    let s = 1.0 / t.sup;
    t.left.scale(s);
    t.right.scale(s);
    let raw = trajectory_function(inst, &t);
    let norm = space_norm(&inst.coeffs, &raw, mode)?;
    Ok(ExactEigenpair { n, lambda, u: raw.scaled(1.0 / norm), norm_mode: mode })
}

/// Norm of `f` in the chosen mode.
pub fn space_norm(coeffs: &CoefficientSet, f: &PiecewiseFunction, mode: NormMode) -> Result<f64> {
    let tol = crate::numkernel::DEFAULT_QUAD_TOL;
    let sq = match mode {
        NormMode::PlainL2 => f.l2_inner(f, tol)?,
        NormMode::Weighted => {
            let left = adaptive_quadrature(|x| coeffs.r.value(x) * f.left_jet(x).v.powi(2), coeffs.a, 0.0, tol)?;
            let right = adaptive_quadrature(|x| coeffs.rho.value(x) * f.right_jet(x).v.powi(2), 0.0, coeffs.b, tol)?;
            left + right
        }
    };
    Ok(sq.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn constant(eps: f64) -> ProblemInstance {
        ProblemInstance::new(CoefficientSet::constant(), eps).unwrap()
    }

    fn example(eps: f64) -> ProblemInstance {
        ProblemInstance::new(CoefficientSet::worked_example(), eps).unwrap()
    }

    #[test]
    fn epsilon_range() {
        assert!(matches!(ProblemInstance::new(CoefficientSet::constant(), 1.0), Err(Error::Epsilon(_))));
        assert!(matches!(ProblemInstance::new(CoefficientSet::constant(), 0.0), Err(Error::Epsilon(_))));
    }

    #[test]
    fn no_oscillation_at_zero() {
        let (miss, zeros) = shoot_miss(&constant(0.1), 0.0).unwrap();
        assert_eq!(zeros, 0);
        assert!(miss > 0.0);
    }

    #[test]
    fn miss_changes_sign_at_closed_form_root() {
        // tan(sqrt(eps lambda)|a|) + tan(sqrt(lambda/eps) b) = 0 first at eps pi^2 / (b - eps a)^2
        let inst = constant(0.1);
        let root = 0.1 * PI * PI / 1.21;
        assert!((root - 0.815670).abs() < 1e-6);
        let (below, _) = shoot_miss(&inst, root * (1.0 - 1e-6)).unwrap();
        let (above, _) = shoot_miss(&inst, root * (1.0 + 1e-6)).unwrap();
        assert!(below * above < 0.0);
    }

    #[test]
    fn zero_count_is_monotone() {
        let inst = example(0.05);
        let mut last = 0;
        for i in 0..40 {
            let (_, c) = shoot_miss(&inst, i as f64 * 2.5).unwrap();
            assert!(c >= last);
            last = c;
        }
        assert!(last > 10);
    }

    #[test]
    fn constant_coefficient_eigenvalue() {
        let inst = constant(0.05);
        let lambda = eigenvalue(&inst, 5).unwrap();
        let expected = 0.05f64.sqrt() * 5.0 * PI / 1.05;
        assert!((expected - 3.3451499).abs() < 1e-7);
        assert!((lambda.sqrt() - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn worked_example_eigenvalues() {
        let inst = example(0.05);
        assert!((eigenvalue(&inst, 5).unwrap().sqrt() - 2.76675).abs() < 2e-4);
        assert!((eigenvalue(&inst, 15).unwrap().sqrt() - 8.27450).abs() < 2e-4);
    }

    #[test]
    fn ground_state_and_normalization() {
        let inst = example(0.05);
        let pair = eigenfunction(&inst, 1, NormMode::PlainL2).unwrap();
        assert!(pair.interior_zeros().is_empty());
        let norm = space_norm(&inst.coeffs, &pair.u, NormMode::PlainL2).unwrap();
        assert!((norm - 1.0).abs() < 1e-8);
        assert!(pair.u.left_jet(-1.0).d1 > 0.0);

        let weighted = eigenfunction(&inst, 2, NormMode::Weighted).unwrap();
        let norm = space_norm(&inst.coeffs, &weighted.u, NormMode::Weighted).unwrap();
        assert!((norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn space_norm_examples() {
        let c = CoefficientSet::constant();
        let one = PiecewiseFunction::new(
            -1.0,
            1.0,
            Arc::new(|_: f64| crate::profile::Jet { v: 1.0, ..Default::default() }),
            Arc::new(|_: f64| crate::profile::Jet { v: 1.0, ..Default::default() }),
        );
        assert!((space_norm(&c, &one, NormMode::Weighted).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let ex = CoefficientSet::worked_example();
        let sq = space_norm(&ex, &one, NormMode::Weighted).unwrap().powi(2);
        assert!((sq - 17.0 / 6.0).abs() < 1e-11);
        let zero = PiecewiseFunction::zero(-1.0, 1.0);
        assert_eq!(space_norm(&ex, &zero, NormMode::PlainL2).unwrap(), 0.0);
    }

    #[test]
    fn zero_index_is_rejected() {
        assert!(matches!(eigenvalue(&constant(0.1), 0), Err(Error::ZeroIndex)));
    }
}
