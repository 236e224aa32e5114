//! Low-frequency expansion `lambda ~ eps mu + eps² nu`, `u ~ u_n + eps w_n`.
//!
//! The leading term vanishes on the stiff part; on `(0, b)` it is the
//! Dirichlet eigenfunction of `(kappa u')' + mu rho u = 0`. The corrector is
//! `k^{-1}`-linear on `(a, 0)` and solves a resonant problem on `(0, b)`.

use std::sync::Arc;

use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::numkernel::{adaptive_quadrature, integrate_ivp, DenseSolution, Tolerances, DEFAULT_QUAD_TOL};
use crate::profile::{Branch, Jet, PiecewiseFunction, SturmBranch};
use crate::sturm::{dirichlet_eigenvalue, shoot_interval};

/// Relative agreement required between the two expressions for `nu`.
pub const NU_AGREEMENT: f64 = 1e-8;
/// Solvability check on the corrector's interface value.
pub const SOLVABILITY_TOL: f64 = 1e-6;

/// Limit eigenpair on `(0, b)`, normalized by `∫ rho u² = 1`, `u'(+0) > 0`.
#[derive(Clone)]
pub struct LimitEigenpair {
    pub n: usize,
    pub mu: f64,
    pub u: Arc<SturmBranch>,
}

impl LimitEigenpair {
    /// `u'(+0)`.
    pub fn slope_at_zero(&self) -> f64 {
        self.u.jet(0.0).d1
    }
}

pub fn limit_eigenpair(coeffs: &CoefficientSet, n: usize, tol: Tolerances) -> Result<LimitEigenpair> {
    let (kappa, rho) = (&coeffs.kappa, &coeffs.rho);
    let mu = dirichlet_eigenvalue(kappa, rho, 0.0, coeffs.b, n, tol)?;
    let shot = shoot_interval(kappa, rho, 0.0, coeffs.b, mu, tol)?;
    let mut sol = shot.sol;
    sol.scale(1.0 / shot.sup);
    let norm_sq = adaptive_quadrature(|x| rho.value(x) * sol.eval(x)[0].powi(2), 0.0, coeffs.b, DEFAULT_QUAD_TOL)?;
    sol.scale(1.0 / norm_sq.sqrt());
    let u = SturmBranch { sol, p: kappa.clone(), p_scale: 1.0, w: rho.clone(), w_scale: 1.0, lambda: mu };
    Ok(LimitEigenpair { n, mu, u: Arc::new(u) })
}

/// `w = C ∫ₐˣ k⁻¹` on `[a, 0]` with `C = kappa(0) u'(+0)`.
#[derive(Clone)]
pub struct LeftCorrector {
    pub flux: f64,
    compliance: DenseSolution<1>,
    coeffs: CoefficientSet,
}

impl Branch for LeftCorrector {
    fn jet(&self, x: f64) -> Jet {
        let k = self.coeffs.k.value(x);
        let dk = self.coeffs.k.d1(x);
        Jet { v: self.flux * self.compliance.eval(x)[0], d1: self.flux / k, d2: -self.flux * dk / (k * k) }
    }
}

impl LeftCorrector {
    /// `w(-0)`.
    pub fn at_zero(&self) -> f64 {
        self.flux * self.compliance.end()[0]
    }
}

pub fn corrector_left(coeffs: &CoefficientSet, slope_at_zero: f64, tol: Tolerances) -> Result<LeftCorrector> {
    let k = &coeffs.k;
    let compliance = integrate_ivp(|x, _: &[f64; 1]| [1.0 / k.value(x)], coeffs.a, 0.0, [0.0], tol)?;
    Ok(LeftCorrector { flux: coeffs.kappa.value(0.0) * slope_at_zero, compliance, coeffs: coeffs.clone() })
}

/// `nu = -∫ₐ⁰ k (w')²`, checked against the boundary form `-(k w w')(-0)`.
pub fn nu_coefficient(coeffs: &CoefficientSet, w: &LeftCorrector) -> Result<f64> {
    let volume = -adaptive_quadrature(
        |x| {
            let d = w.jet(x).d1;
            coeffs.k.value(x) * d * d
        },
        coeffs.a,
        0.0,
        DEFAULT_QUAD_TOL * w.flux.powi(2).max(1.0),
    )?;
    let at0 = w.jet(0.0);
    let boundary = -coeffs.k.value(0.0) * at0.v * at0.d1;
    let scale = volume.abs().max(boundary.abs());
    if (volume - boundary).abs() > NU_AGREEMENT * scale.max(f64::MIN_POSITIVE) && scale > 0.0 {
        return Err(Error::NuMismatch { volume, boundary });
    }
    Ok(volume)
}

/// Corrector on `[0, b]`: particular solution plus a multiple of the
/// homogeneous solution, both vanishing at `b`.
#[derive(Clone)]
pub struct RightCorrector {
    particular: DenseSolution<2>,
    homogeneous: DenseSolution<2>,
    pub slope: f64,
    mu: f64,
    nu: f64,
    u: Arc<SturmBranch>,
    coeffs: CoefficientSet,
}

impl Branch for RightCorrector {
    fn jet(&self, x: f64) -> Jet {
        let [wp, pp] = self.particular.eval(x);
        let [wh, ph] = self.homogeneous.eval(x);
        let w = wp + self.slope * wh;
        let flux = pp + self.slope * ph;
        let kappa = self.coeffs.kappa.value(x);
        let rho = self.coeffs.rho.value(x);
        let d1 = flux / kappa;
        let dflux = -self.mu * rho * w - self.nu * rho * self.u.sol.eval(x)[0];
        Jet { v: w, d1, d2: (dflux - self.coeffs.kappa.d1(x) * d1) / kappa }
    }
}

pub fn corrector_right(
    coeffs: &CoefficientSet,
    limit: &LimitEigenpair,
    nu: f64,
    match_value: f64,
    tol: Tolerances,
) -> Result<RightCorrector> {
    let (kappa, rho) = (&coeffs.kappa, &coeffs.rho);
    let mu = limit.mu;
    let u = limit.u.clone();
    let b = coeffs.b;
    let particular = integrate_ivp(
        |x, y: &[f64; 2]| [y[1] / kappa.value(x), -mu * rho.value(x) * y[0] - nu * rho.value(x) * u.sol.eval(x)[0]],
        b,
        0.0,
        [0.0, 0.0],
        tol,
    )?;
    let homogeneous = integrate_ivp(
        |x, y: &[f64; 2]| [y[1] / kappa.value(x), -mu * rho.value(x) * y[0]],
        b,
        0.0,
        [0.0, kappa.value(b)],
        tol,
    )?;
    // the homogeneous solution is a multiple of u_n, so w(0) cannot depend on the slope
    let got = particular.end()[0];
    if (got - match_value).abs() > SOLVABILITY_TOL * match_value.abs().max(1.0) {
        return Err(Error::Solvability { got, expected: match_value });
    }
    let q = DEFAULT_QUAD_TOL;
    let up = adaptive_quadrature(|x| rho.value(x) * u.sol.eval(x)[0] * particular.eval(x)[0], 0.0, b, q)?;
    let uh = adaptive_quadrature(|x| rho.value(x) * u.sol.eval(x)[0] * homogeneous.eval(x)[0], 0.0, b, q)?;
    Ok(RightCorrector { particular, homogeneous, slope: -up / uh, mu, nu, u, coeffs: coeffs.clone() })
}

/// Everything the low-frequency expansion needs for index `n`.
#[derive(Clone)]
pub struct LowFreqApprox {
    pub n: usize,
    pub mu: f64,
    pub nu: f64,
    pub limit: LimitEigenpair,
    pub w_left: Arc<LeftCorrector>,
    pub w_right: Arc<RightCorrector>,
    pub a: f64,
    pub b: f64,
}

impl std::fmt::Debug for LowFreqApprox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LowFreqApprox").field("n", &self.n).field("mu", &self.mu).field("nu", &self.nu).finish()
    }
}

impl LowFreqApprox {
    pub fn build(coeffs: &CoefficientSet, n: usize, tol: Tolerances) -> Result<Self> {
        let limit = limit_eigenpair(coeffs, n, tol)?;
        let w_left = corrector_left(coeffs, limit.slope_at_zero(), tol)?;
        let nu = nu_coefficient(coeffs, &w_left)?;
        let w_right = corrector_right(coeffs, &limit, nu, w_left.at_zero(), tol)?;
        Ok(LowFreqApprox {
            n,
            mu: limit.mu,
            nu,
            limit,
            w_left: Arc::new(w_left),
            w_right: Arc::new(w_right),
            a: coeffs.a,
            b: coeffs.b,
        })
    }

    /// `u_n` extended by zero to `(a, 0)`.
    pub fn leading(&self) -> PiecewiseFunction {
        PiecewiseFunction::new(self.a, self.b, Arc::new(|_: f64| Jet::default()), self.limit.u.clone())
    }

    pub fn corrector(&self) -> PiecewiseFunction {
        PiecewiseFunction::new(self.a, self.b, self.w_left.clone(), self.w_right.clone())
    }

    /// `sqrt(eps mu)`, the leading-order eigenfrequency.
    pub fn leading_frequency(&self, eps: f64) -> f64 {
        (eps * self.mu).sqrt()
    }
}

/// `(eps mu + eps² nu, u_n + eps w_n)`.
pub fn lowfreq_prediction(approx: &LowFreqApprox, eps: f64) -> (f64, PiecewiseFunction) {
    let lambda = eps * approx.mu + eps * eps * approx.nu;
    (lambda, approx.leading().add_scaled(&approx.corrector(), eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tight() -> Tolerances {
        Tolerances::new(1e-12, 1e-14)
    }

    #[test]
    fn constant_limit_problem() {
        let c = CoefficientSet::constant();
        for n in 1..=4 {
            let lim = limit_eigenpair(&c, n, tight()).unwrap();
            let nf = n as f64;
            assert!((lim.mu - (PI * nf).powi(2)).abs() < 1e-9 * lim.mu);
            for x in [0.1, 0.37, 0.8] {
                let exact = 2f64.sqrt() * (PI * nf * x).sin();
                assert!((lim.u.jet(x).v - exact).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn worked_example_leading_frequencies() {
        let c = CoefficientSet::worked_example();
        let eps: f64 = 0.05;
        let f5 = (eps * limit_eigenpair(&c, 5, Tolerances::default()).unwrap().mu).sqrt();
        let f10 = (eps * limit_eigenpair(&c, 10, Tolerances::default()).unwrap().mu).sqrt();
        assert!((f5 - 2.88055).abs() < 2e-4, "{f5}");
        assert!((f10 - 5.76252).abs() < 2e-4, "{f10}");
    }

    #[test]
    fn left_corrector_closed_forms() {
        let c = CoefficientSet::constant();
        let w = corrector_left(&c, 2.5, tight()).unwrap();
        assert_eq!(w.jet(-1.0).v, 0.0);
        assert!((w.at_zero() - 2.5).abs() < 1e-12);
        assert!((w.jet(-0.4).v - 2.5 * 0.6).abs() < 1e-12);

        let zero = corrector_left(&c, 0.0, tight()).unwrap();
        assert_eq!(zero.jet(-0.3).v, 0.0);
        assert_eq!(nu_coefficient(&c, &zero).unwrap(), 0.0);

        let stiff = CoefficientSet::new(-1.0, 1.0, "2", "1", "1", "1").unwrap();
        let w = corrector_left(&stiff, 3.0, tight()).unwrap();
        assert!((w.at_zero() - 3.0 * 1.0 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn nu_on_constant_coefficients() {
        let c = CoefficientSet::constant();
        for n in 1..=3 {
            let approx = LowFreqApprox::build(&c, n, tight()).unwrap();
            let expected = -2.0 * (PI * n as f64).powi(2);
            assert!((approx.nu - expected).abs() < 1e-8 * expected.abs());
            assert!((approx.w_right.jet(0.0).v - 2f64.sqrt() * PI * n as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn corrector_invariants() {
        let c = CoefficientSet::worked_example();
        for n in [1, 3, 6] {
            let approx = LowFreqApprox::build(&c, n, Tolerances::default()).unwrap();
            assert!(approx.nu <= 0.0);
            assert_eq!(approx.w_right.jet(1.0).v, 0.0);
            let orth = adaptive_quadrature(
                |x| c.rho.value(x) * approx.limit.u.jet(x).v * approx.w_right.jet(x).v,
                0.0,
                1.0,
                1e-12,
            )
            .unwrap();
            assert!(orth.abs() < 1e-8, "n = {n}: {orth}");
            let norm =
                adaptive_quadrature(|x| c.rho.value(x) * approx.limit.u.jet(x).v.powi(2), 0.0, 1.0, 1e-12).unwrap();
            assert!((norm - 1.0).abs() < 1e-8);
            let sup = (0..=100).map(|i| approx.limit.u.jet(i as f64 / 100.0).v.abs()).fold(0.0, f64::max);
            assert!(approx.limit.u.jet(0.0).v.abs() <= 1e-8 * sup);
            assert!(approx.limit.u.jet(1.0).v.abs() <= 1e-8 * sup);
            // interface continuity of the corrector
            let jump = approx.w_right.jet(0.0).v - approx.w_left.at_zero();
            assert!(jump.abs() < 1e-6 * approx.w_left.at_zero().abs().max(1.0));
        }
    }

    #[test]
    fn inconsistent_nu_is_rejected() {
        let c = CoefficientSet::constant();
        let limit = limit_eigenpair(&c, 1, tight()).unwrap();
        let w = corrector_left(&c, limit.slope_at_zero(), tight()).unwrap();
        let nu = nu_coefficient(&c, &w).unwrap();
        let r = corrector_right(&c, &limit, 0.5 * nu, w.at_zero(), tight());
        assert!(matches!(r, Err(Error::Solvability { .. })));
    }

    #[test]
    fn prediction_is_second_order_on_constant_coefficients() {
        // exact: eps pi² / (1 + eps)² = eps pi² - 2 eps² pi² + O(eps³)
        let approx = LowFreqApprox::build(&CoefficientSet::constant(), 1, tight()).unwrap();
        let mut ratios = Vec::new();
        for eps in [0.1, 0.05, 0.025] {
            let (pred, u) = lowfreq_prediction(&approx, eps);
            let exact = eps * PI * PI / (1.0f64 + eps).powi(2);
            ratios.push((pred - exact).abs() / eps.powi(3));
            assert!(u.left_jet(-0.5).v.abs() > 0.0);
            assert!((pred / eps - approx.mu).abs() <= eps * approx.nu.abs() + 1e-12);
        }
        let (pred, _) = lowfreq_prediction(&approx, 0.05);
        assert!((pred - PI * PI * 0.045).abs() < 1e-10);
        assert!(ratios.iter().all(|r| *r < 4.0 * PI * PI));
    }
}
