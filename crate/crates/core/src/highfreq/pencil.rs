//! The stiff-side pencil `(k v')' + omega² r v = 0`, `v(a) = 0`, and the
//! phase shift `delta(omega)` it induces at the interface.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use log::debug;

use super::wkb::WkbFrame;
use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::numkernel::{adaptive_quadrature, integrate_ivp, Tolerances, DEFAULT_QUAD_TOL};
use crate::profile::{Branch, SturmBranch};

const DEGENERATE_V: f64 = 1e-10;
const DEGENERATE_MU: f64 = 1e-10;
const SUP_SAMPLES: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    Regular,
    /// `v(0) = 0`: Dirichlet frequency of the stiff part.
    DeltaZero,
    /// `v'(0) = 0`.
    DeltaHalfPi,
}

#[derive(Clone)]
pub struct PencilSolution {
    pub omega: f64,
    /// `mu(omega) = -k(0) v'(0) / v(0)`; `None` when `v(0) = 0`.
    pub mu: Option<f64>,
    pub delta: f64,
    pub v0: Arc<SturmBranch>,
    pub v0_at0: f64,
    pub v0p_at0: f64,
    pub degenerate: Degeneracy,
    pub a: f64,
}

impl std::fmt::Debug for PencilSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PencilSolution")
            .field("omega", &self.omega)
            .field("mu", &self.mu)
            .field("delta", &self.delta)
            .field("v0_at0", &self.v0_at0)
            .field("v0p_at0", &self.v0p_at0)
            .field("degenerate", &self.degenerate)
            .finish()
    }
}

pub fn pencil_solve(coeffs: &CoefficientSet, frame: &WkbFrame, omega: f64, tol: Tolerances) -> Result<PencilSolution> {
    if !(omega > 0.0) {
        return Err(Error::Invalid(format!("pencil frequency must be positive, got {omega}")));
    }
    let (k, r, a) = (&coeffs.k, &coeffs.r, coeffs.a);
    let w2 = omega * omega;
    let mut sol =
        integrate_ivp(|x, y: &[f64; 2]| [y[1] / k.value(x), -w2 * r.value(x) * y[0]], a, 0.0, [0.0, k.value(a)], tol)?;
    let norm_sq = adaptive_quadrature(|x| r.value(x) * sol.eval(x)[0].powi(2), a, 0.0, DEFAULT_QUAD_TOL)?;
    sol.scale(1.0 / norm_sq.sqrt());
    let sup =
        (0..=SUP_SAMPLES).map(|i| sol.eval(a * (1.0 - i as f64 / SUP_SAMPLES as f64))[0].abs()).fold(0.0, f64::max);
    let [v, flux] = sol.end();
    let k0 = k.value(0.0);
    let scale = omega * frame.kappa0() * frame.sp0.abs();
    let (mu, delta, degenerate) = if v.abs() <= DEGENERATE_V * sup {
        (None, 0.0, Degeneracy::DeltaZero)
    } else {
        let mu = -flux / v;
        if mu.abs() <= DEGENERATE_MU {
            debug!("pencil at omega = {omega} has delta = pi/2");
            (Some(mu), FRAC_PI_2, Degeneracy::DeltaHalfPi)
        } else {
            (Some(mu), (scale / mu).atan(), Degeneracy::Regular)
        }
    };
    let v0 = SturmBranch { sol, p: k.clone(), p_scale: 1.0, w: r.clone(), w_scale: 1.0, lambda: w2 };
    Ok(PencilSolution { omega, mu, delta, v0_at0: v, v0p_at0: flux / k0, v0: Arc::new(v0), degenerate, a })
}

impl PencilSolution {
    /// `k(0) v'(0) sin delta - omega kappa(0) S'(0) v(0) cos delta`.
    pub fn boundary_relation(&self, coeffs: &CoefficientSet, frame: &WkbFrame) -> f64 {
        coeffs.k.value(0.0) * self.v0p_at0 * self.delta.sin()
            - self.omega * frame.kappa0() * frame.sp0 * self.v0_at0 * self.delta.cos()
    }

    /// `sup |(k v')' + omega² r v|` over the stiff part.
    pub fn ode_residual(&self, coeffs: &CoefficientSet, count: usize) -> f64 {
        (0..=count)
            .map(|i| {
                let x = self.a * (1.0 - i as f64 / count as f64);
                let j = self.v0.jet(x);
                let (k, dk) = (coeffs.k.value(x), coeffs.k.d1(x));
                (dk * j.d1 + k * j.d2 + self.omega.powi(2) * coeffs.r.value(x) * j.v).abs()
            })
            .fold(0.0, f64::max)
    }
}
