//! Phase `S`, amplitude `c` and the transport corrector `h` on `[0, b]`.

use std::sync::Arc;

use crate::coeffs::{CoefficientSet, ScalarField};
use crate::error::Result;
use crate::expr::Expr;
use crate::numkernel::{integrate_ivp, DenseSolution, Tolerances};
use crate::profile::Jet;

/// `S(x) = ∫ₓᵇ sqrt(rho/kappa)`, `c = (kappa rho)^{-1/4}` and `h` with
/// `2 kappa S' h' + (kappa S')' h = (kappa c')'`, `h(b) = 0`.
#[derive(Debug, Clone)]
pub struct WkbFrame {
    pub b: f64,
    kappa: ScalarField,
    rho: ScalarField,
    /// `kappa S' = -(kappa rho)^{1/2}`.
    flux_phase: ScalarField,
    pub c: ScalarField,
    /// `kappa c'`.
    flux_amp: ScalarField,
    /// State `(S, h)` integrated from `b` down to 0.
    phase: DenseSolution<2>,
    pub s0: f64,
    pub sp0: f64,
    pub c0: f64,
    pub cp0: f64,
    pub h0: f64,
}

fn product(f: &ScalarField, g: &ScalarField) -> Expr {
    Expr::Mul(Arc::new(f.expr().clone()), Arc::new(g.expr().clone()))
}

impl WkbFrame {
    pub fn new(coeffs: &CoefficientSet, tol: Tolerances) -> Result<Self> {
        let b = coeffs.b;
        let kr = Arc::new(product(&coeffs.kappa, &coeffs.rho));
        let flux_phase = ScalarField::from_expr(Expr::Neg(Arc::new(Expr::Pow(kr.clone(), 0.5))), 0.0, b)?;
        let c = ScalarField::from_expr(Expr::Pow(kr, -0.25), 0.0, b)?;
        let flux_amp = ScalarField::from_expr(
            Expr::Mul(Arc::new(coeffs.kappa.expr().clone()), Arc::new(c.d1_expr().clone())),
            0.0,
            b,
        )?;
        let (fp, fa, kappa) = (&flux_phase, &flux_amp, &coeffs.kappa);
        let phase = integrate_ivp(
            |x, y: &[f64; 2]| [fp.value(x) / kappa.value(x), (fa.d1(x) - fp.d1(x) * y[1]) / (2.0 * fp.value(x))],
            b,
            0.0,
            [0.0, 0.0],
            tol,
        )?;
        let [s0, h0] = phase.end();
        Ok(WkbFrame {
            b,
            kappa: coeffs.kappa.clone(),
            rho: coeffs.rho.clone(),
            sp0: flux_phase.value(0.0) / coeffs.kappa.value(0.0),
            c0: c.value(0.0),
            cp0: c.d1(0.0),
            flux_phase,
            c,
            flux_amp,
            phase,
            s0,
            h0,
        })
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa.value(0.0)
    }

    /// `S` with its first two derivatives.
    pub fn s(&self, x: f64) -> Jet {
        let k = self.kappa.value(x);
        let g = self.flux_phase.value(x);
        Jet { v: self.phase.eval(x)[0], d1: g / k, d2: (self.flux_phase.d1(x) * k - g * self.kappa.d1(x)) / (k * k) }
    }

    pub fn c_jet(&self, x: f64) -> Jet {
        Jet { v: self.c.value(x), d1: self.c.d1(x), d2: self.c.d2(x) }
    }

    /// `h` with derivatives taken from the transport equation.
    pub fn h(&self, x: f64) -> Jet {
        let h = self.phase.eval(x)[1];
        let g = self.flux_phase.value(x);
        let (p, dp) = (self.flux_phase.d1(x), self.flux_phase.d2(x));
        let (q, dq) = (self.flux_amp.d1(x), self.flux_amp.d2(x));
        let d1 = (q - p * h) / (2.0 * g);
        Jet { v: h, d1, d2: (dq - dp * h - 3.0 * p * d1) / (2.0 * g) }
    }

    fn samples(&self, count: usize) -> impl Iterator<Item = f64> + '_ {
        (0..=count).map(move |i| if i == count { self.b } else { self.b * i as f64 / count as f64 })
    }

    /// `sup |kappa S'² - rho|`, with `S'` from the stored phase.
    pub fn eikonal_residual(&self, count: usize) -> f64 {
        self.samples(count)
            .map(|x| {
                let sp = self.phase.eval_derivative(x)[0];
                (self.kappa.value(x) * sp * sp - self.rho.value(x)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `sup |2 kappa S' c' + (kappa S')' c|` and
    /// `sup |2 kappa S' h' + (kappa S')' h - (kappa c')'|`, with `h'` from the stored solution.
    pub fn transport_residuals(&self, count: usize) -> (f64, f64) {
        let mut amp = 0.0f64;
        let mut corr = 0.0f64;
        for x in self.samples(count) {
            let g = self.flux_phase.value(x);
            let p = self.flux_phase.d1(x);
            amp = amp.max((2.0 * g * self.c.d1(x) + p * self.c.value(x)).abs());
            let h = self.phase.eval(x)[1];
            let hp = self.phase.eval_derivative(x)[1];
            corr = corr.max((2.0 * g * hp + p * h - self.flux_amp.d1(x)).abs());
        }
        (amp, corr)
    }
}
