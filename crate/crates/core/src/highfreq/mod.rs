//! Short-wave approximation of the eigenpairs.
//!
//! On the soft part the eigenfunction is sought as
//! `beta0 (c sin(gamma S) + eps omega⁻¹ h cos(gamma S))` with
//! `gamma = omega / eps + omega1`, glued to the stiff-side solution `v0` of the
//! pencil. Matching at the interface gives the phase shift `delta(omega)`, the
//! quantization condition `gamma S(0) - delta = pi l` and, at the next order,
//! a solvability condition that fixes `omega1(omega)`.

pub mod pencil;
pub mod wkb;

use std::sync::Arc;

use log::debug;

pub use pencil::{pencil_solve, Degeneracy, PencilSolution};
pub use wkb::WkbFrame;

use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::numkernel::{brent_root_fallible, Tolerances};
use crate::profile::{Branch, Jet, PiecewiseFunction};

/// Relative size below which the affine coefficient of `omega1` counts as zero.
pub const RESONANCE_TOL: f64 = 1e-10;
/// Scan step of the quantization search, in units of `eps pi / S(0)`.
pub const SCAN_STEP: f64 = 0.05;
/// A refined sign change is a root only if `|F|` is below this there.
pub const ROOT_RESIDUAL: f64 = 1e-6;

pub fn build_wkb_frame(coeffs: &CoefficientSet, tol: Tolerances) -> Result<WkbFrame> {
    WkbFrame::new(coeffs, tol)
}

/// `g1`, `g2` and `f` of the interface matching, affine in `omega1`.
///
/// `g2` is kept exactly as its defining combination; the amplitude `beta0`
/// (without its `(-1)^l` factor) multiplies it inside `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolvabilityData {
    pub beta0: f64,
    pub g1: f64,
    pub g2_const: f64,
    pub g2_lin: f64,
    pub f_const: f64,
    pub f_lin: f64,
}

impl SolvabilityData {
    pub fn g2(&self, omega1: f64) -> f64 {
        self.g2_const + self.g2_lin * omega1
    }

    pub fn f(&self, omega1: f64) -> f64 {
        self.f_const + self.f_lin * omega1
    }
}

/// `beta0` without the `(-1)^l` factor.
fn beta0_reduced(pencil: &PencilSolution, frame: &WkbFrame, k0: f64) -> Result<f64> {
    match pencil.degenerate {
        Degeneracy::DeltaZero => Ok(k0 * pencil.v0p_at0 / (pencil.omega * frame.kappa0() * frame.sp0 * frame.c0)),
        Degeneracy::DeltaHalfPi if pencil.v0_at0 == 0.0 => Err(Error::HalfPiInconsistent { omega: pencil.omega }),
        _ => Ok(pencil.v0_at0 / (frame.c0 * pencil.delta.sin())),
    }
}

/// Amplitude of the soft-side wave for quantization index `l`.
pub fn beta0_of(coeffs: &CoefficientSet, pencil: &PencilSolution, frame: &WkbFrame, l: i64) -> Result<f64> {
    let parity = if l.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(parity * beta0_reduced(pencil, frame, coeffs.k.value(0.0))?)
}

/// The closed-form display for `omega1`, kept for comparison only.
pub fn omega1_display(pencil: &PencilSolution, frame: &WkbFrame) -> f64 {
    let (s, c) = pencil.delta.sin_cos();
    let v = pencil.v0_at0;
    (frame.h0 * frame.sp0 - frame.cp0 * s * s) * v * v
        / ((2.0 * pencil.omega + frame.kappa0() * frame.sp0 * c) * frame.c0 * s)
}

/// `omega1(omega)` from `v0(0) kappa(0) f / sin(delta) = -2 omega omega1`.
pub fn omega1_of(coeffs: &CoefficientSet, pencil: &PencilSolution, frame: &WkbFrame) -> Result<(f64, SolvabilityData)> {
    let w = pencil.omega;
    let k0 = coeffs.k.value(0.0);
    let kappa0 = frame.kappa0();
    let beta0 = beta0_reduced(pencil, frame, k0)?;
    let (s, c) = pencil.delta.sin_cos();
    let (sp, c0, cp, h0) = (frame.sp0, frame.c0, frame.cp0, frame.h0);
    let g1 = beta0 * h0 * c / w;
    let g2_const = (cp - sp * h0) * s;
    let g2_lin = sp * c0 * c;
    let data = SolvabilityData {
        beta0,
        g1,
        g2_const,
        g2_lin,
        f_const: beta0 * g2_const * s - w * sp * g1 * c,
        f_lin: beta0 * g2_lin * s,
    };
    if pencil.degenerate == Degeneracy::DeltaZero {
        let flux = k0 * pencil.v0p_at0;
        let omega1 = flux * flux * h0 / (2.0 * w.powi(3) * kappa0 * sp * c0);
        return Ok((omega1, data));
    }
    let m = pencil.v0_at0 * kappa0 / s;
    let lin = 2.0 * w + m * data.f_lin;
    if lin.abs() <= RESONANCE_TOL * (2.0 * w).max(1.0) {
        return Err(Error::Resonant { omega: w, coefficient: lin });
    }
    let omega1 = -m * data.f_const / lin;
    let display = omega1_display(pencil, frame);
    if (display - omega1).abs() > 1e-6 * omega1.abs().max(display.abs()) {
        debug!("omega1 at omega = {w}: solvability {omega1}, closed-form display {display}");
    }
    Ok((omega1, data))
}

/// `F(omega) = (omega / eps + omega1) S(0) - delta - pi l`.
pub fn quantization_residual(
    coeffs: &CoefficientSet,
    frame: &WkbFrame,
    epsilon: f64,
    l: i64,
    omega: f64,
    tol: Tolerances,
) -> Result<f64> {
    let p = pencil_solve(coeffs, frame, omega, tol)?;
    let (omega1, _) = omega1_of(coeffs, &p, frame)?;
    Ok((omega / epsilon + omega1) * frame.s0 - p.delta - std::f64::consts::PI * l as f64)
}

/// Roots of the quantization equation for index `l`, ascending.
pub fn quantization_roots(
    coeffs: &CoefficientSet,
    frame: &WkbFrame,
    epsilon: f64,
    l: i64,
    lo: f64,
    hi: f64,
    tol: Tolerances,
) -> Result<Vec<f64>> {
    let step = SCAN_STEP * epsilon * std::f64::consts::PI / frame.s0;
    let eval = |w: f64| match quantization_residual(coeffs, frame, epsilon, l, w, tol) {
        Err(Error::Resonant { .. }) | Err(Error::HalfPiInconsistent { .. }) => Ok(f64::NAN),
        other => other,
    };
    let cells = ((hi - lo) / step).ceil().max(1.0) as usize;
    let mut roots = Vec::new();
    let mut prev = (lo, eval(lo)?);
    for i in 1..=cells {
        let w = (lo + step * i as f64).min(hi);
        let cur = (w, eval(w)?);
        if prev.1.is_finite() && cur.1.is_finite() && prev.1.signum() != cur.1.signum() {
            let root = brent_root_fallible(eval, prev.0, cur.0, 1e-14 * cur.0)?;
            let at = eval(root)?;
            if at.abs() <= ROOT_RESIDUAL * (l as f64).abs().max(1.0) {
                roots.push(root);
            }
        }
        prev = cur;
    }
    Ok(roots)
}

/// Admissible frequency for index `l`: the largest root of the quantization equation.
#[derive(Debug, Clone)]
pub struct AdmissibleSeed {
    pub l: i64,
    pub omega: f64,
    pub omega1: f64,
    pub delta: f64,
    pub beta0: f64,
    pub roots: Vec<f64>,
    pub pencil: PencilSolution,
    pub solvability: SolvabilityData,
}

pub fn admissible_frequency(
    coeffs: &CoefficientSet,
    frame: &WkbFrame,
    epsilon: f64,
    l: i64,
    tol: Tolerances,
) -> Result<AdmissibleSeed> {
    if l < 1 {
        return Err(Error::Invalid(format!("quantization index must be positive, got {l}")));
    }
    let unit = epsilon * std::f64::consts::PI / frame.s0;
    let (mut lo, mut hi) = ((l as f64 - 1.0) * unit, (l as f64 + 2.0) * unit);
    lo = lo.max(0.25 * SCAN_STEP * unit);
    let mut roots = quantization_roots(coeffs, frame, epsilon, l, lo, hi, tol)?;
    if roots.is_empty() {
        let width = hi - lo;
        lo = (lo - 0.5 * width).max(0.25 * SCAN_STEP * unit);
        hi += 0.5 * width;
        roots = quantization_roots(coeffs, frame, epsilon, l, lo, hi, tol)?;
    }
    let omega = *roots.last().ok_or(Error::NoAdmissibleRoot { l, lo, hi })?;
    let pencil = pencil_solve(coeffs, frame, omega, tol)?;
    let (omega1, solvability) = omega1_of(coeffs, &pencil, frame)?;
    let beta0 = beta0_of(coeffs, &pencil, frame, l)?;
    Ok(AdmissibleSeed { l, omega, omega1, delta: pencil.delta, beta0, roots, pencil, solvability })
}

struct SoftWave {
    frame: Arc<WkbFrame>,
    beta0: f64,
    gamma: f64,
    /// `eps / omega`.
    weight: f64,
}

impl Branch for SoftWave {
    fn jet(&self, x: f64) -> Jet {
        let s = self.frame.s(x);
        let c = self.frame.c_jet(x);
        let h = self.frame.h(x);
        let (t, t1, t2) = (self.gamma * s.v, self.gamma * s.d1, self.gamma * s.d2);
        let (sn, cs) = t.sin_cos();
        let lead = Jet {
            v: c.v * sn,
            d1: c.d1 * sn + c.v * t1 * cs,
            d2: c.d2 * sn + 2.0 * c.d1 * t1 * cs + c.v * t2 * cs - c.v * t1 * t1 * sn,
        };
        let corr = Jet {
            v: h.v * cs,
            d1: h.d1 * cs - h.v * t1 * sn,
            d2: h.d2 * cs - 2.0 * h.d1 * t1 * sn - h.v * t2 * sn - h.v * t1 * t1 * cs,
        };
        (lead + corr.scaled(self.weight)).scaled(self.beta0)
    }
}

/// The assembled short-wave eigenpair approximation.
#[derive(Clone)]
pub struct HighFreqApprox {
    pub l: i64,
    pub epsilon: f64,
    pub omega: f64,
    pub omega1: f64,
    pub delta: f64,
    pub beta0: f64,
    pub gamma: f64,
    pub lambda_pred: f64,
    pub degenerate: Degeneracy,
    pub roots: Vec<f64>,
    pub y: PiecewiseFunction,
}

impl std::fmt::Debug for HighFreqApprox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HighFreqApprox")
            .field("l", &self.l)
            .field("epsilon", &self.epsilon)
            .field("omega", &self.omega)
            .field("omega1", &self.omega1)
            .field("delta", &self.delta)
            .field("beta0", &self.beta0)
            .field("lambda_pred", &self.lambda_pred)
            .finish()
    }
}

impl HighFreqApprox {
    /// `omega / sqrt(eps) + sqrt(eps) omega1`, the predicted eigenfrequency.
    pub fn frequency(&self) -> f64 {
        self.lambda_pred.sqrt()
    }

    /// `(gamma S(0) - delta) - pi l`.
    pub fn quantization_defect(&self, frame: &WkbFrame) -> f64 {
        self.gamma * frame.s0 - self.delta - std::f64::consts::PI * self.l as f64
    }

    /// Relative `L²(0, b)` size of `eps (kappa Y')' + eps gamma² rho Y`.
    pub fn soft_residual(&self, coeffs: &CoefficientSet) -> Result<f64> {
        let eps = self.epsilon;
        let g2 = self.gamma * self.gamma;
        let tol = 1e-10;
        let res = crate::numkernel::adaptive_quadrature(
            |x| {
                let j = self.y.right_jet(x);
                let kp = coeffs.kappa.value(x);
                let flux_d = coeffs.kappa.d1(x) * j.d1 + kp * j.d2;
                (eps * flux_d + eps * g2 * coeffs.rho.value(x) * j.v).powi(2)
            },
            0.0,
            coeffs.b,
            tol,
        )?;
        let size = crate::numkernel::adaptive_quadrature(
            |x| (eps * g2 * coeffs.rho.value(x) * self.y.right_jet(x).v).powi(2),
            0.0,
            coeffs.b,
            tol,
        )?;
        Ok((res / size).sqrt())
    }
}

pub fn build_y(coeffs: &CoefficientSet, frame: &WkbFrame, seed: &AdmissibleSeed, epsilon: f64) -> HighFreqApprox {
    let gamma = seed.omega / epsilon + seed.omega1;
    let soft = SoftWave { frame: Arc::new(frame.clone()), beta0: seed.beta0, gamma, weight: epsilon / seed.omega };
    let y = PiecewiseFunction::new(coeffs.a, coeffs.b, seed.pencil.v0.clone(), Arc::new(soft));
    HighFreqApprox {
        l: seed.l,
        epsilon,
        omega: seed.omega,
        omega1: seed.omega1,
        delta: seed.delta,
        beta0: seed.beta0,
        gamma,
        lambda_pred: epsilon * gamma * gamma,
        degenerate: seed.pencil.degenerate,
        roots: seed.roots.clone(),
        y,
    }
}

/// Frame, admissible frequency and `Y` in one call.
pub fn highfreq_approx(coeffs: &CoefficientSet, epsilon: f64, l: i64, tol: Tolerances) -> Result<HighFreqApprox> {
    let frame = build_wkb_frame(coeffs, tol)?;
    let seed = admissible_frequency(coeffs, &frame, epsilon, l, tol)?;
    Ok(build_y(coeffs, &frame, &seed, epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn constant_coefficients_have_no_first_correction() {
        let c = CoefficientSet::constant();
        let f = build_wkb_frame(&c, tol()).unwrap();
        for w in [0.3, 0.7, 1.1, 2.0] {
            let p = pencil_solve(&c, &f, w, tol()).unwrap();
            let (o1, data) = omega1_of(&c, &p, &f).unwrap();
            assert!(o1.abs() < 1e-14);
            assert_eq!(data.g1, 0.0);
        }
    }

    #[test]
    fn constant_admissible_frequencies() {
        let c = CoefficientSet::constant();
        let f = build_wkb_frame(&c, tol()).unwrap();
        let eps = 0.05;
        let seed = admissible_frequency(&c, &f, eps, 5, tol()).unwrap();
        let expected = eps * PI * 5.0 / (1.0 + eps);
        assert!((seed.omega - expected).abs() < 1e-10);
        assert!((seed.omega / eps.sqrt() - 3.3451499).abs() < 1e-7);
    }

    #[test]
    fn constant_residual_closed_form() {
        let c = CoefficientSet::constant();
        let f = build_wkb_frame(&c, tol()).unwrap();
        for w in [0.2, 0.55, 0.9] {
            let got = quantization_residual(&c, &f, 0.05, 4, w, tol()).unwrap();
            let expected = w / 0.05 - (-w).tan().atan() - 4.0 * PI;
            assert!((got - expected).abs() < 1e-8);
        }
    }

    #[test]
    fn beta0_parity_and_closed_form() {
        let c = CoefficientSet::constant();
        let f = build_wkb_frame(&c, tol()).unwrap();
        let p = pencil_solve(&c, &f, PI / 4.0, tol()).unwrap();
        let even = beta0_of(&c, &p, &f, 4).unwrap();
        assert!((even + 2f64.sqrt() * p.v0_at0).abs() < 1e-8);
        assert_eq!(beta0_of(&c, &p, &f, 5).unwrap(), -even);
    }

    #[test]
    fn beta0_continuous_through_dirichlet_frequency() {
        let c = CoefficientSet::constant();
        let f = build_wkb_frame(&c, tol()).unwrap();
        let t = Tolerances::new(1e-13, 1e-15);
        let at = beta0_of(&c, &pencil_solve(&c, &f, PI, t).unwrap(), &f, 2).unwrap();
        let near = beta0_of(&c, &pencil_solve(&c, &f, PI * (1.0 + 1e-6), t).unwrap(), &f, 2).unwrap();
        assert!((at - near).abs() < 1e-4, "{at} {near}");
    }

    #[test]
    fn omega1_continuous_through_dirichlet_frequency() {
        // stiff side k = 1, r = 1 has v(0) = sin(omega); soft side is non-uniform
        let c = CoefficientSet::new(-1.0, 1.0, "1", "1", "1", "1+x").unwrap();
        let f = build_wkb_frame(&c, tol()).unwrap();
        let t = Tolerances::new(1e-13, 1e-15);
        let p = pencil_solve(&c, &f, PI, t).unwrap();
        assert_eq!(p.degenerate, Degeneracy::DeltaZero);
        let at = omega1_of(&c, &p, &f).unwrap().0;
        for d in [1e-5, -1e-5] {
            let near = omega1_of(&c, &pencil_solve(&c, &f, PI * (1.0 + d), t).unwrap(), &f).unwrap().0;
            assert!((at - near).abs() < 1e-3 * at.abs().max(1.0), "{at} {near}");
        }
    }

    #[test]
    fn solvability_data_reconstruction() {
        let c = CoefficientSet::worked_example();
        let f = build_wkb_frame(&c, tol()).unwrap();
        let p = pencil_solve(&c, &f, 0.9, tol()).unwrap();
        let (o1, d) = omega1_of(&c, &p, &f).unwrap();
        let (s, co) = p.delta.sin_cos();
        for w1 in [-0.3, 0.0, o1, 1.7] {
            let def = w1 * f.sp0 * f.c0 * co + (f.cp0 - f.sp0 * f.h0) * s;
            assert!((d.g2(w1) - def).abs() < 1e-10);
        }
        assert!((p.v0_at0 * f.kappa0() * d.f(o1) / s + 2.0 * p.omega * o1).abs() < 1e-10);
    }

    #[test]
    fn worked_example_admissible() {
        let c = CoefficientSet::worked_example();
        let eps = 0.05;
        let f = build_wkb_frame(&c, tol()).unwrap();
        for (l, omega, freq) in [(5, 0.617262, 2.766850), (10, 1.229970, 5.526794)] {
            let seed = admissible_frequency(&c, &f, eps, l, tol()).unwrap();
            assert!((seed.omega - omega).abs() < 2e-6, "{}", seed.omega);
            let hf = build_y(&c, &f, &seed, eps);
            assert!((hf.frequency() - freq).abs() < 2e-5, "{}", hf.frequency());
            assert!(hf.quantization_defect(&f).abs() < 1e-8);
            assert!(hf.y.value(c.a).abs() < 1e-12);
            assert_eq!(hf.y.value(c.b), 0.0);
            let sup = hf.y.sample(801).iter().map(|p| p.1.abs()).fold(0.0, f64::max);
            let jump = (hf.y.plus0().v - hf.y.minus0().v).abs();
            assert!(jump <= 10.0 * eps * eps * sup, "{jump} {sup}");
        }
    }

    #[test]
    fn residual_increases_at_rate_of_phase() {
        let c = CoefficientSet::worked_example();
        let f = build_wkb_frame(&c, tol()).unwrap();
        let eps = 0.05;
        let (w, dw) = (0.8, 1e-5);
        let lo = quantization_residual(&c, &f, eps, 7, w - dw, tol()).unwrap();
        let hi = quantization_residual(&c, &f, eps, 7, w + dw, tol()).unwrap();
        let slope = (hi - lo) / (2.0 * dw);
        assert!((slope / (f.s0 / eps) - 1.0).abs() < 0.2, "{slope}");
    }

    #[test]
    fn soft_residual_shrinks_with_eps() {
        let c = CoefficientSet::worked_example();
        let coarse = highfreq_approx(&c, 0.05, 10, tol()).unwrap();
        let fine = highfreq_approx(&c, 0.025, 20, tol()).unwrap();
        assert!(fine.soft_residual(&c).unwrap() < coarse.soft_residual(&c).unwrap());
    }
}
