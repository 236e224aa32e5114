//! Dormand–Prince 5(4) with its free fourth-order continuous extension.

use crate::error::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_ABS_TOL: f64 = 1e-12;

const MAX_STEPS: usize = 500_000;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rel: DEFAULT_REL_TOL, abs: DEFAULT_ABS_TOL }
    }
}

impl Tolerances {
    pub fn new(rel: f64, abs: f64) -> Self {
        Tolerances { rel, abs }
    }
}

#[derive(Debug, Clone)]
struct Step<const N: usize> {
    x0: f64,
    h: f64,
    y0: [f64; N],
    y1: [f64; N],
    // continuous-extension coefficients
    r: [[f64; N]; 4],
}

impl<const N: usize> Step<N> {
    fn eval(&self, x: f64) -> [f64; N] {
        let t = (x - self.x0) / self.h;
        let s = 1.0 - t;
        let [ydiff, bspl, r4, r5] = &self.r;
        std::array::from_fn(|i| self.y0[i] + t * (ydiff[i] + s * (bspl[i] + t * (r4[i] + s * r5[i]))))
    }

    fn eval_derivative(&self, x: f64) -> [f64; N] {
        let t = (x - self.x0) / self.h;
        let [ydiff, bspl, r4, r5] = &self.r;
        let c3 = 1.0 - 2.0 * t;
        let c4 = t * (2.0 - 3.0 * t);
        let c5 = 2.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
        std::array::from_fn(|i| (ydiff[i] + c3 * bspl[i] + c4 * r4[i] + c5 * r5[i]) / self.h)
    }

    fn x1(&self) -> f64 {
        self.x0 + self.h
    }
}

/// Piecewise-polynomial solution of an initial-value problem over the
/// integration span, in either direction.
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    x0: f64,
    x1: f64,
    y_start: [f64; N],
    steps: Vec<Step<N>>,
}

impl<const N: usize> DenseSolution<N> {
    pub fn span(&self) -> (f64, f64) {
        (self.x0, self.x1)
    }

    pub fn start(&self) -> [f64; N] {
        self.y_start
    }

    pub fn end(&self) -> [f64; N] {
        self.steps.last().map_or(self.y_start, |s| s.y1)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        std::iter::once(self.x0).chain(self.steps.iter().map(|s| s.x1())).collect()
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    fn locate(&self, x: f64) -> Option<usize> {
        if self.steps.is_empty() {
            return None;
        }
        let forward = self.x1 > self.x0;
        // index of the first step whose end lies beyond x in the direction of travel
        let idx = self.steps.partition_point(|s| if forward { s.x1() < x } else { s.x1() > x });
        Some(idx.min(self.steps.len() - 1))
    }

    /// State at `x`. Values outside the span are extrapolated from the
    /// nearest step; stored breakpoint states are returned verbatim.
    pub fn eval(&self, x: f64) -> [f64; N] {
        if x == self.x0 {
            return self.y_start;
        }
        match self.locate(x) {
            None => self.y_start,
            Some(i) => {
                let step = &self.steps[i];
                if x == step.x1() {
                    step.y1
                } else {
                    step.eval(x)
                }
            }
        }
    }

    /// Derivative of the interpolant at `x`.
    pub fn eval_derivative(&self, x: f64) -> [f64; N] {
        match self.locate(x) {
            None => [0.0; N],
            Some(i) => self.steps[i].eval_derivative(x),
        }
    }

    pub fn component(&self, x: f64, i: usize) -> f64 {
        self.eval(x)[i]
    }

    /// Multiplies every stored state by `factor` (valid for linear homogeneous systems).
    pub fn scale(&mut self, factor: f64) {
        let mul = |v: &mut [f64; N]| v.iter_mut().for_each(|c| *c *= factor);
        mul(&mut self.y_start);
        for s in &mut self.steps {
            mul(&mut s.y0);
            mul(&mut s.y1);
            s.r.iter_mut().for_each(mul);
        }
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|c| c.is_finite())
}

/// Integrates `y' = rhs(x, y)` from `x0` to `x1` with adaptive step control.
pub fn integrate_ivp<const N: usize, F>(
    mut rhs: F,
    x0: f64,
    x1: f64,
    init: [f64; N],
    tol: Tolerances,
) -> Result<DenseSolution<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if x0 == x1 {
        return Err(Error::Invalid("integration span has zero length".into()));
    }
    let dir = (x1 - x0).signum();
    let length = (x1 - x0).abs();
    let mut eval = |x: f64, y: &[f64; N]| -> Result<[f64; N]> {
        let f = rhs(x, y);
        if finite(&f) {
            Ok(f)
        } else {
            Err(Error::NonFiniteRhs { x })
        }
    };

    let mut x = x0;
    let mut y = init;
    let mut k1 = eval(x, &y)?;
    let mut h = dir * initial_step(&y, &k1, length, tol);
    let mut steps = Vec::new();
    let mut err_prev: f64 = 1e-4;
    let mut rejected_last = false;

    for _ in 0..MAX_STEPS {
        let remaining = x1 - x;
        if remaining.abs() <= 1e-14 * length.max(x1.abs()) {
            break;
        }
        let mut last = false;
        if (h.abs() >= remaining.abs()) || (x + h - x1) * dir >= 0.0 {
            h = remaining;
            last = true;
        }
        if h.abs() < 1e-15 * x.abs().max(1.0) * 16.0 {
            return Err(Error::StepUnderflow { x, h });
        }

        let k2 = eval(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]))?;
        let k3 = eval(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = eval(x + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = eval(x + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = eval(x + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let x_new = if last { x1 } else { x + h };
        let k7 = eval(x_new, &y_new)?;

        let mut err = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();

        if err <= 1.0 {
            // PI controller (Hairer's beta = 0.04)
            let fac = 0.9 * err.max(1e-10).powf(-0.2 + 0.04 * 0.75) * err_prev.powf(0.04);
            let fac = fac.clamp(0.2, if rejected_last { 1.0 } else { 10.0 });
            err_prev = err.max(1e-4);

            let ydiff: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
            let bspl: [f64; N] = std::array::from_fn(|i| h * k1[i] - ydiff[i]);
            let r4: [f64; N] = std::array::from_fn(|i| ydiff[i] - h * k7[i] - bspl[i]);
            let r5: [f64; N] = std::array::from_fn(|i| {
                h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
            });
            steps.push(Step { x0: x, h: x_new - x, y0: y, y1: y_new, r: [ydiff, bspl, r4, r5] });

            x = x_new;
            y = y_new;
            k1 = k7;
            rejected_last = false;
            if last {
                return Ok(DenseSolution { x0, x1, y_start: init, steps });
            }
            h *= fac;
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            h *= fac;
            rejected_last = true;
        }
    }
    if (x - x1).abs() <= 1e-14 * length.max(x1.abs()) {
        return Ok(DenseSolution { x0, x1, y_start: init, steps });
    }
    Err(Error::TooManySteps(MAX_STEPS))
}

fn initial_step<const N: usize>(y: &[f64; N], f: &[f64; N], length: f64, tol: Tolerances) -> f64 {
    let mut dn = 0.0;
    let mut fnorm = 0.0;
    for i in 0..N {
        let sc = tol.abs + tol.rel * y[i].abs();
        dn += (y[i] / sc).powi(2);
        fnorm += (f[i] / sc).powi(2);
    }
    let (dn, fnorm) = ((dn / N as f64).sqrt(), (fnorm / N as f64).sqrt());
    let h = if dn < 1e-5 || fnorm < 1e-5 { 1e-6 } else { 0.01 * dn / fnorm };
    h.min(length).min(0.01 * length.max(1e-3)).max(1e-12 * length)
}
