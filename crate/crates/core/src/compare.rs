//! Exact spectrum against both asymptotic approximations: table rows,
//! convergence sweeps, operator residuals and sampled eigenfunctions.

use std::collections::BTreeMap;

use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::exact::{eigenfunction, eigenvalue, NormMode, ProblemInstance};
use crate::highfreq::{
    admissible_frequency, build_wkb_frame, build_y, pencil_solve, Degeneracy, HighFreqApprox, WkbFrame,
};
use crate::lowfreq::{lowfreq_prediction, LowFreqApprox};
use crate::numkernel::{adaptive_quadrature, DEFAULT_QUAD_TOL};
use crate::profile::PiecewiseFunction;

/// How an exact eigenvalue was matched to an admissible frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// Within half a root spacing of the nearest admissible frequency.
    Paired,
    /// No admissible frequency nearby because `delta` passes through `pi/2` there.
    DeltaHalfPi,
    /// No admissible frequency nearby for another reason.
    Anomalous,
}

impl Pairing {
    pub fn as_str(self) -> &'static str {
        match self {
            Pairing::Paired => "paired",
            Pairing::DeltaHalfPi => "delta_half_pi",
            Pairing::Anomalous => "anomalous",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub n: usize,
    /// Quantization index of the admissible frequency used.
    pub l: i64,
    pub sqrt_exact: f64,
    pub sqrt_lowfreq: f64,
    pub omega: f64,
    pub omega1: f64,
    pub delta: f64,
    pub sqrt_highfreq: f64,
    pub pairing: Pairing,
}

impl ComparisonRow {
    pub fn lowfreq_error(&self) -> f64 {
        (self.sqrt_exact - self.sqrt_lowfreq).abs()
    }

    pub fn highfreq_error(&self) -> f64 {
        (self.sqrt_exact - self.sqrt_highfreq).abs()
    }
}

/// Admissible frequencies by index, computed on demand.
pub struct AdmissibleCache<'a> {
    inst: &'a ProblemInstance,
    pub frame: WkbFrame,
    entries: BTreeMap<i64, Option<HighFreqApprox>>,
}

impl<'a> AdmissibleCache<'a> {
    pub fn new(inst: &'a ProblemInstance) -> Result<Self> {
        Ok(AdmissibleCache { inst, frame: build_wkb_frame(&inst.coeffs, inst.tol)?, entries: BTreeMap::new() })
    }

    /// `None` when the index has no root.
    pub fn get(&mut self, l: i64) -> Result<Option<&HighFreqApprox>> {
        if !self.entries.contains_key(&l) {
            let c = &self.inst.coeffs;
            let entry = match admissible_frequency(c, &self.frame, self.inst.epsilon, l, self.inst.tol) {
                Ok(seed) => Some(build_y(c, &self.frame, &seed, self.inst.epsilon)),
                Err(Error::NoAdmissibleRoot { .. }) => None,
                Err(e) => return Err(e),
            };
            self.entries.insert(l, entry);
        }
        Ok(self.entries[&l].as_ref())
    }

    /// Nearest admissible approximation to the eigenfrequency `sqrt_lambda`.
    pub fn nearest(&mut self, sqrt_lambda: f64) -> Result<(HighFreqApprox, Pairing)> {
        let eps = self.inst.epsilon;
        let s0 = self.frame.s0;
        let centre = (eps.sqrt() * sqrt_lambda * s0 / (eps * std::f64::consts::PI)).round() as i64;
        let mut found = Vec::new();
        for l in (centre - 2).max(1)..=centre + 2 {
            if let Some(hf) = self.get(l)? {
                found.push(hf.clone());
            }
        }
        let best = found
            .iter()
            .min_by(|x, y| {
                let dx = (x.frequency() - sqrt_lambda).abs();
                let dy = (y.frequency() - sqrt_lambda).abs();
                dx.total_cmp(&dy)
            })
            .cloned()
            .ok_or(Error::NoAdmissibleRoot { l: centre, lo: 0.0, hi: 0.0 })?;
        let half_gap = eps.sqrt() * std::f64::consts::PI / (2.0 * s0);
        if (best.frequency() - sqrt_lambda).abs() <= half_gap {
            let pairing =
                if best.degenerate == Degeneracy::DeltaHalfPi { Pairing::DeltaHalfPi } else { Pairing::Paired };
            return Ok((best, pairing));
        }
        let below = found.iter().filter(|h| h.frequency() < sqrt_lambda).max_by(|x, y| x.omega.total_cmp(&y.omega));
        let above = found.iter().filter(|h| h.frequency() > sqrt_lambda).min_by(|x, y| x.omega.total_cmp(&y.omega));
        let pairing = match (below, above) {
            (Some(lo), Some(hi)) => {
                let c = &self.inst.coeffs;
                let plo = pencil_solve(c, &self.frame, lo.omega, self.inst.tol)?;
                let phi = pencil_solve(c, &self.frame, hi.omega, self.inst.tol)?;
                let mu_flips = matches!((plo.mu, phi.mu), (Some(a), Some(b)) if a.signum() != b.signum());
                if mu_flips && plo.v0_at0.signum() == phi.v0_at0.signum() {
                    Pairing::DeltaHalfPi
                } else {
                    Pairing::Anomalous
                }
            }
            _ => Pairing::Anomalous,
        };
        Ok((best, pairing))
    }
}

/// One row per index: exact, low- and high-frequency eigenfrequencies.
pub fn comparison_table(inst: &ProblemInstance, ns: &[usize]) -> Result<Vec<ComparisonRow>> {
    if ns.is_empty() {
        return Err(Error::Invalid("no indices requested".into()));
    }
    let mut cache = AdmissibleCache::new(inst)?;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let sqrt_exact = eigenvalue(inst, n)?.sqrt();
        let low = LowFreqApprox::build(&inst.coeffs, n, inst.tol)?;
        let (hf, pairing) = cache.nearest(sqrt_exact)?;
        rows.push(ComparisonRow {
            n,
            l: hf.l,
            sqrt_exact,
            sqrt_lowfreq: low.leading_frequency(inst.epsilon),
            omega: hf.omega,
            omega1: hf.omega1,
            delta: hf.delta,
            sqrt_highfreq: hf.frequency(),
            pairing,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    LowfreqEigenvalue,
    LowfreqEigenfunction,
    HighfreqEigenvalue,
}

impl Quantity {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "lowfreq-eigenvalue" => Quantity::LowfreqEigenvalue,
            "lowfreq-eigenfunction" => Quantity::LowfreqEigenfunction,
            "highfreq-eigenvalue" => Quantity::HighfreqEigenvalue,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub n: usize,
    pub which: Quantity,
    pub epsilons: Vec<f64>,
    pub errors: Vec<f64>,
    pub fitted_slope: f64,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Plain `L²` distance after flipping `g` to agree in sign with `f`.
pub fn aligned_distance(f: &PiecewiseFunction, g: &PiecewiseFunction) -> Result<f64> {
    let tol = DEFAULT_QUAD_TOL;
    let sign = if f.l2_inner(g, tol)? < 0.0 { -1.0 } else { 1.0 };
    f.add_scaled(g, -sign).l2_norm(tol)
}

pub fn convergence_study(
    coeffs: &CoefficientSet,
    n: usize,
    epsilons: &[f64],
    which: Quantity,
    tol: crate::numkernel::Tolerances,
) -> Result<ConvergenceReport> {
    if epsilons.len() < 3 {
        return Err(Error::Invalid("a convergence study needs at least three epsilons".into()));
    }
    if epsilons.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Invalid("epsilons must be strictly decreasing".into()));
    }
    let low = LowFreqApprox::build(coeffs, n, tol)?;
    let mut errors = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let inst = ProblemInstance::new(coeffs.clone(), eps)?.with_tolerances(tol);
        let err = match which {
            Quantity::LowfreqEigenvalue => (eigenvalue(&inst, n)? - eps * low.mu).abs(),
            Quantity::LowfreqEigenfunction => {
                let exact = eigenfunction(&inst, n, NormMode::Weighted)?;
                let (_, pred) = lowfreq_prediction(&low, eps);
                aligned_distance(&pred, &exact.u)?
            }
            Quantity::HighfreqEigenvalue => {
                let frame = build_wkb_frame(coeffs, tol)?;
                let seed = admissible_frequency(coeffs, &frame, eps, n as i64, tol)?;
                (eigenvalue(&inst, n)? - build_y(coeffs, &frame, &seed, eps).lambda_pred).abs()
            }
        };
        errors.push(err);
    }
    Ok(ConvergenceReport {
        n,
        which,
        fitted_slope: loglog_slope(epsilons, &errors),
        epsilons: epsilons.to_vec(),
        errors,
    })
}

/// Residuals of `f` as an approximate eigenfunction at `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    /// `(∫ₐ⁰ r⁻¹ |(k f')' + eps lambda r f|² + ∫₀ᵇ rho⁻¹ |eps (kappa f')' + lambda rho f|²)^{1/2}`.
    pub interior: f64,
    /// `|f(+0) - f(-0)|`.
    pub jump0: f64,
    /// `|k(0) f'(-0) - eps kappa(0) f'(+0)|`.
    pub jump_flux: f64,
}

pub fn residual_norm(inst: &ProblemInstance, f: &PiecewiseFunction, lambda: f64) -> Result<Residual> {
    let c = &inst.coeffs;
    let eps = inst.epsilon;
    let tol = DEFAULT_QUAD_TOL;
    let left = adaptive_quadrature(
        |x| {
            let j = f.left_jet(x);
            let res = c.k.d1(x) * j.d1 + c.k.value(x) * j.d2 + eps * lambda * c.r.value(x) * j.v;
            res * res / c.r.value(x)
        },
        c.a,
        0.0,
        tol,
    )?;
    let right = adaptive_quadrature(
        |x| {
            let j = f.right_jet(x);
            let res = eps * (c.kappa.d1(x) * j.d1 + c.kappa.value(x) * j.d2) + lambda * c.rho.value(x) * j.v;
            res * res / c.rho.value(x)
        },
        0.0,
        c.b,
        tol,
    )?;
    let (m, p) = (f.minus0(), f.plus0());
    Ok(Residual {
        interior: (left + right).sqrt(),
        jump0: (p.v - m.v).abs(),
        jump_flux: (c.k.value(0.0) * m.d1 - eps * c.kappa.value(0.0) * p.d1).abs(),
    })
}

/// Sampled eigenfunctions `(x, u_exact, u_low, u_high)` for index `n`.
#[derive(Debug, Clone)]
pub struct FigureData {
    pub n: usize,
    pub l: i64,
    pub pairing: Pairing,
    pub rows: Vec<[f64; 4]>,
    /// Plain `L²` distances of the low- and high-frequency shapes to the exact one.
    pub low_distance: f64,
    pub high_distance: f64,
}

pub fn figure_data(inst: &ProblemInstance, n: usize, grid_points: usize) -> Result<FigureData> {
    let tol = DEFAULT_QUAD_TOL;
    let exact = eigenfunction(inst, n, NormMode::PlainL2)?;
    let low = LowFreqApprox::build(&inst.coeffs, n, inst.tol)?;
    let (_, low_u) = lowfreq_prediction(&low, inst.epsilon);
    let mut cache = AdmissibleCache::new(inst)?;
    let (hf, pairing) = cache.nearest(exact.frequency())?;
    let normalize = |g: &PiecewiseFunction| -> Result<PiecewiseFunction> {
        let norm = g.l2_norm(tol)?;
        let sign = if exact.u.l2_inner(g, tol)? < 0.0 { -1.0 } else { 1.0 };
        Ok(g.scaled(sign / norm))
    };
    let low_u = normalize(&low_u)?;
    let high_u = normalize(&hf.y)?;
    let rows = exact.u.sample(grid_points).into_iter().map(|(x, u)| [x, u, low_u.value(x), high_u.value(x)]).collect();
    Ok(FigureData {
        n,
        l: hf.l,
        pairing,
        rows,
        low_distance: aligned_distance(&exact.u, &low_u)?,
        high_distance: aligned_distance(&exact.u, &high_u)?,
    })
}
