//! Coefficient fields of the string and their validation.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numkernel::adaptive_quadrature;

/// Number of uniform samples used for the positivity check.
pub const POSITIVITY_SAMPLES: usize = 1001;

/// A scalar function with symbolic first and second derivatives on `[lo, hi]`.
///
/// Positivity is checked by sampling, so a field that dips below zero between
/// two of the 1001 samples is not detected.
#[derive(Debug, Clone)]
pub struct ScalarField {
    ast: Arc<Expr>,
    d1: Arc<Expr>,
    d2: Arc<Expr>,
    lo: f64,
    hi: f64,
}

impl ScalarField {
    /// Builds the field from an expression without the positivity check.
    /// Used for derived quantities such as the WKB amplitude products.
    pub fn from_expr(ast: Expr, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::BadInterval { lo, hi });
        }
        let ast = ast.simplify();
        let d1 = ast.derivative();
        let d2 = d1.derivative();
        Ok(ScalarField { ast: Arc::new(ast), d1: Arc::new(d1), d2: Arc::new(d2), lo, hi })
    }

    pub fn constant(v: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::from_expr(Expr::Num(v), lo, hi)
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.ast.eval(x)
    }

    #[inline]
    pub fn d1(&self, x: f64) -> f64 {
        self.d1.eval(x)
    }

    #[inline]
    pub fn d2(&self, x: f64) -> f64 {
        self.d2.eval(x)
    }

    pub fn expr(&self) -> &Expr {
        &self.ast
    }

    pub fn d1_expr(&self) -> &Expr {
        &self.d1
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        let n = POSITIVITY_SAMPLES - 1;
        (0..=n).map(move |i| if i == n { self.hi } else { self.lo + (self.hi - self.lo) * i as f64 / n as f64 })
    }

    fn check_finite(&self) -> Result<()> {
        for x in self.samples() {
            if !(self.value(x).is_finite() && self.d1(x).is_finite() && self.d2(x).is_finite()) {
                return Err(Error::NonFinite { x });
            }
        }
        Ok(())
    }

    fn check_positive(&self) -> Result<()> {
        for x in self.samples() {
            let v = self.value(x);
            if !(v > 0.0) {
                return Err(Error::NotPositive { x, value: v });
            }
        }
        Ok(())
    }
}

/// Parses `src` and validates it as a coefficient on `[lo, hi]`.
pub fn parse_expr(src: &str, lo: f64, hi: f64) -> Result<ScalarField> {
    let field = ScalarField::from_expr(Expr::parse(src)?, lo, hi)?;
    field.check_finite()?;
    field.check_positive()?;
    Ok(field)
}

/// Stiffness and density of both parts: `k`, `r` on `[a, 0]` and
/// `kappa`, `rho` on `[0, b]`.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub a: f64,
    pub b: f64,
    pub k: ScalarField,
    pub r: ScalarField,
    pub kappa: ScalarField,
    pub rho: ScalarField,
}

impl CoefficientSet {
    pub fn new(a: f64, b: f64, k: &str, r: &str, kappa: &str, rho: &str) -> Result<Self> {
        if !(a < 0.0 && 0.0 < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Ordering { a, b });
        }
        Ok(CoefficientSet {
            a,
            b,
            k: parse_expr(k, a, 0.0).map_err(|e| e.in_field("k"))?,
            r: parse_expr(r, a, 0.0).map_err(|e| e.in_field("r"))?,
            kappa: parse_expr(kappa, 0.0, b).map_err(|e| e.in_field("kappa"))?,
            rho: parse_expr(rho, 0.0, b).map_err(|e| e.in_field("rho"))?,
        })
    }

    /// k = r = kappa = rho = 1 on (-1, 0) and (0, 1).
    pub fn constant() -> Self {
        Self::new(-1.0, 1.0, "1", "1", "1", "1").expect("constant coefficients are valid")
    }

    /// The worked example: k = 1, r = 1 + x^2, kappa = 1, rho = 1 + x.
    pub fn worked_example() -> Self {
        Self::new(-1.0, 1.0, "1", "1+x^2", "1", "1+x").expect("example coefficients are valid")
    }

    /// Travel time of the soft part, `S(0) = ∫₀ᵇ sqrt(rho / kappa)`.
    pub fn phase_length(&self) -> Result<f64> {
        adaptive_quadrature(
            |x| (self.rho.value(x) / self.kappa.value(x)).sqrt(),
            0.0,
            self.b,
            crate::numkernel::DEFAULT_QUAD_TOL,
        )
    }

    pub fn is_constant(&self) -> bool {
        [&self.k, &self.r, &self.kappa, &self.rho].iter().all(|f| f.expr().as_number().is_some())
    }
}

pub fn make_coefficient_set(a: f64, b: f64, k: &str, r: &str, kappa: &str, rho: &str) -> Result<CoefficientSet> {
    CoefficientSet::new(a, b, k, r, kappa, rho)
}
