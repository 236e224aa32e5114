//! Functions on `[a, 0] ∪ [0, b]` with one-sided values at the interface.

use std::fmt;
use std::sync::Arc;

use crate::coeffs::ScalarField;
use crate::error::Result;
use crate::numkernel::{adaptive_quadrature, DenseSolution};

/// Value with first and second derivative at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn scaled(self, s: f64) -> Jet {
        Jet { v: self.v * s, d1: self.d1 * s, d2: self.d2 * s }
    }
}

impl std::ops::Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }
}

/// One smooth piece of a piecewise function.
pub trait Branch: Send + Sync {
    fn jet(&self, x: f64) -> Jet;
}

impl<F> Branch for F
where
    F: Fn(f64) -> Jet + Send + Sync,
{
    fn jet(&self, x: f64) -> Jet {
        self(x)
    }
}

/// Solution of `(p u')' + lambda w u = 0` stored as the state `(u, p u')`,
/// with `p = p_scale * p_field` and `w = w_scale * w_field`.
pub struct SturmBranch {
    pub sol: DenseSolution<2>,
    pub p: ScalarField,
    pub p_scale: f64,
    pub w: ScalarField,
    pub w_scale: f64,
    pub lambda: f64,
}

impl Branch for SturmBranch {
    fn jet(&self, x: f64) -> Jet {
        let [u, flux] = self.sol.eval(x);
        let p = self.p_scale * self.p.value(x);
        let dp = self.p_scale * self.p.d1(x);
        let d1 = flux / p;
        let d2 = (-self.lambda * self.w_scale * self.w.value(x) * u - dp * d1) / p;
        Jet { v: u, d1, d2 }
    }
}

struct Scaled {
    inner: Arc<dyn Branch>,
    factor: f64,
}

impl Branch for Scaled {
    fn jet(&self, x: f64) -> Jet {
        self.inner.jet(x).scaled(self.factor)
    }
}

/// `(f₋, f₊)` on `[a, 0]` and `[0, b]`.
#[derive(Clone)]
pub struct PiecewiseFunction {
    pub a: f64,
    pub b: f64,
    left: Arc<dyn Branch>,
    right: Arc<dyn Branch>,
}

impl fmt::Debug for PiecewiseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewiseFunction")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("minus0", &self.left_jet(0.0))
            .field("plus0", &self.right_jet(0.0))
            .finish()
    }
}

impl PiecewiseFunction {
    pub fn new(a: f64, b: f64, left: Arc<dyn Branch>, right: Arc<dyn Branch>) -> Self {
        PiecewiseFunction { a, b, left, right }
    }

    pub fn zero(a: f64, b: f64) -> Self {
        let z: Arc<dyn Branch> = Arc::new(|_: f64| Jet::default());
        PiecewiseFunction { a, b, left: z.clone(), right: z }
    }

    pub fn left_jet(&self, x: f64) -> Jet {
        self.left.jet(x)
    }

    pub fn right_jet(&self, x: f64) -> Jet {
        self.right.jet(x)
    }

    /// The right piece is used at `x = 0`.
    pub fn jet(&self, x: f64) -> Jet {
        if x < 0.0 {
            self.left.jet(x)
        } else {
            self.right.jet(x)
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.jet(x).v
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.jet(x).d1
    }

    pub fn minus0(&self) -> Jet {
        self.left.jet(0.0)
    }

    pub fn plus0(&self) -> Jet {
        self.right.jet(0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let wrap = |inner: &Arc<dyn Branch>| -> Arc<dyn Branch> { Arc::new(Scaled { inner: inner.clone(), factor }) };
        PiecewiseFunction { a: self.a, b: self.b, left: wrap(&self.left), right: wrap(&self.right) }
    }

    /// `self + factor * other`, piece by piece.
    pub fn add_scaled(&self, other: &PiecewiseFunction, factor: f64) -> Self {
        let (l1, l2) = (self.left.clone(), other.left.clone());
        let (r1, r2) = (self.right.clone(), other.right.clone());
        PiecewiseFunction {
            a: self.a,
            b: self.b,
            left: Arc::new(move |x: f64| l1.jet(x) + l2.jet(x).scaled(factor)),
            right: Arc::new(move |x: f64| r1.jet(x) + r2.jet(x).scaled(factor)),
        }
    }

    /// `∫ₐ⁰ wl f g + ∫₀ᵇ wr f g` for weights given as closures.
    pub fn inner_product<WL, WR>(&self, other: &PiecewiseFunction, wl: WL, wr: WR, tol: f64) -> Result<f64>
    where
        WL: Fn(f64) -> f64,
        WR: Fn(f64) -> f64,
    {
        let left = adaptive_quadrature(|x| wl(x) * self.left.jet(x).v * other.left.jet(x).v, self.a, 0.0, tol)?;
        let right = adaptive_quadrature(|x| wr(x) * self.right.jet(x).v * other.right.jet(x).v, 0.0, self.b, tol)?;
        Ok(left + right)
    }

    /// Unweighted `L²(a, b)` inner product.
    pub fn l2_inner(&self, other: &PiecewiseFunction, tol: f64) -> Result<f64> {
        self.inner_product(other, |_| 1.0, |_| 1.0, tol)
    }

    pub fn l2_norm(&self, tol: f64) -> Result<f64> {
        Ok(self.l2_inner(self, tol)?.max(0.0).sqrt())
    }

    /// Uniform samples of the value over `[a, b]`; the interface node takes the right value.
    pub fn sample(&self, points: usize) -> Vec<(f64, f64)> {
        let n = points.max(2) - 1;
        (0..=n)
            .map(|i| {
                let x = if i == n { self.b } else { self.a + (self.b - self.a) * i as f64 / n as f64 };
                (x, self.value(x))
            })
            .collect()
    }
}
