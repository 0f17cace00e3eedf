use num_complex::Complex64;

use crate::disk::DiskPoint;
use crate::error::{Error, Result};
use crate::sigma;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// An analytic function on the disk, given as an expression tree.
///
/// Values and derivatives are computed together in one pass
/// (see [`AnalyticMap::jet`]), so derivatives are exact up to rounding.
#[derive(Clone, Debug, PartialEq)]
pub enum AnalyticMap {
    Constant(Complex64),
    Identity,
    /// `z^j`, `j >= 1`.
    Monomial(u32),
    /// `a + b z`.
    Affine {
        a: Complex64,
        b: Complex64,
    },
    /// The disk automorphism `(a - z) / (1 - conj(a) z)`.
    Mobius(DiskPoint),
    /// `factor * prod (z - z_k) / (1 - conj(z_k) z)`.
    Blaschke {
        zeros: Vec<DiskPoint>,
        factor: Complex64,
    },
    /// Coefficients in increasing degree.
    Polynomial(Vec<Complex64>),
    /// `inner(r z)`.
    Dilation {
        r: f64,
        inner: Box<AnalyticMap>,
    },
    /// `outer(inner(z))`.
    Compose {
        outer: Box<AnalyticMap>,
        inner: Box<AnalyticMap>,
    },
    Scale {
        c: Complex64,
        inner: Box<AnalyticMap>,
    },
    Sum(Box<AnalyticMap>, Box<AnalyticMap>),
    Product(Box<AnalyticMap>, Box<AnalyticMap>),
    /// `(1 - |a|) ((1 - conj(a) z)^(-alpha) - 1)`.
    Sigma {
        alpha: f64,
        a: DiskPoint,
    },
}

impl AnalyticMap {
    pub fn constant(c: Complex64) -> Self {
        AnalyticMap::Constant(c)
    }

    pub fn monomial(j: u32) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidParameter(
                "monomial degree must be positive".into(),
            ));
        }
        Ok(AnalyticMap::Monomial(j))
    }

    pub fn affine(a: Complex64, b: Complex64) -> Self {
        AnalyticMap::Affine { a, b }
    }

    pub fn mobius(a: DiskPoint) -> Self {
        AnalyticMap::Mobius(a)
    }

    pub fn blaschke(zeros: Vec<DiskPoint>) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::InvalidParameter(
                "Blaschke product needs at least one zero".into(),
            ));
        }
        Ok(AnalyticMap::Blaschke { zeros, factor: ONE })
    }

    pub fn polynomial(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        Ok(AnalyticMap::Polynomial(coefficients))
    }

    pub fn dilation(r: f64, inner: AnalyticMap) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter(format!(
                "dilation factor must lie in [0, 1], got {r}"
            )));
        }
        Ok(AnalyticMap::Dilation {
            r,
            inner: Box::new(inner),
        })
    }

    pub fn compose(outer: AnalyticMap, inner: AnalyticMap) -> Self {
        AnalyticMap::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    pub fn scale(c: Complex64, inner: AnalyticMap) -> Self {
        AnalyticMap::Scale {
            c,
            inner: Box::new(inner),
        }
    }

    pub fn sum(left: AnalyticMap, right: AnalyticMap) -> Self {
        AnalyticMap::Sum(Box::new(left), Box::new(right))
    }

    pub fn product(left: AnalyticMap, right: AnalyticMap) -> Self {
        AnalyticMap::Product(Box::new(left), Box::new(right))
    }

    pub fn sigma(alpha: f64, a: DiskPoint) -> Result<Self> {
        sigma::validate_alpha(alpha)?;
        Ok(AnalyticMap::Sigma { alpha, a })
    }

    pub fn eval(&self, z: DiskPoint) -> Complex64 {
        self.jet(z.to_complex()).0
    }

    pub fn eval_derivative(&self, z: DiskPoint) -> Complex64 {
        self.jet(z.to_complex()).1
    }

    /// Value and derivative at an arbitrary complex point.
    pub fn jet(&self, z: Complex64) -> (Complex64, Complex64) {
        match self {
            AnalyticMap::Constant(c) => (*c, ZERO),
            AnalyticMap::Identity => (z, ONE),
            AnalyticMap::Monomial(j) => {
                let lower = z.powu(j - 1);
                (lower * z, lower * f64::from(*j))
            }
            AnalyticMap::Affine { a, b } => (a + b * z, *b),
            AnalyticMap::Mobius(a) => {
                let a = a.to_complex();
                let denom = ONE - a.conj() * z;
                let value = (a - z) / denom;
                let deriv = Complex64::new(a.norm_sqr() - 1.0, 0.0) / (denom * denom);
                (value, deriv)
            }
            AnalyticMap::Blaschke { zeros, factor } => {
                let (mut v, mut d) = (*factor, ZERO);
                for zk in zeros {
                    let zk = zk.to_complex();
                    let denom = ONE - zk.conj() * z;
                    let b = (z - zk) / denom;
                    let db = Complex64::new(1.0 - zk.norm_sqr(), 0.0) / (denom * denom);
                    d = d * b + v * db;
                    v *= b;
                }
                (v, d)
            }
            AnalyticMap::Polynomial(coeffs) => {
                let (mut v, mut d) = (ZERO, ZERO);
                for c in coeffs.iter().rev() {
                    d = d * z + v;
                    v = v * z + c;
                }
                (v, d)
            }
            AnalyticMap::Dilation { r, inner } => {
                let (v, d) = inner.jet(z * r);
                (v, d * r)
            }
            AnalyticMap::Compose { outer, inner } => {
                let (w, dw) = inner.jet(z);
                let (v, dv) = outer.jet(w);
                (v, dv * dw)
            }
            AnalyticMap::Scale { c, inner } => {
                let (v, d) = inner.jet(z);
                (c * v, c * d)
            }
            AnalyticMap::Sum(l, r) => {
                let (lv, ld) = l.jet(z);
                let (rv, rd) = r.jet(z);
                (lv + rv, ld + rd)
            }
            AnalyticMap::Product(l, r) => {
                let (lv, ld) = l.jet(z);
                let (rv, rd) = r.jet(z);
                (lv * rv, ld * rv + lv * rd)
            }
            AnalyticMap::Sigma { alpha, a } => {
                let a = a.to_complex();
                (
                    sigma::sigma_value(*alpha, a, z),
                    sigma::sigma_derivative_value(*alpha, a, z),
                )
            }
        }
    }

    /// Writes the map as `c z^k` when it has that form.
    ///
    /// Such maps have `|f'(z)|` depending on `|z|` only, which enables the
    /// one-dimensional radial search.
    pub fn as_monomial(&self) -> Option<(Complex64, u32)> {
        match self {
            AnalyticMap::Constant(c) => Some((*c, 0)),
            AnalyticMap::Identity => Some((ONE, 1)),
            AnalyticMap::Monomial(j) => Some((ONE, *j)),
            AnalyticMap::Affine { a, b } if *a == ZERO => Some((*b, 1)),
            AnalyticMap::Affine { a, b } if *b == ZERO => Some((*a, 0)),
            AnalyticMap::Polynomial(coeffs) => {
                let mut nonzero = coeffs.iter().enumerate().filter(|(_, c)| **c != ZERO);
                match (nonzero.next(), nonzero.next()) {
                    (None, _) => Some((ZERO, 0)),
                    (Some((k, c)), None) => Some((*c, u32::try_from(k).ok()?)),
                    _ => None,
                }
            }
            AnalyticMap::Dilation { r, inner } => {
                let (c, k) = inner.as_monomial()?;
                Some((c * r.powi(i32::try_from(k).ok()?), k))
            }
            AnalyticMap::Scale { c, inner } => {
                let (c2, k) = inner.as_monomial()?;
                Some((c * c2, k))
            }
            AnalyticMap::Compose { outer, inner } => {
                let (c1, k1) = outer.as_monomial()?;
                let (c2, k2) = inner.as_monomial()?;
                Some((c1 * c2.powu(k1), k1.checked_mul(k2)?))
            }
            AnalyticMap::Product(l, r) => {
                let (c1, k1) = l.as_monomial()?;
                let (c2, k2) = r.as_monomial()?;
                Some((c1 * c2, k1.checked_add(k2)?))
            }
            _ => None,
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            AnalyticMap::Dilation { inner, .. } | AnalyticMap::Scale { inner, .. } => {
                1 + inner.size()
            }
            AnalyticMap::Compose { outer, inner } => 1 + outer.size() + inner.size(),
            AnalyticMap::Sum(l, r) | AnalyticMap::Product(l, r) => 1 + l.size() + r.size(),
            _ => 1,
        }
    }
}
