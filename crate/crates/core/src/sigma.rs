//! The test functions `σ_a(z) = (1 - |a|)((1 - conj(a) z)^(-α) - 1)`.
//!
//! Powers of `1 - conj(a) z` are taken on the principal branch, in
//! log-modulus/argument form. For `a, z` in the disk `1 - conj(a) z` lies in
//! the right half-plane, so the branch is never crossed there.

use num_complex::Complex64;

use crate::disk::{polar_grid, DiskPoint};
use crate::error::{Error, Result};
use crate::symbol::AnalyticMap;

/// Largest admissible exponent.
pub const ALPHA_MAX: f64 = 8.0;

pub fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= ALPHA_MAX {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, {ALPHA_MAX}], got {alpha}"
        )))
    }
}

/// `ln(1 - conj(a) z)` with the real part computed through `ln_1p`.
fn log_one_minus(a: Complex64, z: Complex64) -> Complex64 {
    let t = a.conj() * z;
    let u = Complex64::new(1.0 - t.re, -t.im);
    // |u|^2 - 1 = -2 Re t + |t|^2
    let re = 0.5 * (t.norm_sqr() - 2.0 * t.re).ln_1p();
    Complex64::new(re, u.im.atan2(u.re))
}

/// `exp(w) - 1` without cancellation for small `w`.
fn exp_m1(w: Complex64) -> Complex64 {
    let (s, c) = w.im.sin_cos();
    let half = (0.5 * w.im).sin();
    let em1 = w.re.exp_m1();
    Complex64::new(em1 * c - 2.0 * half * half, (em1 + 1.0) * s)
}

/// `σ_a(z)` at an arbitrary complex point.
pub fn sigma_value(alpha: f64, a: Complex64, z: Complex64) -> Complex64 {
    let scale = 1.0 - a.norm();
    exp_m1(log_one_minus(a, z) * -alpha) * scale
}

/// `σ_a'(z) = α conj(a) (1 - |a|) (1 - conj(a) z)^(-α-1)`.
pub fn sigma_derivative_value(alpha: f64, a: Complex64, z: Complex64) -> Complex64 {
    let l = log_one_minus(a, z) * -(alpha + 1.0);
    let power = Complex64::from_polar(l.re.exp(), l.im);
    a.conj() * (alpha * (1.0 - a.norm())) * power
}

/// `|σ_a'(w)|`, the only quantity the seminorm objective needs.
#[inline]
pub fn sigma_derivative_modulus(alpha: f64, a: Complex64, w: Complex64) -> f64 {
    let t = a.conj() * w;
    let gap_sq = (1.0 - t.re) * (1.0 - t.re) + t.im * t.im;
    alpha * a.norm() * (1.0 - a.norm()) * gap_sq.powf(-0.5 * (alpha + 1.0))
}

/// One member `σ_a` of the test family for a fixed exponent `α`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaFamily {
    alpha: f64,
    a: DiskPoint,
}

impl SigmaFamily {
    pub fn new(alpha: f64, a: DiskPoint) -> Result<Self> {
        validate_alpha(alpha)?;
        Ok(SigmaFamily { alpha, a })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn a(&self) -> DiskPoint {
        self.a
    }

    pub fn eval(&self, z: DiskPoint) -> Complex64 {
        sigma_value(self.alpha, self.a.to_complex(), z.to_complex())
    }

    pub fn derivative(&self, z: DiskPoint) -> Complex64 {
        sigma_derivative_value(self.alpha, self.a.to_complex(), z.to_complex())
    }

    /// `α 2^α`, the uniform bound on `‖σ_a‖` in the `α`-Bloch norm.
    pub fn norm_bound(&self) -> f64 {
        norm_bound(self.alpha)
    }

    /// The normalized member `f_a = σ_a / (α 2^α)`, unit ball of `B^α`.
    pub fn normalized(&self) -> AnalyticMap {
        AnalyticMap::scale(Complex64::new(1.0 / self.norm_bound(), 0.0), self.to_map())
    }

    pub fn to_map(&self) -> AnalyticMap {
        AnalyticMap::Sigma {
            alpha: self.alpha,
            a: self.a,
        }
    }
}

pub fn norm_bound(alpha: f64) -> f64 {
    alpha * alpha.exp2()
}

/// Checks `|σ_a'(a)| >= α / (4 (1 - |a|^2)^α)` (up to `1e-12` slack) from the
/// closed-form derivative. Defined for `1/2 < |a| < 1`.
pub fn check_derivative_lower_bound(alpha: f64, a: DiskPoint) -> Result<bool> {
    validate_alpha(alpha)?;
    let m = a.modulus();
    if m <= 0.5 {
        return Err(Error::Domain(format!(
            "derivative lower bound needs |a| > 1/2, got {m}"
        )));
    }
    let family = SigmaFamily::new(alpha, a)?;
    let lhs = family.derivative(a).norm();
    let rhs = alpha / (4.0 * a.boundary_gap().powf(alpha));
    Ok(lhs >= rhs - 1e-12)
}

/// For each `|a|` in `radii`, the grid maximum of `|σ_a|` over `|z| <= rho`
/// (with `a = |a|` on the positive axis).
pub fn check_uniform_vanishing(alpha: f64, rho: f64, radii: &[f64]) -> Result<Vec<f64>> {
    validate_alpha(alpha)?;
    let grid = polar_grid(rho, 32, 256)?;
    let points = grid.points();
    radii
        .iter()
        .map(|&m| {
            let a = DiskPoint::new(m, 0.0)?;
            Ok(points
                .iter()
                .map(|&z| sigma_value(alpha, a.to_complex(), z).norm())
                .fold(0.0, f64::max))
        })
        .collect()
}
