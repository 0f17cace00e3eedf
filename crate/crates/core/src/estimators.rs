//! Essential-norm estimators for `C_φ: B^α → B^μ`.
//!
//! The main estimator scans `a ↦ ‖σ_a∘φ‖_{B^μ}` on radii
//! `|a|_k = min(1 - 2^-k, 1 - ε)` and a uniform angle grid, and takes the
//! maximum over the last few radii as the boundary limsup `L`. The essential
//! norm then lies in `[L / (α 2^α), (8 / α) L]`.
//!
//! Two independent criteria are available for cross-checking: the power
//! formula `(e / 2α)^α limsup_j j^(α-1) ‖φ^j‖_{B^β}` (standard weights only)
//! and the automorphism scan `lim ‖φ_a∘φ‖_B` for the Bloch space.

use std::f64::consts::{E, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::disk::DiskPoint;
use crate::error::{Error, Result};
use crate::norm::{BlochNorm, ComposedField, Searcher};
use crate::sigma::{norm_bound, sigma_derivative_modulus, sigma_value, validate_alpha};
use crate::symbol::AnalyticMap;
use crate::weights::Weight;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanSettings {
    pub k_min: u32,
    pub k_max: u32,
    pub angles: usize,
    pub tail_window: usize,
    pub compact_tol: f64,
    /// `L` above `noncompact_factor * compact_tol` counts as non-zero.
    pub noncompact_factor: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub j_max: usize,
}

impl Default for ScanSettings {
    fn default() -> Self {
        ScanSettings {
            k_min: 3,
            k_max: 20,
            angles: 64,
            tail_window: 4,
            compact_tol: 1e-3,
            noncompact_factor: 10.0,
            rel_tol: 1e-3,
            abs_tol: 1e-9,
            j_max: 256,
        }
    }
}

impl ScanSettings {
    pub fn validate(&self) -> Result<()> {
        if self.k_min == 0 || self.k_min > self.k_max || self.k_max > 60 {
            return Err(Error::InvalidParameter(format!(
                "scan radii need 1 <= k_min <= k_max <= 60, got {}..{}",
                self.k_min, self.k_max
            )));
        }
        if self.angles == 0 {
            return Err(Error::InvalidParameter(
                "scan angle grid must not be empty".into(),
            ));
        }
        if self.tail_window == 0 {
            return Err(Error::InvalidParameter(
                "tail_window must be at least 1".into(),
            ));
        }
        if !(self.compact_tol > 0.0 && self.noncompact_factor >= 1.0) {
            return Err(Error::InvalidParameter(
                "compact_tol must be positive and noncompact_factor at least 1".into(),
            ));
        }
        Ok(())
    }

    /// `min(1 - 2^-k, 1 - eps)` for `k = k_min..=k_max`, stopping at the cap.
    pub fn radii(&self, eps_boundary: f64) -> Vec<f64> {
        let cap = 1.0 - eps_boundary;
        let mut out: Vec<f64> = Vec::new();
        for k in self.k_min..=self.k_max {
            let r = (1.0 - (-f64::from(k)).exp2()).min(cap);
            if out.last().is_some_and(|&prev| prev >= r) {
                break;
            }
            out.push(r);
        }
        out
    }

    pub fn angle_grid(&self) -> Vec<f64> {
        (0..self.angles)
            .map(|j| TAU * j as f64 / self.angles as f64)
            .collect()
    }
}

/// The test functions `τ_a` used by a scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TestFamily {
    /// `σ_a` for exponent `alpha`.
    Sigma { alpha: f64 },
    /// The automorphism `φ_a(z) = (a - z) / (1 - conj(a) z)`.
    Mobius,
}

impl TestFamily {
    fn value(&self, a: Complex64, w: Complex64) -> Complex64 {
        match self {
            TestFamily::Sigma { alpha } => sigma_value(*alpha, a, w),
            TestFamily::Mobius => (a - w) / (Complex64::new(1.0, 0.0) - a.conj() * w),
        }
    }

    fn derivative_modulus(&self, a: Complex64, w: Complex64) -> f64 {
        match self {
            TestFamily::Sigma { alpha } => sigma_derivative_modulus(*alpha, a, w),
            TestFamily::Mobius => {
                let t = a.conj() * w;
                let gap_sq = (1.0 - t.re) * (1.0 - t.re) + t.im * t.im;
                (1.0 - a.norm_sqr()) / gap_sq
            }
        }
    }
}

/// `‖τ_a∘φ‖` sampled on the `a`-grid, with the boundary limsup estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryScan {
    pub family: TestFamily,
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    /// Full norms `|τ_a(φ(0))| + ‖τ_a∘φ‖_μ`, indexed `[radius][angle]`.
    pub values: Vec<Vec<f64>>,
    /// Seminorms `‖τ_a∘φ‖_μ`, indexed `[radius][angle]`.
    pub seminorms: Vec<Vec<f64>>,
    /// Maximum over angles of the full norm, per radius.
    pub tail_max: Vec<f64>,
    pub tail_max_seminorm: Vec<f64>,
    pub l_estimate: f64,
    pub l_seminorm_estimate: f64,
    pub converged: bool,
    /// Number of cells whose supremum search converged.
    pub cells_converged: usize,
}

impl BoundaryScan {
    pub fn cell_count(&self) -> usize {
        self.radii.len() * self.angles.len()
    }
}

fn window_max(values: &[f64], end: usize, window: usize) -> f64 {
    values[end.saturating_sub(window)..end]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Scans `‖τ_a∘φ‖_{B^μ}` over the `a`-grid for the given family.
pub fn scan(
    phi: &AnalyticMap,
    family: TestFamily,
    weight: &Weight,
    searcher: &Searcher,
    settings: &ScanSettings,
) -> Result<BoundaryScan> {
    settings.validate()?;
    let field = searcher.composed_field(phi, weight)?;
    scan_field(&field, family, searcher, settings)
}

fn scan_field(
    field: &ComposedField<'_>,
    family: TestFamily,
    searcher: &Searcher,
    settings: &ScanSettings,
) -> Result<BoundaryScan> {
    let radii = settings.radii(searcher.settings().eps_boundary);
    let angles = settings.angle_grid();
    let cells: Vec<(usize, usize)> = (0..radii.len())
        .flat_map(|i| (0..angles.len()).map(move |j| (i, j)))
        .collect();
    let phi0 = field.phi_at_zero();

    let results: Vec<(f64, f64, bool)> = cells
        .par_iter()
        .map(|&(i, j)| -> Result<(f64, f64, bool)> {
            let a = DiskPoint::from_polar(radii[i], angles[j])?.to_complex();
            let hints = field.nearest_preimages(a, 1);
            let est = field.seminorm(|w| family.derivative_modulus(a, w), &hints)?;
            let at_zero = family.value(a, phi0).norm();
            Ok((at_zero + est.value, est.value, est.is_converged))
        })
        .collect::<Result<_>>()?;

    let n_angles = angles.len();
    let rows = |k: usize| -> Vec<Vec<f64>> {
        results
            .chunks(n_angles)
            .map(|row| row.iter().map(|c| if k == 0 { c.0 } else { c.1 }).collect())
            .collect()
    };
    let values = rows(0);
    let seminorms = rows(1);
    let row_max = |m: &Vec<Vec<f64>>| -> Vec<f64> {
        m.iter()
            .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect()
    };
    let tail_max = row_max(&values);
    let tail_max_seminorm = row_max(&seminorms);
    let n = tail_max.len();
    let w = settings.tail_window;
    let l_estimate = window_max(&tail_max, n, w);
    let l_seminorm_estimate = window_max(&tail_max_seminorm, n, w);
    let converged = n > w && {
        let prev = window_max(&tail_max, n - 1, w);
        (l_estimate - prev).abs() < settings.rel_tol * l_estimate + settings.abs_tol
    };
    Ok(BoundaryScan {
        family,
        radii,
        angles,
        values,
        seminorms,
        tail_max,
        tail_max_seminorm,
        l_estimate,
        l_seminorm_estimate,
        converged,
        cells_converged: results.iter().filter(|c| c.2).count(),
    })
}

/// The `σ_a` scan for `C_φ: B^α → B^μ`.
pub fn sigma_scan(
    phi: &AnalyticMap,
    alpha: f64,
    weight: &Weight,
    searcher: &Searcher,
    settings: &ScanSettings,
) -> Result<BoundaryScan> {
    validate_alpha(alpha)?;
    scan(phi, TestFamily::Sigma { alpha }, weight, searcher, settings)
}

/// The automorphism scan `a ↦ ‖φ_a∘φ‖`.
pub fn tjani_scan(
    phi: &AnalyticMap,
    weight: &Weight,
    searcher: &Searcher,
    settings: &ScanSettings,
) -> Result<BoundaryScan> {
    scan(phi, TestFamily::Mobius, weight, searcher, settings)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Compact,
    NonCompact,
    Inconclusive,
}

/// Two-sided bounds on `‖C_φ‖_e` from the boundary limsup `L`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EssentialNormBounds {
    pub alpha: f64,
    pub l: f64,
    pub l_seminorm: f64,
    /// `L / (α 2^α)`.
    pub lower: f64,
    /// `(8 / α) L`.
    pub upper: f64,
    pub zhao: Option<f64>,
    pub verdict: Verdict,
    pub scan_converged: bool,
    /// `‖φ‖_{B^μ}`.
    pub phi_norm: f64,
}

pub fn essential_bounds(
    scan: &BoundaryScan,
    alpha: f64,
    phi_norm: &BlochNorm,
    compact_tol: f64,
) -> EssentialNormBounds {
    essential_bounds_with_floor(scan, alpha, phi_norm, compact_tol, 10.0 * compact_tol)
}

pub fn essential_bounds_with_floor(
    scan: &BoundaryScan,
    alpha: f64,
    phi_norm: &BlochNorm,
    compact_tol: f64,
    noncompact_floor: f64,
) -> EssentialNormBounds {
    let l = scan.l_estimate;
    let verdict = if l < compact_tol && phi_norm.total.is_finite() {
        Verdict::Compact
    } else if l > noncompact_floor && scan.converged {
        Verdict::NonCompact
    } else {
        Verdict::Inconclusive
    };
    EssentialNormBounds {
        alpha,
        l,
        l_seminorm: scan.l_seminorm_estimate,
        lower: l / norm_bound(alpha),
        upper: 8.0 / alpha * l,
        zhao: None,
        verdict,
        scan_converged: scan.converged,
        phi_norm: phi_norm.total,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZhaoTerm {
    pub j: usize,
    /// `‖φ^j‖_{B^β}`.
    pub norm: f64,
    /// `j^(α-1) ‖φ^j‖_{B^β}`.
    pub weighted: f64,
}

/// The power-criterion estimate `(e / 2α)^α max_{tail} j^(α-1) ‖φ^j‖_{B^β}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZhaoEstimate {
    pub alpha: f64,
    pub beta: f64,
    pub j_max: usize,
    pub prefactor: f64,
    pub terms: Vec<ZhaoTerm>,
    /// Maximum of the weighted terms over the last quarter of indices.
    pub tail_max: f64,
    pub estimate: f64,
    /// The tail maximum does not exceed the previous quarter's by more than 5%.
    pub converged: bool,
}

pub fn zhao_estimate(
    phi: &AnalyticMap,
    alpha: f64,
    weight: &Weight,
    j_max: usize,
    searcher: &Searcher,
) -> Result<ZhaoEstimate> {
    validate_alpha(alpha)?;
    let beta = weight.standard_alpha().ok_or_else(|| {
        Error::UnsupportedWeight(format!(
            "the power criterion needs a standard weight valpha:<b>, got {weight}"
        ))
    })?;
    if j_max < 16 {
        return Err(Error::InvalidParameter(format!(
            "j_max must be at least 16, got {j_max}"
        )));
    }
    let field = searcher.composed_field(phi, weight)?;
    let phi0 = field.phi_at_zero().norm();

    let mut terms = Vec::with_capacity(j_max);
    for j in 1..=j_max {
        let jf = j as f64;
        let exponent =
            i32::try_from(j - 1).map_err(|_| Error::InvalidParameter("j_max too large".into()))?;
        let seminorm = match field.radial_seminorm(|m| jf * m.powi(exponent)) {
            Some(est) => est?,
            None => field.seminorm(|w| jf * w.norm().powi(exponent), &[])?,
        };
        let norm = phi0.powi(exponent + 1) + seminorm.value;
        terms.push(ZhaoTerm {
            j,
            norm,
            weighted: jf.powf(alpha - 1.0) * norm,
        });
    }
    let quarter = j_max / 4;
    let tail = &terms[j_max - quarter..];
    let previous = &terms[j_max - 2 * quarter..j_max - quarter];
    let max_of = |t: &[ZhaoTerm]| t.iter().map(|t| t.weighted).fold(0.0, f64::max);
    let tail_max = max_of(tail);
    let prefactor = (E / (2.0 * alpha)).powf(alpha);
    Ok(ZhaoEstimate {
        alpha,
        beta,
        j_max,
        prefactor,
        estimate: prefactor * tail_max,
        converged: tail_max <= 1.05 * max_of(previous),
        tail_max,
        terms,
    })
}

/// Zero/non-zero classification of one criterion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub name: String,
    pub value: f64,
    pub vanishes: bool,
    pub converged: bool,
}

/// Side-by-side run of the `σ_a` scan, the power criterion and (for the
/// Bloch space) the automorphism scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: BoundaryScan,
    pub bounds: EssentialNormBounds,
    pub zhao: ZhaoEstimate,
    pub tjani: Option<BoundaryScan>,
    pub outcomes: Vec<CriterionOutcome>,
    pub agreement: bool,
    /// Whether the power estimate lies in the (5% widened) bounds; `None`
    /// when either side did not converge.
    pub zhao_in_bounds: Option<bool>,
    pub disagreements: Vec<String>,
}

/// Relative slack used when checking the power estimate against the bounds.
pub const SANDWICH_TOL: f64 = 0.05;

pub fn criteria_compare(
    phi: &AnalyticMap,
    alpha: f64,
    beta: f64,
    searcher: &Searcher,
    settings: &ScanSettings,
) -> Result<CompareReport> {
    let weight = Weight::standard(beta)?;
    let sigma = sigma_scan(phi, alpha, &weight, searcher, settings)?;
    let phi_norm = searcher.bloch_norm(phi, &weight)?;
    let zhao = zhao_estimate(phi, alpha, &weight, settings.j_max, searcher)?;
    let mut bounds = essential_bounds_with_floor(
        &sigma,
        alpha,
        &phi_norm,
        settings.compact_tol,
        settings.noncompact_factor * settings.compact_tol,
    );
    bounds.zhao = Some(zhao.estimate);
    let tjani = if alpha == 1.0 && beta == 1.0 {
        Some(tjani_scan(phi, &weight, searcher, settings)?)
    } else {
        None
    };

    let tol = settings.compact_tol;
    let mut outcomes = vec![
        CriterionOutcome {
            name: "sigma".into(),
            value: sigma.l_estimate,
            vanishes: sigma.l_estimate < tol,
            converged: sigma.converged,
        },
        CriterionOutcome {
            name: "zhao".into(),
            value: zhao.estimate,
            vanishes: zhao.estimate < tol,
            converged: zhao.converged,
        },
    ];
    if let Some(t) = &tjani {
        outcomes.push(CriterionOutcome {
            name: "tjani".into(),
            value: t.l_seminorm_estimate,
            vanishes: t.l_seminorm_estimate < tol,
            converged: t.converged,
        });
    }
    let agreement = outcomes.iter().all(|o| o.vanishes == outcomes[0].vanishes);
    let mut disagreements = Vec::new();
    if !agreement {
        for o in &outcomes {
            disagreements.push(format!(
                "{}: {} ({})",
                o.name,
                o.value,
                if o.vanishes { "vanishes" } else { "positive" }
            ));
        }
    }
    let zhao_in_bounds = if outcomes[0].vanishes && outcomes[1].vanishes {
        Some(true)
    } else if sigma.converged && zhao.converged {
        let ok = zhao.estimate >= bounds.lower * (1.0 - SANDWICH_TOL)
            && zhao.estimate <= bounds.upper * (1.0 + SANDWICH_TOL);
        if !ok {
            disagreements.push(format!(
                "zhao estimate {} outside [{}, {}]",
                zhao.estimate, bounds.lower, bounds.upper
            ));
        }
        Some(ok)
    } else {
        None
    };
    Ok(CompareReport {
        alpha,
        beta,
        sigma,
        bounds,
        zhao,
        tjani,
        outcomes,
        agreement,
        zhao_in_bounds,
        disagreements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::SearchSettings;

    #[test]
    fn scan_radii_follow_geometric_sequence() {
        let s = ScanSettings::default();
        let radii = s.radii(1e-6);
        assert_eq!(radii.len(), 18);
        assert_eq!(radii[0], 0.875);
        assert_eq!(*radii.last().unwrap(), 1.0 - 1e-6);
        assert!(radii.windows(2).all(|w| w[0] < w[1]));
        let deep = ScanSettings { k_max: 30, ..s };
        assert_eq!(deep.radii(1e-6).len(), 18);
    }

    #[test]
    fn settings_validation() {
        assert!(ScanSettings {
            angles: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(ScanSettings {
            k_min: 5,
            k_max: 4,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(ScanSettings::default().validate().is_ok());
    }

    fn synthetic(l: f64, converged: bool) -> BoundaryScan {
        BoundaryScan {
            family: TestFamily::Sigma { alpha: 1.0 },
            radii: vec![],
            angles: vec![],
            values: vec![],
            seminorms: vec![],
            tail_max: vec![],
            tail_max_seminorm: vec![],
            l_estimate: l,
            l_seminorm_estimate: l,
            converged,
            cells_converged: 0,
        }
    }

    fn phi_norm() -> BlochNorm {
        let s = Searcher::new(&SearchSettings::default()).unwrap();
        s.bloch_norm(&AnalyticMap::Identity, &Weight::standard(1.0).unwrap())
            .unwrap()
    }

    #[test]
    fn bounds_arithmetic() {
        let n = phi_norm();
        let b = essential_bounds(&synthetic(0.0, true), 1.0, &n, 1e-3);
        assert_eq!((b.lower, b.upper, b.verdict), (0.0, 0.0, Verdict::Compact));

        let b = essential_bounds(&synthetic(0.5, true), 1.0, &n, 1e-3);
        assert_eq!((b.lower, b.upper), (0.25, 4.0));
        assert!(b.lower <= 1.0 && 1.0 <= b.upper);
        assert_eq!(b.verdict, Verdict::NonCompact);

        let b = essential_bounds(&synthetic(1.0, true), 2.0, &n, 1e-3);
        assert_eq!((b.lower, b.upper), (0.125, 4.0));
        assert_eq!(b.upper / b.lower, 32.0);

        let b = essential_bounds(&synthetic(0.5, false), 1.0, &n, 1e-3);
        assert_eq!(b.verdict, Verdict::Inconclusive);
        let b = essential_bounds(&synthetic(5e-3, true), 1.0, &n, 1e-3);
        assert_eq!(b.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn zhao_rejects_non_standard_weights() {
        let s = Searcher::new(&SearchSettings::default()).unwrap();
        let err =
            zhao_estimate(&AnalyticMap::Identity, 1.0, &Weight::logarithmic(), 64, &s).unwrap_err();
        assert!(matches!(err, Error::UnsupportedWeight(_)));
        let err = zhao_estimate(
            &AnalyticMap::Identity,
            1.0,
            &Weight::standard(1.0).unwrap(),
            8,
            &s,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn zhao_of_constant_is_zero() {
        let s = Searcher::new(&SearchSettings::default()).unwrap();
        let z = zhao_estimate(
            &AnalyticMap::Constant(Complex64::new(0.0, 0.0)),
            1.0,
            &Weight::standard(1.0).unwrap(),
            16,
            &s,
        )
        .unwrap();
        assert_eq!(z.estimate, 0.0);
    }
}
