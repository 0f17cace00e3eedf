use rayon::prelude::*;
use serde::Serialize;

use super::AnalyticMap;
use crate::disk::{DiskGrid, DiskPoint};
use crate::error::{Error, Result};

/// Tolerance band around the unit circle used to classify symbols.
pub const SELF_MAP_TOL: f64 = 1e-9;

/// Numerical evidence that a symbol maps the disk into itself.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfMapCertificate {
    /// Maximum of `|φ|` over the certification grid.
    pub sup_modulus_estimate: f64,
    pub witness: DiskPoint,
    /// Ring maxima extrapolated linearly (in the radius) to the unit circle.
    pub boundary_extrapolation: f64,
    /// `|φ|` stays below `1 - 1e-9` even after boundary extrapolation.
    pub is_strict: bool,
}

/// Certifies the self-map property on `grid`.
///
/// Grid suprema above `1 + 1e-9` are rejected. A symbol is strict when both
/// the grid supremum and the extrapolated boundary value stay at or below
/// `1 - 1e-9`; anything in between is a boundary-touching self-map.
pub fn certify_self_map(map: &AnalyticMap, grid: &DiskGrid) -> Result<SelfMapCertificate> {
    let points = grid.points();
    let moduli: Vec<f64> = points.par_iter().map(|&z| map.jet(z).0.norm()).collect();
    if let Some(i) = moduli.iter().position(|m| !m.is_finite()) {
        return Err(Error::NonFinite { point: points[i] });
    }
    let (best, sup) = argmax(&moduli);
    let witness = DiskPoint::from_complex(points[best])?;
    if sup > 1.0 + SELF_MAP_TOL {
        return Err(Error::NotSelfMap { sup, witness });
    }

    let radii = grid.radii();
    let ranges = grid.ring_ranges();
    let boundary_extrapolation = if ranges.len() >= 2 {
        let n = ranges.len();
        let ring_max = |k: usize| {
            moduli[ranges[k].clone()]
                .iter()
                .copied()
                .fold(0.0, f64::max)
        };
        let (m1, m0) = (ring_max(n - 1), ring_max(n - 2));
        let (r1, r0) = (radii[n - 1], radii[n - 2]);
        m1 + (m1 - m0) * (1.0 - r1) / (r1 - r0)
    } else {
        sup
    };
    let is_strict = sup.max(boundary_extrapolation) <= 1.0 - SELF_MAP_TOL;
    Ok(SelfMapCertificate {
        sup_modulus_estimate: sup,
        witness,
        boundary_extrapolation,
        is_strict,
    })
}

/// Index and value of the first maximum.
pub(crate) fn argmax(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        })
}
