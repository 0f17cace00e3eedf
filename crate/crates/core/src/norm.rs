//! Supremum search for weighted Bloch seminorms.
//!
//! `‖f‖_μ = sup_z μ(z) |f'(z)|` is estimated from below: the objective is
//! sampled on a geometric [`DiskGrid`], the best few local maxima are used as
//! seeds, and each seed is refined by a polar compass search (recenter on
//! improvement, shrink otherwise). Every reported value is an attained
//! objective value, hence a lower bound for the supremum.

use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::disk::{patch, DiskGrid, DiskPoint, GridSpec, RefinementTrace};
use crate::error::{Error, Result};
use crate::symbol::{argmax, certify_self_map, AnalyticMap, SelfMapCertificate};
use crate::weights::Weight;

/// Candidates inspected for the local-maximum seed filter.
const SEED_CANDIDATES: usize = 256;
/// Refinement stops once both patch half-widths fall below this fraction of
/// the distance to the boundary.
const STOP_FRACTION: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchSettings {
    /// Geometric bands of the base grid.
    pub depth: usize,
    pub eps_boundary: f64,
    pub max_angles: usize,
    pub rings_per_band: usize,
    pub angular_oversample: f64,
    /// Maximum number of refinement rounds.
    pub refine_rounds: usize,
    pub shrink: f64,
    /// Number of local maxima of the base grid refined independently.
    pub seeds: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Use the one-dimensional search when `|f'|` is radial.
    pub radial_fast_path: bool,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings {
            depth: 20,
            eps_boundary: crate::disk::DEFAULT_EPS_BOUNDARY,
            max_angles: crate::disk::DEFAULT_MAX_ANGLES,
            rings_per_band: 4,
            angular_oversample: 4.0,
            refine_rounds: 80,
            shrink: 0.25,
            seeds: 6,
            rel_tol: 1e-6,
            abs_tol: 1e-12,
            radial_fast_path: true,
        }
    }
}

impl SearchSettings {
    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            depth: self.depth,
            eps_boundary: self.eps_boundary,
            rings_per_band: self.rings_per_band,
            max_angles: self.max_angles,
            angular_oversample: self.angular_oversample,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid_spec().validate()?;
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "shrink must lie in (0, 1), got {}",
                self.shrink
            )));
        }
        if self.seeds == 0 {
            return Err(Error::InvalidParameter(
                "at least one seed is required".into(),
            ));
        }
        if !(self.rel_tol >= 0.0 && self.abs_tol >= 0.0) {
            return Err(Error::InvalidParameter(
                "tolerances must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    Disk,
    Radial,
}

/// Lower estimate of `sup μ(z)|f'(z)|` with its witness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeminormEstimate {
    pub value: f64,
    pub witness: DiskPoint,
    pub trace: RefinementTrace,
    pub is_converged: bool,
    /// The witness lies on the outermost ring of the grid.
    pub at_boundary: bool,
    /// The supremum sits on the outermost ring and the ring maxima are still
    /// increasing there, so it may be approached only at the boundary.
    pub boundary_rising: bool,
    pub method: SearchMethod,
}

impl SeminormEstimate {
    fn zero() -> Self {
        let mut trace = RefinementTrace::default();
        trace.push(1, 0.0, DiskPoint::ORIGIN);
        trace.push(1, 0.0, DiskPoint::ORIGIN);
        trace.finish(0.0, f64::MIN_POSITIVE);
        SeminormEstimate {
            value: 0.0,
            witness: DiskPoint::ORIGIN,
            trace,
            is_converged: true,
            at_boundary: false,
            boundary_rising: false,
            method: SearchMethod::Radial,
        }
    }
}

/// `|f(0)| + ‖f‖_μ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlochNorm {
    pub value_at_zero: f64,
    pub seminorm: SeminormEstimate,
    pub total: f64,
}

impl BlochNorm {
    fn new(value_at_zero: f64, seminorm: SeminormEstimate) -> Self {
        BlochNorm {
            value_at_zero,
            total: value_at_zero + seminorm.value,
            seminorm,
        }
    }
}

/// A non-negative function on the disk to be maximized.
pub trait Objective: Sync {
    fn value(&self, z: Complex64) -> f64;
}

impl<F: Fn(Complex64) -> f64 + Sync> Objective for F {
    fn value(&self, z: Complex64) -> f64 {
        self(z)
    }
}

/// Reusable search state: settings plus the sampled base grid.
#[derive(Clone, Debug)]
pub struct Searcher {
    settings: SearchSettings,
    grid: DiskGrid,
    points: Vec<Complex64>,
    ranges: Vec<Range<usize>>,
    radii: Vec<f64>,
}

struct Seed {
    center: Complex64,
    value: f64,
    half_radial: f64,
    half_angular: f64,
    active: bool,
}

impl Searcher {
    pub fn new(settings: &SearchSettings) -> Result<Self> {
        settings.validate()?;
        let grid = settings.grid_spec().build()?;
        let points = grid.points();
        let ranges = grid.ring_ranges();
        let radii = grid.radii();
        Ok(Searcher {
            settings: settings.clone(),
            grid,
            points,
            ranges,
            radii,
        })
    }

    pub fn settings(&self) -> &SearchSettings {
        &self.settings
    }

    pub fn grid(&self) -> &DiskGrid {
        &self.grid
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Evaluates `objective` on the base grid.
    pub fn sample<O: Objective>(&self, objective: &O) -> Vec<f64> {
        self.points
            .par_iter()
            .map(|&z| objective.value(z))
            .collect()
    }

    /// Maximizes `objective` starting from the base grid.
    ///
    /// `base` may carry precomputed objective values on [`Searcher::points`];
    /// `hints` are extra starting points for the refinement.
    pub fn maximize<O: Objective>(
        &self,
        objective: &O,
        base: Option<&[f64]>,
        hints: &[Complex64],
    ) -> Result<SeminormEstimate> {
        let owned;
        let values = match base {
            Some(v) => {
                debug_assert_eq!(v.len(), self.points.len());
                v
            }
            None => {
                owned = self.sample(objective);
                &owned
            }
        };
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                point: self.points[i],
            });
        }

        let (best, best_value) = argmax(values);
        let mut trace = RefinementTrace::default();
        let mut witness = self.points[best];
        let mut running = best_value;
        trace.push(values.len(), running, DiskPoint::from_complex(witness)?);

        let mut seeds: Vec<Seed> = self
            .seed_indices(values)
            .into_iter()
            .map(|i| self.seed(self.points[i], values[i]))
            .collect();
        for &h in hints {
            let z = self.clamp(h);
            let v = objective.value(z);
            if !v.is_finite() {
                return Err(Error::NonFinite { point: z });
            }
            if v > running {
                running = v;
                witness = z;
            }
            seeds.push(self.seed(z, v));
        }

        let cap = 1.0 - self.settings.eps_boundary;
        for _ in 0..self.settings.refine_rounds {
            if seeds.iter().all(|s| !s.active) {
                break;
            }
            let mut evaluated = 0;
            for seed in seeds.iter_mut().filter(|s| s.active) {
                let local = patch(
                    seed.center,
                    seed.half_radial,
                    seed.half_angular,
                    self.settings.eps_boundary,
                );
                let mut moved = false;
                for z in local.points() {
                    let v = objective.value(z);
                    evaluated += 1;
                    if !v.is_finite() {
                        return Err(Error::NonFinite { point: z });
                    }
                    if v > seed.value {
                        seed.value = v;
                        seed.center = z;
                        moved = true;
                    }
                }
                if !moved {
                    seed.half_radial *= self.settings.shrink;
                    seed.half_angular *= self.settings.shrink;
                }
                let r = seed.center.norm();
                let stop = STOP_FRACTION * (1.0 - r).max(self.settings.eps_boundary);
                if seed.half_radial < stop && (r * seed.half_angular < stop || r == 0.0) {
                    seed.active = false;
                }
                if seed.value > running {
                    running = seed.value;
                    witness = seed.center;
                }
            }
            trace.push(evaluated, running, DiskPoint::from_complex(witness)?);
        }
        trace.finish(self.settings.rel_tol, self.settings.abs_tol);

        let at_boundary = witness.norm() >= cap * (1.0 - 4.0 * f64::EPSILON);
        let boundary_rising = at_boundary && self.ring_maxima_rising(values);
        Ok(SeminormEstimate {
            value: running,
            witness: DiskPoint::from_complex(witness)?,
            is_converged: trace.converged,
            trace,
            at_boundary,
            boundary_rising,
            method: SearchMethod::Disk,
        })
    }

    fn clamp(&self, z: Complex64) -> Complex64 {
        let cap = 1.0 - self.settings.eps_boundary;
        let r = z.norm();
        if r > cap {
            z * (cap / r)
        } else {
            z
        }
    }

    fn seed(&self, z: Complex64, value: f64) -> Seed {
        let (half_radial, half_angular) = self.grid.local_extent(z);
        Seed {
            center: z,
            value,
            half_radial,
            half_angular,
            active: true,
        }
    }

    fn ring_maxima_rising(&self, values: &[f64]) -> bool {
        let n = self.ranges.len();
        if n < 3 {
            return false;
        }
        let m: Vec<f64> = self.ranges[n - 3..]
            .iter()
            .map(|r| {
                values[r.clone()]
                    .iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        m[0] < m[1] && m[1] < m[2]
    }

    /// Indices of the largest grid-local maxima, best first.
    fn seed_indices(&self, values: &[f64]) -> Vec<usize> {
        let order = |a: &usize, b: &usize| values[*b].total_cmp(&values[*a]).then(a.cmp(b));
        let mut idx: Vec<usize> = (0..values.len()).collect();
        let m = SEED_CANDIDATES.min(idx.len());
        if m < idx.len() {
            idx.select_nth_unstable_by(m - 1, order);
            idx.truncate(m);
        }
        idx.sort_unstable_by(order);

        let mut seeds = Vec::with_capacity(self.settings.seeds);
        for &i in &idx {
            if seeds.len() == self.settings.seeds {
                break;
            }
            if seeds.is_empty() || self.is_local_max(values, i) {
                seeds.push(i);
            }
        }
        seeds
    }

    fn ring_of(&self, i: usize) -> Option<usize> {
        if self.grid.has_center() && i == 0 {
            return None;
        }
        Some(self.ranges.partition_point(|r| r.end <= i))
    }

    fn is_local_max(&self, values: &[f64], i: usize) -> bool {
        let v = values[i];
        let Some(k) = self.ring_of(i) else {
            let first = &self.ranges[0];
            return values[first.clone()].iter().all(|&w| w <= v);
        };
        let range = &self.ranges[k];
        let n = range.len();
        let t = i - range.start;
        let same = [range.start + (t + 1) % n, range.start + (t + n - 1) % n];
        if same.iter().any(|&j| values[j] > v) {
            return false;
        }
        let theta = std::f64::consts::TAU * t as f64 / n as f64;
        for kk in [k.wrapping_sub(1), k + 1] {
            if kk == usize::MAX {
                if self.grid.has_center() && values[0] > v {
                    return false;
                }
                continue;
            }
            let Some(other) = self.ranges.get(kk) else {
                continue;
            };
            let m = other.len();
            let c = (theta * m as f64 / std::f64::consts::TAU).round() as usize;
            for d in [m - 1, 0, 1] {
                if values[other.start + (c + d) % m] > v {
                    return false;
                }
            }
        }
        true
    }

    /// One-dimensional search of `profile(r)` over `[0, 1 - eps]`.
    pub fn maximize_radial(&self, profile: impl Fn(f64) -> f64) -> Result<SeminormEstimate> {
        let cap = 1.0 - self.settings.eps_boundary;
        let mut nodes = Vec::with_capacity(self.radii.len() + 1);
        nodes.push(0.0);
        nodes.extend_from_slice(&self.radii);
        let values: Vec<f64> = nodes.iter().map(|&r| profile(r)).collect();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                point: Complex64::new(nodes[i], 0.0),
            });
        }
        let (best, best_value) = argmax(&values);
        let mut trace = RefinementTrace::default();
        trace.push(nodes.len(), best_value, DiskPoint::new(nodes[best], 0.0)?);

        let spacing = |i: usize| -> f64 {
            let lo = if i > 0 { nodes[i] - nodes[i - 1] } else { 0.0 };
            let hi = if i + 1 < nodes.len() {
                nodes[i + 1] - nodes[i]
            } else {
                0.0
            };
            lo.max(hi)
        };
        // seeds: interior local maxima of the sampled profile, best first
        let mut order: Vec<usize> = (0..nodes.len())
            .filter(|&i| {
                let left = i == 0 || values[i - 1] <= values[i];
                let right = i + 1 == nodes.len() || values[i + 1] <= values[i];
                left && right
            })
            .collect();
        order.sort_by(|a, b| values[*b].total_cmp(&values[*a]).then(a.cmp(b)));
        order.truncate(self.settings.seeds);
        if order.is_empty() {
            order.push(best);
        }

        let (mut running, mut witness) = (best_value, nodes[best]);
        let mut seeds: Vec<(f64, f64, f64, bool)> = order
            .iter()
            .map(|&i| (nodes[i], values[i], spacing(i), true))
            .collect();
        let half = (crate::disk::PATCH_POINTS - 1) / 2;
        for _ in 0..self.settings.refine_rounds {
            if seeds.iter().all(|s| !s.3) {
                break;
            }
            let mut evaluated = 0;
            for (center, value, h, active) in seeds.iter_mut().filter(|s| s.3) {
                let mut moved = false;
                for s in 0..=2 * half {
                    let offset = (s as f64 - half as f64) / half as f64;
                    let r = (*center + *h * offset).clamp(0.0, cap);
                    let v = profile(r);
                    evaluated += 1;
                    if !v.is_finite() {
                        return Err(Error::NonFinite {
                            point: Complex64::new(r, 0.0),
                        });
                    }
                    if v > *value {
                        *value = v;
                        *center = r;
                        moved = true;
                    }
                }
                if !moved {
                    *h *= self.settings.shrink;
                }
                if *h < STOP_FRACTION * (1.0 - *center).max(self.settings.eps_boundary) {
                    *active = false;
                }
                if *value > running {
                    running = *value;
                    witness = *center;
                }
            }
            trace.push(evaluated, running, DiskPoint::new(witness, 0.0)?);
        }
        trace.finish(self.settings.rel_tol, self.settings.abs_tol);
        let at_boundary = witness >= cap * (1.0 - 4.0 * f64::EPSILON);
        let n = values.len();
        let boundary_rising =
            at_boundary && n >= 3 && values[n - 3] < values[n - 2] && values[n - 2] < values[n - 1];
        Ok(SeminormEstimate {
            value: running,
            witness: DiskPoint::new(witness, 0.0)?,
            is_converged: trace.converged,
            trace,
            at_boundary,
            boundary_rising,
            method: SearchMethod::Radial,
        })
    }

    /// `sup μ(z)|f'(z)|`.
    pub fn bloch_seminorm(&self, f: &AnalyticMap, weight: &Weight) -> Result<SeminormEstimate> {
        if self.settings.radial_fast_path {
            if let Some((c, k)) = f.as_monomial() {
                if k == 0 || c.norm() == 0.0 {
                    return Ok(SeminormEstimate::zero());
                }
                let scale = c.norm() * f64::from(k);
                let exponent = i32::try_from(k - 1).map_err(|_| {
                    Error::InvalidParameter(format!("monomial degree {k} too large"))
                })?;
                return self.maximize_radial(|r| weight.at_radius(r) * scale * r.powi(exponent));
            }
        }
        let objective = |z: Complex64| weight.at_radius(z.norm()) * f.jet(z).1.norm();
        self.maximize(&objective, None, &[])
    }

    pub fn bloch_norm(&self, f: &AnalyticMap, weight: &Weight) -> Result<BlochNorm> {
        let at_zero = f.jet(Complex64::new(0.0, 0.0)).0.norm();
        Ok(BlochNorm::new(at_zero, self.bloch_seminorm(f, weight)?))
    }

    /// Certifies `phi` and samples it on the base grid.
    pub fn composed_field(&self, phi: &AnalyticMap, weight: &Weight) -> Result<ComposedField<'_>> {
        let certificate = certify_self_map(phi, &self.grid)?;
        let samples: Vec<FieldSample> = self
            .points
            .par_iter()
            .map(|&z| {
                let (w, dw) = phi.jet(z);
                FieldSample {
                    phi: w,
                    factor: weight.at_radius(z.norm()) * dw.norm(),
                }
            })
            .collect();
        Ok(ComposedField {
            searcher: self,
            phi: phi.clone(),
            weight: weight.clone(),
            phi_at_zero: phi.jet(Complex64::new(0.0, 0.0)).0,
            monomial: phi.as_monomial().filter(|_| self.settings.radial_fast_path),
            samples,
            certificate,
        })
    }

    /// `sup μ(z)|f'(φ(z))||φ'(z)|`.
    pub fn composition_seminorm(
        &self,
        f: &AnalyticMap,
        phi: &AnalyticMap,
        weight: &Weight,
    ) -> Result<SeminormEstimate> {
        if *phi == AnalyticMap::Identity {
            certify_self_map(phi, &self.grid)?;
            return self.bloch_seminorm(f, weight);
        }
        if self.settings.radial_fast_path {
            let composed = AnalyticMap::compose(f.clone(), phi.clone());
            if composed.as_monomial().is_some() {
                certify_self_map(phi, &self.grid)?;
                return self.bloch_seminorm(&composed, weight);
            }
        }
        let field = self.composed_field(phi, weight)?;
        field.seminorm(|w| f.jet(w).1.norm(), &[])
    }
}

#[derive(Clone, Copy, Debug)]
struct FieldSample {
    phi: Complex64,
    /// `μ(z) |φ'(z)|`.
    factor: f64,
}

/// A self-map sampled once on the base grid, reused for many outer functions.
pub struct ComposedField<'a> {
    searcher: &'a Searcher,
    phi: AnalyticMap,
    weight: Weight,
    phi_at_zero: Complex64,
    monomial: Option<(Complex64, u32)>,
    samples: Vec<FieldSample>,
    certificate: SelfMapCertificate,
}

impl ComposedField<'_> {
    pub fn phi_at_zero(&self) -> Complex64 {
        self.phi_at_zero
    }

    pub fn certificate(&self) -> &SelfMapCertificate {
        &self.certificate
    }

    pub fn phi(&self) -> &AnalyticMap {
        &self.phi
    }

    /// Base-grid points ordered by how close `φ(z)` comes to `target` in the
    /// pseudo-hyperbolic metric; used as refinement hints.
    pub fn nearest_preimages(&self, target: Complex64, count: usize) -> Vec<Complex64> {
        let rho =
            |w: Complex64| ((w - target) / (Complex64::new(1.0, 0.0) - target.conj() * w)).norm();
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(count + 1);
        for (i, s) in self.samples.iter().enumerate() {
            let d = rho(s.phi);
            if best.len() < count || d < best[best.len() - 1].0 {
                let pos = best.partition_point(|&(bd, _)| bd <= d);
                best.insert(pos, (d, i));
                best.truncate(count);
            }
        }
        best.into_iter()
            .map(|(_, i)| self.searcher.points[i])
            .collect()
    }

    /// `sup μ(z) g(φ(z)) |φ'(z)|` where `g` is the modulus of the outer
    /// derivative.
    pub fn seminorm<G>(
        &self,
        outer_derivative_modulus: G,
        hints: &[Complex64],
    ) -> Result<SeminormEstimate>
    where
        G: Fn(Complex64) -> f64 + Sync,
    {
        let base: Vec<f64> = self
            .samples
            .par_iter()
            .map(|s| {
                if s.factor == 0.0 {
                    0.0
                } else {
                    s.factor * outer_derivative_modulus(s.phi)
                }
            })
            .collect();
        let objective = |z: Complex64| {
            let (w, dw) = self.phi.jet(z);
            let factor = self.weight.at_radius(z.norm()) * dw.norm();
            if factor == 0.0 {
                0.0
            } else {
                factor * outer_derivative_modulus(w)
            }
        };
        self.searcher.maximize(&objective, Some(&base), hints)
    }

    /// One-dimensional variant for `φ(z) = c z^k`, where the objective at
    /// `z = r e^{iθ}` depends on `r` through `|φ(z)| = |c| r^k` only when the
    /// outer derivative modulus is radial.
    pub fn radial_seminorm<G>(&self, outer_radial: G) -> Option<Result<SeminormEstimate>>
    where
        G: Fn(f64) -> f64,
    {
        let (c, k) = self.monomial?;
        if k == 0 {
            return Some(Ok(SeminormEstimate::zero()));
        }
        let (modulus, kf) = (c.norm(), f64::from(k));
        let exponent = i32::try_from(k - 1).ok()?;
        Some(self.searcher.maximize_radial(|r| {
            let dphi = modulus * kf * r.powi(exponent);
            if dphi == 0.0 {
                0.0
            } else {
                self.weight.at_radius(r) * dphi * outer_radial(modulus * r.powi(exponent + 1))
            }
        }))
    }
}

pub fn bloch_seminorm(
    f: &AnalyticMap,
    weight: &Weight,
    settings: &SearchSettings,
) -> Result<SeminormEstimate> {
    Searcher::new(settings)?.bloch_seminorm(f, weight)
}

pub fn bloch_norm(
    f: &AnalyticMap,
    weight: &Weight,
    settings: &SearchSettings,
) -> Result<BlochNorm> {
    Searcher::new(settings)?.bloch_norm(f, weight)
}

pub fn composition_seminorm(
    f: &AnalyticMap,
    phi: &AnalyticMap,
    weight: &Weight,
    settings: &SearchSettings,
) -> Result<SeminormEstimate> {
    Searcher::new(settings)?.composition_seminorm(f, phi, weight)
}

/// `(‖f‖_{B^α}, ‖K_r f‖_{B^α})` with `(K_r f)(z) = f(r z)`.
pub fn dilate_and_norm(
    f: &AnalyticMap,
    r: f64,
    alpha: f64,
    settings: &SearchSettings,
) -> Result<(BlochNorm, BlochNorm)> {
    Searcher::new(settings)?.dilate_and_norm(f, r, alpha)
}

impl Searcher {
    pub fn dilate_and_norm(
        &self,
        f: &AnalyticMap,
        r: f64,
        alpha: f64,
    ) -> Result<(BlochNorm, BlochNorm)> {
        let weight = Weight::standard(alpha)?;
        let dilated = AnalyticMap::dilation(r, f.clone())?;
        Ok((
            self.bloch_norm(f, &weight)?,
            self.bloch_norm(&dilated, &weight)?,
        ))
    }
}
