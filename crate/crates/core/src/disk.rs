//! Points, sampling grids and local refinement on the open unit disk.
//!
//! Every supremum search in the crate starts from a [`DiskGrid`]: a set of
//! concentric rings whose radii approach the boundary geometrically, with
//! angular density growing like `1 / (1 - r)`. Local refinement produces
//! small polar patches around a witness point.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default distance kept from the unit circle by generated grids.
pub const DEFAULT_EPS_BOUNDARY: f64 = 1e-6;
/// Default cap on the number of angles per ring.
pub const DEFAULT_MAX_ANGLES: usize = 4096;
/// Minimum number of angles on every ring of a full grid.
pub const MIN_ANGLES: usize = 8;
/// Points per side of a refinement patch.
pub const PATCH_POINTS: usize = 7;

/// A point of the open unit disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskPoint {
    re: f64,
    im: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(re.is_finite() && im.is_finite()) || re * re + im * im >= 1.0 {
            return Err(Error::OutsideDisk { re, im });
        }
        Ok(DiskPoint { re, im })
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::OutsideDisk {
                re: r * theta.cos(),
                im: r * theta.sin(),
            });
        }
        let z = Complex64::from_polar(r, theta);
        DiskPoint::new(z.re, z.im)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        DiskPoint::new(z.re, z.im)
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Argument in `[0, 2π)`.
    pub fn arg(&self) -> f64 {
        normalize_angle(self.im.atan2(self.re))
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// `1 - |z|^2`, evaluated as `(1 - |z|)(1 + |z|)`.
    pub fn boundary_gap(&self) -> f64 {
        let r = self.modulus();
        (1.0 - r) * (1.0 + r)
    }
}

impl fmt::Display for DiskPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_complex(Complex64::new(self.re, self.im)))
    }
}

impl Serialize for DiskPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Formats a complex number as `a+bi` with 17 significant digits.
pub fn format_complex(z: Complex64) -> String {
    let im = format!("{:.16e}", z.im);
    if im.starts_with('-') {
        format!("{:.16e}{}i", z.re, im)
    } else {
        format!("{:.16e}+{}i", z.re, im)
    }
}

/// Maps an angle to `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// One ring of sample points: `count` angles `theta_start + i * theta_step`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ring {
    pub radius: f64,
    pub theta_start: f64,
    pub theta_step: f64,
    pub count: usize,
}

impl Ring {
    fn full(radius: f64, count: usize) -> Self {
        Ring {
            radius,
            theta_start: 0.0,
            theta_step: TAU / count as f64,
            count,
        }
    }

    pub fn angle(&self, i: usize) -> f64 {
        self.theta_start + self.theta_step * i as f64
    }

    pub fn point(&self, i: usize) -> Complex64 {
        Complex64::from_polar(self.radius, self.angle(i))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Layout {
    Full,
    Patch { half_radial: f64, half_angular: f64 },
}

/// A polar sampling grid inside the disk.
///
/// Full grids cover the whole disk (center plus rings up to
/// `1 - eps_boundary`); patches cover a polar box around a witness.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskGrid {
    center: bool,
    rings: Vec<Ring>,
    eps_boundary: f64,
    layout: Layout,
}

impl DiskGrid {
    /// Radii of the rings, excluding the center point.
    pub fn radii(&self) -> Vec<f64> {
        self.rings.iter().map(|r| r.radius).collect()
    }

    pub fn angles_per_radius(&self) -> Vec<usize> {
        self.rings.iter().map(|r| r.count).collect()
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn has_center(&self) -> bool {
        self.center
    }

    pub fn eps_boundary(&self) -> f64 {
        self.eps_boundary
    }

    pub fn max_radius(&self) -> f64 {
        self.rings.last().map_or(0.0, |r| r.radius)
    }

    pub fn is_patch(&self) -> bool {
        matches!(self.layout, Layout::Patch { .. })
    }

    pub fn len(&self) -> usize {
        usize::from(self.center) + self.rings.iter().map(|r| r.count).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All sample points, center first, then ring by ring.
    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.len());
        if self.center {
            out.push(Complex64::new(0.0, 0.0));
        }
        for ring in &self.rings {
            out.extend((0..ring.count).map(|i| ring.point(i)));
        }
        out
    }

    /// Index ranges of the rings inside [`DiskGrid::points`].
    pub fn ring_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = usize::from(self.center);
        self.rings
            .iter()
            .map(|r| {
                let range = start..start + r.count;
                start += r.count;
                range
            })
            .collect()
    }

    /// Radial and angular extent of the grid cell around `w`.
    ///
    /// For a full grid this is the local ring spacing and angular step; for a
    /// patch it is the patch half-width.
    pub fn local_extent(&self, w: Complex64) -> (f64, f64) {
        if let Layout::Patch {
            half_radial,
            half_angular,
        } = self.layout
        {
            return (half_radial, half_angular);
        }
        if self.rings.is_empty() {
            return (1.0 - self.eps_boundary, std::f64::consts::PI);
        }
        let r = w.norm();
        // nearest ring, treating the center as a ring of radius 0
        let idx = self.rings.partition_point(|ring| ring.radius < r);
        let nearest = match idx {
            0 if self.center && r < self.rings[0].radius / 2.0 => None,
            0 => Some(0),
            i if i == self.rings.len() => Some(i - 1),
            i if r - self.rings[i - 1].radius <= self.rings[i].radius - r => Some(i - 1),
            i => Some(i),
        };
        let Some(i) = nearest else {
            return (self.rings[0].radius, std::f64::consts::PI);
        };
        let inner = if i == 0 {
            self.rings[0].radius
        } else {
            self.rings[i].radius - self.rings[i - 1].radius
        };
        let outer = self
            .rings
            .get(i + 1)
            .map_or(0.0, |next| next.radius - self.rings[i].radius);
        (inner.max(outer), TAU / self.rings[i].count as f64)
    }
}

/// Parameters of a full geometric grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    /// Number of geometric bands `[1 - 2^-k, 1 - 2^-(k+1)]`.
    pub depth: usize,
    pub eps_boundary: f64,
    /// Rings per band, spaced geometrically in `1 - r`.
    pub rings_per_band: usize,
    pub max_angles: usize,
    /// Multiplier on the `2π / (1 - r)` angle count.
    pub angular_oversample: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            depth: 20,
            eps_boundary: DEFAULT_EPS_BOUNDARY,
            rings_per_band: 1,
            max_angles: DEFAULT_MAX_ANGLES,
            angular_oversample: 1.0,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::InvalidParameter(
                "grid depth must be at least 1".into(),
            ));
        }
        if !(self.eps_boundary > 0.0 && self.eps_boundary < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "eps_boundary must lie in (0, 0.5), got {}",
                self.eps_boundary
            )));
        }
        if self.rings_per_band == 0 {
            return Err(Error::InvalidParameter(
                "rings_per_band must be at least 1".into(),
            ));
        }
        if self.max_angles < MIN_ANGLES {
            return Err(Error::InvalidParameter(format!(
                "max_angles must be at least {MIN_ANGLES}"
            )));
        }
        if !(self.angular_oversample >= 1.0 && self.angular_oversample.is_finite()) {
            return Err(Error::InvalidParameter(
                "angular_oversample must be a finite number >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<DiskGrid> {
        self.validate()?;
        let cap = 1.0 - self.eps_boundary;
        let mut rings: Vec<Ring> = Vec::new();
        let mut last_count = MIN_ANGLES;
        'bands: for k in 0..self.depth {
            for s in 1..=self.rings_per_band {
                let exponent = k as f64 + s as f64 / self.rings_per_band as f64;
                let mut r = 1.0 - (-exponent).exp2();
                let capped = r >= cap;
                if capped {
                    r = cap;
                }
                if rings.last().is_some_and(|prev| prev.radius >= r) {
                    break 'bands;
                }
                let raw = (self.angular_oversample * TAU / (1.0 - r)).ceil() as usize;
                let count = raw.clamp(MIN_ANGLES, self.max_angles).max(last_count);
                last_count = count;
                rings.push(Ring::full(r, count));
                if capped {
                    break 'bands;
                }
            }
        }
        Ok(DiskGrid {
            center: true,
            rings,
            eps_boundary: self.eps_boundary,
            layout: Layout::Full,
        })
    }
}

/// Center plus rings `r_k = 1 - 2^-k`, `k = 1..=depth`, capped at
/// `1 - eps_boundary`, with `max(8, ceil(2π / (1 - r)))` angles per ring
/// (at most 4096).
pub fn make_geometric_grid(depth: usize, eps_boundary: f64) -> Result<DiskGrid> {
    GridSpec {
        depth,
        eps_boundary,
        ..GridSpec::default()
    }
    .build()
}

/// Uniform polar grid of the closed disk `|z| <= rho`.
pub fn polar_grid(rho: f64, rings: usize, angles: usize) -> Result<DiskGrid> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rho must lie in (0, 1), got {rho}"
        )));
    }
    if rings == 0 || angles < MIN_ANGLES {
        return Err(Error::InvalidParameter(
            "polar grid needs at least one ring and 8 angles".into(),
        ));
    }
    let rings = (1..=rings)
        .map(|i| Ring::full(rho * i as f64 / rings as f64, angles))
        .collect();
    Ok(DiskGrid {
        center: true,
        rings,
        eps_boundary: (1.0 - rho).min(0.5 - f64::EPSILON),
        layout: Layout::Full,
    })
}

/// Polar patch of `PATCH_POINTS x PATCH_POINTS` samples centered at `center`,
/// clamped to `|z| <= 1 - eps_boundary`.
pub fn patch(
    center: Complex64,
    half_radial: f64,
    half_angular: f64,
    eps_boundary: f64,
) -> DiskGrid {
    let cap = 1.0 - eps_boundary;
    let rc = center.norm().min(cap);
    let tc = center.im.atan2(center.re);
    let n = PATCH_POINTS;
    let half_angular = half_angular.min(std::f64::consts::PI);
    let full_circle = half_angular >= std::f64::consts::PI || rc == 0.0;

    let mut center_point = false;
    let mut rings: Vec<Ring> = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        let r = (rc - half_radial + 2.0 * half_radial * t).clamp(0.0, cap);
        if r == 0.0 {
            center_point = true;
            continue;
        }
        if rings.last().is_some_and(|prev: &Ring| prev.radius >= r) {
            continue;
        }
        let ring = if full_circle {
            Ring::full(r, 2 * (n - 1))
        } else {
            Ring {
                radius: r,
                theta_start: tc - half_angular,
                theta_step: 2.0 * half_angular / (n - 1) as f64,
                count: n,
            }
        };
        rings.push(ring);
    }
    DiskGrid {
        center: center_point,
        rings,
        eps_boundary,
        layout: Layout::Patch {
            half_radial,
            half_angular,
        },
    }
}

/// Denser local grid around `witness`: a polar patch whose half-widths are
/// `shrink` times the extent of `grid` at the witness.
pub fn refine_near(grid: &DiskGrid, witness: DiskPoint, shrink: f64) -> Result<DiskGrid> {
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "shrink must lie in (0, 1), got {shrink}"
        )));
    }
    let w = witness.to_complex();
    let (dr, dtheta) = grid.local_extent(w);
    Ok(patch(w, shrink * dr, shrink * dtheta, grid.eps_boundary))
}

/// One level of a supremum search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceLevel {
    pub grid_size: usize,
    pub running_max: f64,
    pub argmax: DiskPoint,
}

/// History of a grid-plus-refinement search.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RefinementTrace {
    pub levels: Vec<TraceLevel>,
    pub converged: bool,
    pub final_gap: f64,
}

impl RefinementTrace {
    pub fn push(&mut self, grid_size: usize, running_max: f64, argmax: DiskPoint) {
        debug_assert!(self
            .levels
            .last()
            .is_none_or(|l| l.running_max <= running_max));
        self.levels.push(TraceLevel {
            grid_size,
            running_max,
            argmax,
        });
    }

    /// Sets `converged` and `final_gap` from the last two levels.
    pub fn finish(&mut self, rel_tol: f64, abs_tol: f64) {
        let n = self.levels.len();
        if n < 2 {
            self.converged = false;
            self.final_gap = f64::INFINITY;
            return;
        }
        let last = self.levels[n - 1].running_max;
        let prev = self.levels[n - 2].running_max;
        self.final_gap = last - prev;
        self.converged = self.final_gap < rel_tol * last + abs_tol;
    }
}
