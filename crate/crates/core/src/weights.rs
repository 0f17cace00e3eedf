//! Radial weights `μ` on the disk.
//!
//! Specification strings: `valpha:<α>` for `(1 - |z|^2)^α`, `log` for
//! `w log(2 / w)` with `w = 1 - |z|^2`, and `custom:<path>` for a table of
//! `(r, μ(r))` pairs interpolated linearly. Any of them may carry a positive
//! multiplier prefix, as in `2*valpha:1`.

use std::fmt;
use std::path::Path;

use serde::{Serialize, Serializer};

use crate::disk::DiskPoint;
use crate::error::{Error, Result};
use crate::sigma::validate_alpha;

/// Tabulated radial profile, linearly interpolated and held constant
/// outside the tabulated range.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    radii: Vec<f64>,
    values: Vec<f64>,
    source: String,
}

impl RadialProfile {
    pub fn new(radii: Vec<f64>, values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if radii.is_empty() || radii.len() != values.len() {
            return Err(Error::InvalidParameter(
                "custom weight needs a non-empty table of (r, value) pairs".into(),
            ));
        }
        if radii.iter().any(|r| !(0.0..1.0).contains(r)) {
            return Err(Error::InvalidParameter(
                "custom weight radii must lie in [0, 1)".into(),
            ));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "custom weight radii must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParameter(
                "custom weight values must be finite and strictly positive".into(),
            ));
        }
        Ok(RadialProfile {
            radii,
            values,
            source: source.into(),
        })
    }

    /// Reads whitespace- or comma-separated `r value` lines; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut radii = Vec::new();
        let mut values = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::Config(format!(
                        "{}:{}: invalid number '{s}'",
                        path.display(),
                        n + 1
                    ))
                })
            };
            match fields.as_slice() {
                [r, v] => {
                    radii.push(parse(r)?);
                    values.push(parse(v)?);
                }
                _ => {
                    return Err(Error::Config(format!(
                        "{}:{}: expected two columns",
                        path.display(),
                        n + 1
                    )))
                }
            }
        }
        RadialProfile::new(radii, values, path.display().to_string())
    }

    pub fn eval(&self, r: f64) -> f64 {
        let i = self.radii.partition_point(|&x| x <= r);
        if i == 0 {
            return self.values[0];
        }
        if i == self.radii.len() {
            return self.values[i - 1];
        }
        let (r0, r1) = (self.radii[i - 1], self.radii[i]);
        let t = (r - r0) / (r1 - r0);
        self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind {
    /// `(1 - |z|^2)^α`.
    Standard {
        alpha: f64,
    },
    /// `w log(2 / w)` with `w = 1 - |z|^2`.
    Logarithmic,
    CustomRadial(RadialProfile),
}

/// A bounded, strictly positive radial weight, optionally multiplied by a
/// positive constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    kind: WeightKind,
    scale: f64,
}

impl Weight {
    pub fn standard(alpha: f64) -> Result<Self> {
        validate_alpha(alpha)?;
        Ok(Weight {
            kind: WeightKind::Standard { alpha },
            scale: 1.0,
        })
    }

    pub fn logarithmic() -> Self {
        Weight {
            kind: WeightKind::Logarithmic,
            scale: 1.0,
        }
    }

    pub fn custom(profile: RadialProfile) -> Self {
        Weight {
            kind: WeightKind::CustomRadial(profile),
            scale: 1.0,
        }
    }

    /// The weight `c μ`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "weight multiplier must be positive, got {c}"
            )));
        }
        Ok(Weight {
            kind: self.kind.clone(),
            scale: self.scale * c,
        })
    }

    /// Parses a weight specification string.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some((factor, rest)) = spec.split_once('*') {
            let c: f64 = factor
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("invalid weight multiplier '{factor}'")))?;
            return Weight::parse(rest)?.scaled(c);
        }
        let lower = spec.to_ascii_lowercase();
        if lower == "log" {
            return Ok(Weight::logarithmic());
        }
        if let Some(alpha) = lower.strip_prefix("valpha:") {
            let alpha: f64 = alpha
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("invalid weight exponent in '{spec}'")))?;
            return Weight::standard(alpha).map_err(|e| Error::Config(e.to_string()));
        }
        if lower.starts_with("custom:") {
            let path = spec["custom:".len()..].trim();
            return Ok(Weight::custom(RadialProfile::from_file(Path::new(path))?));
        }
        Err(Error::Config(format!(
            "unknown weight '{spec}' (expected valpha:<a>, log or custom:<path>)"
        )))
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `Some(α)` for an unscaled standard weight.
    pub fn standard_alpha(&self) -> Option<f64> {
        match self.kind {
            WeightKind::Standard { alpha } if self.scale == 1.0 => Some(alpha),
            _ => None,
        }
    }

    /// Value at a point of modulus `r`.
    pub fn at_radius(&self, r: f64) -> f64 {
        let base = match &self.kind {
            WeightKind::Standard { alpha } => ((1.0 - r) * (1.0 + r)).powf(*alpha),
            WeightKind::Logarithmic => {
                let w = (1.0 - r) * (1.0 + r);
                w * (2.0 / w).ln()
            }
            WeightKind::CustomRadial(profile) => profile.eval(r),
        };
        self.scale * base
    }

    pub fn at(&self, z: DiskPoint) -> f64 {
        self.at_radius(z.modulus())
    }

    /// Supremum of the weight over the disk.
    pub fn bound(&self) -> f64 {
        let base = match &self.kind {
            WeightKind::Standard { .. } => 1.0,
            WeightKind::Logarithmic => 2.0 / std::f64::consts::E,
            WeightKind::CustomRadial(profile) => profile.max(),
        };
        self.scale * base
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale != 1.0 {
            write!(f, "{}*", self.scale)?;
        }
        match &self.kind {
            WeightKind::Standard { alpha } => write!(f, "valpha:{alpha}"),
            WeightKind::Logarithmic => f.write_str("log"),
            WeightKind::CustomRadial(p) => write!(f, "custom:{}", p.source),
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn weight_at(weight: &Weight, z: DiskPoint) -> f64 {
    weight.at(z)
}

/// Checks `r v_α(z) < v_α(r z)` (with `1e-15` slack) on every sample.
pub fn check_dilation_inequality(alpha: f64, samples: &[(f64, DiskPoint)]) -> Result<bool> {
    let v = Weight::standard(alpha)?;
    for &(r, z) in samples {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "dilation factor must lie in (0, 1), got {r}"
            )));
        }
        let rz = DiskPoint::new(r * z.re(), r * z.im())?;
        if r * v.at(z) >= v.at(rz) + 1e-15 {
            return Ok(false);
        }
    }
    Ok(true)
}
