//! Random expression trees for property checks.

use num_complex::Complex64;
use rand::Rng;

use super::AnalyticMap;
use crate::disk::DiskPoint;

fn disk_point<R: Rng>(rng: &mut R, max_modulus: f64) -> DiskPoint {
    let r = max_modulus * rng.gen::<f64>().sqrt();
    let t = rng.gen_range(0.0..std::f64::consts::TAU);
    DiskPoint::from_polar(r, t).expect("radius below one")
}

fn complex<R: Rng>(rng: &mut R, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

/// A random self-map of the disk built from automorphisms, Blaschke
/// products, dilations, monomials and compositions.
pub fn random_self_map<R: Rng>(rng: &mut R, depth: usize) -> AnalyticMap {
    let leaf = depth <= 1 || rng.gen_bool(0.35);
    if leaf {
        return match rng.gen_range(0..4) {
            0 => AnalyticMap::Identity,
            1 => AnalyticMap::Monomial(rng.gen_range(1..=4)),
            2 => AnalyticMap::Mobius(disk_point(rng, 0.8)),
            _ => AnalyticMap::Blaschke {
                zeros: (0..rng.gen_range(1..=3))
                    .map(|_| disk_point(rng, 0.8))
                    .collect(),
                factor: Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)),
            },
        };
    }
    match rng.gen_range(0..2) {
        0 => AnalyticMap::Dilation {
            r: rng.gen_range(0.2..1.0),
            inner: Box::new(random_self_map(rng, depth - 1)),
        },
        _ => AnalyticMap::compose(
            random_self_map(rng, depth - 1),
            random_self_map(rng, depth - 1),
        ),
    }
}

/// A random analytic function on the disk of depth at most `depth`.
pub fn random_tree<R: Rng>(rng: &mut R, depth: usize) -> AnalyticMap {
    let leaf = depth <= 1 || rng.gen_bool(0.3);
    if leaf {
        return match rng.gen_range(0..7) {
            0 => AnalyticMap::Identity,
            1 => AnalyticMap::Constant(complex(rng, 1.0)),
            2 => AnalyticMap::Monomial(rng.gen_range(1..=5)),
            3 => AnalyticMap::Affine {
                a: complex(rng, 1.0),
                b: complex(rng, 1.0),
            },
            4 => AnalyticMap::Mobius(disk_point(rng, 0.8)),
            5 => AnalyticMap::Polynomial(
                (0..rng.gen_range(1..=5))
                    .map(|_| complex(rng, 1.0))
                    .collect(),
            ),
            _ => AnalyticMap::Sigma {
                alpha: rng.gen_range(0.5..3.0),
                a: disk_point(rng, 0.9),
            },
        };
    }
    match rng.gen_range(0..5) {
        0 => AnalyticMap::Dilation {
            r: rng.gen_range(0.2..1.0),
            inner: Box::new(random_tree(rng, depth - 1)),
        },
        // the inner map keeps values in the disk, away from poles and branch cuts
        1 => AnalyticMap::compose(random_tree(rng, depth - 1), random_self_map(rng, depth - 1)),
        2 => AnalyticMap::scale(complex(rng, 2.0), random_tree(rng, depth - 1)),
        3 => AnalyticMap::sum(random_tree(rng, depth - 1), random_tree(rng, depth - 1)),
        _ => AnalyticMap::product(random_tree(rng, depth - 1), random_tree(rng, depth - 1)),
    }
}

/// A polynomial of degree at most `max_degree` with coefficients in the unit square.
pub fn random_polynomial<R: Rng>(rng: &mut R, max_degree: usize) -> AnalyticMap {
    let degree = rng.gen_range(0..=max_degree);
    AnalyticMap::Polynomial((0..=degree).map(|_| complex(rng, 1.0)).collect())
}

/// A uniformly distributed point with `|z| <= max_modulus`.
pub fn random_point<R: Rng>(rng: &mut R, max_modulus: f64) -> DiskPoint {
    disk_point(rng, max_modulus)
}
