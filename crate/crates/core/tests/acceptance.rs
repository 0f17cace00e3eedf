//! Acceptance suite. Runs every criterion in order, prints one line per
//! criterion and exits non-zero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bloch_scope::disk::DiskPoint;
use bloch_scope::estimators::{criteria_compare, sigma_scan, zhao_estimate, ScanSettings, Verdict};
use bloch_scope::norm::{SearchSettings, Searcher};
use bloch_scope::sigma::{check_derivative_lower_bound, sigma_derivative_value};
use bloch_scope::symbol::random::random_tree;
use bloch_scope::symbol::{parse_symbol, AnalyticMap};
use bloch_scope::weights::{check_dilation_inequality, Weight};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, limit_secs: u64) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(limit_secs), || {
        format!("took {elapsed:.1?}, limit {limit_secs}s")
    })?;
    Ok(elapsed)
}

fn searcher() -> Searcher {
    Searcher::new(&SearchSettings::default()).expect("default settings")
}

fn random_disk_point(rng: &mut ChaCha8Rng, max_modulus: f64) -> DiskPoint {
    let r = max_modulus * rng.gen::<f64>().sqrt();
    DiskPoint::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU)).unwrap()
}

/// `‖σ_a‖_{B^α} <= α 2^α` on random parameters; for `α = 1` the norm is
/// also compared with its closed form `|a| / (1 + |a|)`.
fn sigma_norm_bound() -> Outcome {
    let start = Instant::now();
    let s = searcher();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_ratio: f64 = 0.0;
    for i in 0..200 {
        let alpha = if i % 10 == 0 {
            1.0
        } else {
            rng.gen_range(1e-3..=8.0)
        };
        let a = random_disk_point(&mut rng, 0.9999);
        let f = AnalyticMap::sigma(alpha, a).map_err(|e| e.to_string())?;
        let norm = s
            .bloch_norm(&f, &Weight::standard(alpha).unwrap())
            .map_err(|e| e.to_string())?;
        let bound = alpha * 2f64.powf(alpha);
        ensure(norm.total <= bound + 1e-9, || {
            format!("alpha={alpha} a={a}: norm {} > {bound}", norm.total)
        })?;
        if alpha == 1.0 {
            let exact = a.modulus() / (1.0 + a.modulus());
            ensure((norm.total - exact).abs() <= 1e-6 * exact.max(1e-3), || {
                format!("a={a}: norm {} vs closed form {exact}", norm.total)
            })?;
        }
        worst_ratio = worst_ratio.max(norm.total / bound);
    }
    let t = within_budget(start, 60)?;
    Ok(format!(
        "200 cases, max norm/bound {worst_ratio:.4} ({t:.1?})"
    ))
}

/// `|σ_a'(a)| >= α / (4 (1-|a|²)^α)` for `|a| > 1/2`.
fn derivative_lower_bound() -> Outcome {
    let start = Instant::now();
    let mut moduli: Vec<f64> = (51..=99).map(|k| f64::from(k) / 100.0).collect();
    moduli.push(0.999);
    let mut cases = 0;
    for alpha in [0.5, 1.0, 2.0, 4.0] {
        for &r in &moduli {
            for theta in [0.0, 1.0, 2.5, 4.0] {
                let a = DiskPoint::from_polar(r, theta).unwrap();
                // |σ_a'(a)| = α|a| / ((1 + |a|)(1 - |a|²)^α)
                let gap = (1.0 - r) * (1.0 + r);
                let exact = alpha * r / ((1.0 + r) * gap.powf(alpha));
                let bound = alpha / (4.0 * gap.powf(alpha));
                ensure(exact >= bound - 1e-12 * bound, || {
                    format!("closed form fails at alpha={alpha} r={r}")
                })?;
                let computed = sigma_derivative_value(alpha, a.to_complex(), a.to_complex()).norm();
                // agreement with the closed form, up to the conditioning of 1 - |a|²
                ensure((computed - exact).abs() <= 1e-10 * exact, || {
                    format!("alpha={alpha} a={a}: |σ'(a)| = {computed}, closed form {exact}")
                })?;
                ensure(
                    check_derivative_lower_bound(alpha, a).is_ok_and(|ok| ok),
                    || format!("library check rejects alpha={alpha} a={a}"),
                )?;
                cases += 1;
            }
        }
    }
    let t = within_budget(start, 1)?;
    Ok(format!("{cases} cases ({t:.1?})"))
}

/// `‖K_r f‖_{B^α} <= ‖f‖_{B^α}` for random polynomials.
fn dilation_contraction() -> Outcome {
    let start = Instant::now();
    let s = searcher();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let degree = rng.gen_range(0..=10);
        let coeffs: Vec<Complex64> = (0..=degree)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let f = AnalyticMap::polynomial(coeffs).unwrap();
        for alpha in [0.5, 1.0, 2.0] {
            for r in [0.3, 0.7, 0.95] {
                let (full, dilated) = s.dilate_and_norm(&f, r, alpha).map_err(|e| e.to_string())?;
                let excess = dilated.total - full.total;
                ensure(excess <= 1e-9, || {
                    format!(
                        "{f} alpha={alpha} r={r}: {} > {}",
                        dilated.total, full.total
                    )
                })?;
                worst = worst.max(excess);
                cases += 1;
            }
        }
    }
    let t = within_budget(start, 60)?;
    Ok(format!(
        "{cases} cases, max ‖K_r f‖ - ‖f‖ = {worst:.3e} ({t:.1?})"
    ))
}

/// `r v_α(z) < v_α(rz)` on random samples.
fn dilation_weight() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let alpha = rng.gen_range(1e-3..=8.0);
        let r = rng.gen_range(1e-6..1.0);
        let z = random_disk_point(&mut rng, 1.0 - 1e-9);
        let m2 = z.modulus() * z.modulus();
        let lhs = r * (1.0 - m2).powf(alpha);
        let rhs = (1.0 - r * r * m2).powf(alpha);
        ensure(lhs < rhs, || {
            format!("direct check fails at r={r} z={z} alpha={alpha}")
        })?;
        ensure(
            check_dilation_inequality(alpha, &[(r, z)]).is_ok_and(|ok| ok),
            || format!("library check fails at r={r} z={z} alpha={alpha}"),
        )?;
    }
    let t = within_budget(start, 1)?;
    Ok(format!("1000 samples ({t:.1?})"))
}

/// `sup_{0<=r<1} (1-r²)^α j r^(j-1)` in closed form.
fn monomial_seminorm(j: u32, alpha: f64) -> f64 {
    if j == 1 {
        return 1.0;
    }
    let jf = f64::from(j);
    let r2 = (jf - 1.0) / (jf - 1.0 + 2.0 * alpha);
    jf * (1.0 - r2).powf(alpha) * r2.powf((jf - 1.0) / 2.0)
}

/// Identity symbol on the Bloch space: `L`, bounds and the power criterion.
fn identity_sandwich() -> Outcome {
    let start = Instant::now();
    let s = searcher();
    let w = Weight::standard(1.0).unwrap();
    let phi = AnalyticMap::Identity;
    let scan =
        sigma_scan(&phi, 1.0, &w, &s, &ScanSettings::default()).map_err(|e| e.to_string())?;
    let l = scan.l_estimate;
    ensure((l - 0.5).abs() <= 1e-3, || format!("L = {l}"))?;
    // per-radius maxima follow |a| / (1 + |a|)
    for (r, m) in scan.radii.iter().zip(&scan.tail_max) {
        let exact = r / (1.0 + r);
        ensure((m - exact).abs() <= 1e-6 * exact, || {
            format!("radius {r}: {m} vs {exact}")
        })?;
    }
    let (lower, upper) = (l / 2.0, 8.0 * l);
    ensure(
        (lower - 0.25).abs() <= 1e-3 && (upper - 4.0).abs() <= 1e-2,
        || format!("bounds [{lower}, {upper}]"),
    )?;

    let zhao = zhao_estimate(&phi, 1.0, &w, 256, &s).map_err(|e| e.to_string())?;
    let oracle_tail = (193..=256)
        .map(|j| monomial_seminorm(j, 1.0))
        .fold(0.0, f64::max);
    let oracle = std::f64::consts::E / 2.0 * oracle_tail;
    ensure((zhao.estimate - oracle).abs() <= 1e-6 * oracle, || {
        format!("power estimate {} vs radial oracle {oracle}", zhao.estimate)
    })?;
    ensure((zhao.estimate - 1.0).abs() <= 5e-3, || {
        format!("power estimate {}", zhao.estimate)
    })?;
    ensure(lower <= 1.0 && 1.0 <= upper, || {
        "1 outside the bounds".into()
    })?;
    let t = within_budget(start, 120)?;
    Ok(format!(
        "L = {l:.7}, bounds [{lower:.4}, {upper:.4}], power estimate {:.5} ({t:.1?})",
        zhao.estimate
    ))
}

/// Compact and non-compact symbols, with agreement across criteria.
fn compactness() -> Outcome {
    let start = Instant::now();
    let s = searcher();
    let settings = ScanSettings::default();
    let cases = [
        ("dilate(0.5, identity)", Verdict::Compact),
        ("affine(0.5, 0.5)", Verdict::NonCompact),
        ("identity", Verdict::NonCompact),
    ];
    let mut summary = Vec::new();
    for (text, expected) in cases {
        let phi = parse_symbol(text).unwrap();
        let report = criteria_compare(&phi, 1.0, 1.0, &s, &settings).map_err(|e| e.to_string())?;
        let l = report.bounds.l;
        ensure(report.bounds.verdict == expected, || {
            format!(
                "{text}: verdict {:?}, expected {expected:?} (L = {l})",
                report.bounds.verdict
            )
        })?;
        ensure(report.agreement, || {
            format!("{text}: criteria disagree: {:?}", report.disagreements)
        })?;
        ensure(report.outcomes.len() == 3, || {
            format!("{text}: automorphism scan missing")
        })?;
        match expected {
            Verdict::Compact => ensure(l < 1e-3, || format!("{text}: L = {l}"))?,
            _ => ensure(l > 0.05, || format!("{text}: L = {l}"))?,
        }
        summary.push(format!("{text}: L={l:.3e}"));
    }
    // boundary quotient (1-|z|²)|φ'(z)| / (1-|φ(z)|²) for φ = (1+z)/2 at z -> 1
    let t: f64 = 1.0 - 1e-6;
    let quotient = (1.0 - t * t) * 0.5 / (1.0 - ((1.0 + t) / 2.0).powi(2));
    let phi = parse_symbol("affine(0.5, 0.5)").unwrap();
    let l = sigma_scan(&phi, 1.0, &Weight::standard(1.0).unwrap(), &s, &settings)
        .map_err(|e| e.to_string())?
        .l_estimate;
    ensure(
        quotient / 8.0 <= l * (1.0 + 1e-6) && l <= 2.0 * quotient,
        || format!("affine: L = {l} inconsistent with boundary quotient {quotient}"),
    )?;
    let t = within_budget(start, 300)?;
    Ok(format!("{} ({t:.1?})", summary.join(", ")))
}

/// Two-dimensional search against the closed-form monomial seminorm.
fn monomial_oracle() -> Outcome {
    let start = Instant::now();
    let s = Searcher::new(&SearchSettings {
        radial_fast_path: false,
        ..SearchSettings::default()
    })
    .unwrap();
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        let w = Weight::standard(alpha).unwrap();
        for j in 1..=64 {
            let f = AnalyticMap::monomial(j).unwrap();
            let est = s.bloch_seminorm(&f, &w).map_err(|e| e.to_string())?;
            let exact = monomial_seminorm(j, alpha);
            let rel = (est.value - exact).abs() / exact;
            ensure(rel <= 1e-6, || {
                format!("z^{j}, alpha={alpha}: {} vs {exact}", est.value)
            })?;
            worst = worst.max(rel);
        }
    }
    let t = within_budget(start, 120)?;
    Ok(format!("192 cases, max rel err {worst:.2e} ({t:.1?})"))
}

/// Structural derivatives against five-point central differences.
fn derivative_correctness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let f = random_tree(&mut rng, 4);
        for _ in 0..10 {
            let z = random_disk_point(&mut rng, 0.9);
            let at = |t: f64| f.eval(DiskPoint::from_complex(z.to_complex() + t).unwrap());
            let fd = (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h);
            let d = f.eval_derivative(z);
            let rel = (d - fd).norm() / d.norm().max(fd.norm()).max(1.0);
            ensure(rel < 1e-6, || format!("{f} at {z}: {d} vs {fd}"))?;
            worst = worst.max(rel);
        }
    }
    let t = within_budget(start, 10)?;
    Ok(format!(
        "1000 evaluations, max rel err {worst:.2e} ({t:.1?})"
    ))
}

/// Two `essential` runs yield byte-identical numeric fields.
fn determinism() -> Outcome {
    let run = |format: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_bloch-scope"))
            .args([
                "essential",
                "--symbol",
                "affine(0.5, 0.5)",
                "--alpha",
                "1",
                "--weight",
                "valpha:1",
            ])
            .args(["--format", format])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            String::from_utf8_lossy(&out.stderr).into_owned()
        })?;
        Ok(out.stdout)
    };
    let numeric = |bytes: &[u8]| -> Result<String, String> {
        let mut v: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
        v.as_object_mut()
            .ok_or("report is not an object")?
            .remove("timing");
        Ok(v.to_string())
    };
    let (a, b) = (run("json")?, run("json")?);
    ensure(numeric(&a)? == numeric(&b)?, || {
        "JSON numeric fields differ".into()
    })?;
    let (c, d) = (run("csv")?, run("csv")?);
    ensure(c == d, || "CSV reports differ".into())?;
    Ok(format!(
        "JSON and CSV reports identical ({} and {} bytes)",
        a.len(),
        c.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("sigma norm bound", sigma_norm_bound),
        ("sigma derivative lower bound", derivative_lower_bound),
        ("dilation contraction", dilation_contraction),
        ("dilation weight inequality", dilation_weight),
        ("identity sandwich", identity_sandwich),
        ("compactness classification", compactness),
        ("monomial oracle equivalence", monomial_oracle),
        ("derivative correctness", derivative_correctness),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
