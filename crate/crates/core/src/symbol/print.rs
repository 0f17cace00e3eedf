use std::fmt::{self, Display, Formatter, Write};

use num_complex::Complex64;

use super::AnalyticMap;

/// Shortest round-trip form accepted by the parser.
pub(crate) fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn fmt_list(items: impl Iterator<Item = Complex64>) -> String {
    let mut out = String::new();
    for (i, z) in items.enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&fmt_complex(z));
    }
    out
}

impl Display for AnalyticMap {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticMap::Constant(c) => write!(f, "const({})", fmt_complex(*c)),
            AnalyticMap::Identity => f.write_str("identity"),
            AnalyticMap::Monomial(j) => write!(f, "pow({j})"),
            AnalyticMap::Affine { a, b } => {
                write!(f, "affine({}, {})", fmt_complex(*a), fmt_complex(*b))
            }
            AnalyticMap::Mobius(a) => write!(f, "mobius({})", fmt_complex(a.to_complex())),
            AnalyticMap::Blaschke { zeros, factor } => {
                let product = format!(
                    "blaschke({})",
                    fmt_list(zeros.iter().map(|z| z.to_complex()))
                );
                if *factor == Complex64::new(1.0, 0.0) {
                    f.write_str(&product)
                } else {
                    write!(f, "scale({}, {product})", fmt_complex(*factor))
                }
            }
            AnalyticMap::Polynomial(coeffs) => {
                write!(f, "poly({})", fmt_list(coeffs.iter().copied()))
            }
            AnalyticMap::Dilation { r, inner } => write!(f, "dilate({r}, {inner})"),
            AnalyticMap::Compose { outer, inner } => write!(f, "compose({outer}, {inner})"),
            AnalyticMap::Scale { c, inner } => write!(f, "scale({}, {inner})", fmt_complex(*c)),
            AnalyticMap::Sum(l, r) => write!(f, "sum({l}, {r})"),
            AnalyticMap::Product(l, r) => write!(f, "product({l}, {r})"),
            AnalyticMap::Sigma { alpha, a } => {
                f.write_str("sigma(")?;
                write!(f, "{alpha}, ")?;
                f.write_str(&fmt_complex(a.to_complex()))?;
                f.write_char(')')
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::disk::DiskPoint;
    use crate::symbol::{parse_symbol, AnalyticMap};
    use num_complex::Complex64;

    #[test]
    fn canonical_forms() {
        let cases = [
            "identity",
            "const(2)",
            "pow(3)",
            "affine(0.5, 0.5)",
            "mobius(0.5-0.25i)",
            "poly(1, 0, -2+1e-7i)",
            "blaschke(0.5, 0-0.3i)",
            "dilate(0.9, identity)",
            "compose(pow(2), dilate(0.9, identity))",
            "sum(identity, product(pow(2), const(0+1i)))",
            "sigma(1.5, 0.25+0.5i)",
        ];
        for text in cases {
            let parsed = parse_symbol(text).unwrap();
            let printed = parsed.to_string();
            assert_eq!(
                parse_symbol(&printed).unwrap(),
                parsed,
                "{text} -> {printed}"
            );
        }
        assert_eq!(
            parse_symbol("Dilate( 0.5 , IDENTITY )")
                .unwrap()
                .to_string(),
            "dilate(0.5, identity)"
        );
    }

    #[test]
    fn unimodular_factor_prints_as_scale() {
        let b = AnalyticMap::Blaschke {
            zeros: vec![DiskPoint::new(0.5, 0.0).unwrap()],
            factor: Complex64::new(0.0, 1.0),
        };
        let printed = b.to_string();
        assert_eq!(printed, "scale(0+1i, blaschke(0.5))");
        let z = DiskPoint::new(0.1, 0.7).unwrap();
        assert!((parse_symbol(&printed).unwrap().eval(z) - b.eval(z)).norm() < 1e-15);
    }
}
