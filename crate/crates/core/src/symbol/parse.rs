//! Recursive-descent parser for the symbol grammar.
//!
//! ```text
//! expr    := "identity" | "const(" complex ")" | "pow(" int ")"
//!          | "mobius(" complex ")" | "affine(" complex "," complex ")"
//!          | "poly(" complex {"," complex} ")" | "blaschke(" complex {"," complex} ")"
//!          | "dilate(" real "," expr ")" | "scale(" complex "," expr ")"
//!          | "compose(" expr "," expr ")" | "sum(" expr "," expr ")"
//!          | "product(" expr "," expr ")" | "sigma(" real "," complex ")"
//! complex := real | real ("+" | "-") real "i" | real "i"
//! ```
//!
//! Keywords are case-insensitive and whitespace is ignored. Positions in
//! errors are character offsets into the input.

use num_complex::Complex64;

use super::AnalyticMap;
use crate::disk::DiskPoint;
use crate::error::{Error, Result};
use crate::sigma;

pub fn parse_symbol(text: &str) -> Result<AnalyticMap> {
    let chars: Vec<(usize, char)> = text
        .chars()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(i, c)| (i, c.to_ascii_lowercase()))
        .collect();
    let mut p = Parser {
        chars,
        pos: 0,
        len: text.chars().count(),
    };
    let map = p.expr()?;
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(map)
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |(i, _)| *i)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            position: self.offset(),
            message: message.into(),
        }
    }

    fn error_at(position: usize, message: impl Into<String>) -> Error {
        Error::Syntax {
            position,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).map(|(_, c)| *c)
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected '{want}', found '{c}'"))),
            None => Err(self.error(format!("expected '{want}', found end of input"))),
        }
    }

    fn ident(&mut self) -> Result<(usize, String)> {
        let start = self.offset();
        let mut name = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_alphabetic()) {
            name.push(c);
            self.pos += 1;
            // names do not continue across whitespace
            if self.offset() != self.chars[self.pos - 1].0 + 1 {
                break;
            }
        }
        if name.is_empty() {
            return Err(self.error("expected a function name"));
        }
        Ok((start, name))
    }

    fn expr(&mut self) -> Result<AnalyticMap> {
        let (start, name) = self.ident()?;
        if name == "identity" {
            return Ok(AnalyticMap::Identity);
        }
        self.expect('(')?;
        let map = match name.as_str() {
            "const" => AnalyticMap::Constant(self.complex()?),
            "pow" => {
                let at = self.offset();
                let j = self.real()?;
                if j.fract() != 0.0 || j < 1.0 || j > f64::from(u32::MAX) {
                    return Err(Self::error_at(
                        at,
                        format!("pow exponent must be a positive integer, got {j}"),
                    ));
                }
                AnalyticMap::Monomial(j as u32)
            }
            "mobius" => AnalyticMap::Mobius(self.disk_point()?),
            "affine" => {
                let a = self.complex()?;
                self.expect(',')?;
                let b = self.complex()?;
                AnalyticMap::Affine { a, b }
            }
            "poly" => AnalyticMap::Polynomial(self.list(Self::complex)?),
            "blaschke" => AnalyticMap::Blaschke {
                zeros: self.list(Self::disk_point)?,
                factor: Complex64::new(1.0, 0.0),
            },
            "dilate" => {
                let at = self.offset();
                let r = self.real()?;
                if !(0.0..=1.0).contains(&r) {
                    return Err(Self::error_at(
                        at,
                        format!("parameter out of range: dilation factor {r} not in [0, 1]"),
                    ));
                }
                self.expect(',')?;
                AnalyticMap::Dilation {
                    r,
                    inner: Box::new(self.expr()?),
                }
            }
            "scale" => {
                let c = self.complex()?;
                self.expect(',')?;
                match self.expr()? {
                    // printed form of a Blaschke product with a rotation factor
                    AnalyticMap::Blaschke { zeros, factor }
                        if factor == Complex64::new(1.0, 0.0) =>
                    {
                        AnalyticMap::Blaschke { zeros, factor: c }
                    }
                    inner => AnalyticMap::scale(c, inner),
                }
            }
            "compose" | "sum" | "product" => {
                let left = self.expr()?;
                self.expect(',')?;
                let right = self.expr()?;
                match name.as_str() {
                    "compose" => AnalyticMap::compose(left, right),
                    "sum" => AnalyticMap::sum(left, right),
                    _ => AnalyticMap::product(left, right),
                }
            }
            "sigma" => {
                let at = self.offset();
                let alpha = self.real()?;
                sigma::validate_alpha(alpha)
                    .map_err(|e| Self::error_at(at, format!("parameter out of range: {e}")))?;
                self.expect(',')?;
                AnalyticMap::Sigma {
                    alpha,
                    a: self.disk_point()?,
                }
            }
            _ => return Err(Self::error_at(start, format!("unknown function '{name}'"))),
        };
        self.expect(')')?;
        Ok(map)
    }

    fn list<T>(&mut self, item: fn(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        let mut out = vec![item(self)?];
        while self.peek() == Some(',') {
            self.pos += 1;
            out.push(item(self)?);
        }
        Ok(out)
    }

    fn disk_point(&mut self) -> Result<DiskPoint> {
        let at = self.offset();
        let z = self.complex()?;
        DiskPoint::from_complex(z).map_err(|_| {
            Self::error_at(
                at,
                format!("parameter out of range: |{}{:+}i| >= 1", z.re, z.im),
            )
        })
    }

    fn sign(c: Option<char>) -> Option<f64> {
        match c {
            Some('+') => Some(1.0),
            Some('-') | Some('\u{2212}') => Some(-1.0),
            _ => None,
        }
    }

    fn complex(&mut self) -> Result<Complex64> {
        let re = self.real()?;
        if self.peek() == Some('i') {
            self.pos += 1;
            return Ok(Complex64::new(0.0, re));
        }
        if let Some(s) = Self::sign(self.peek()) {
            if self
                .peek_at(1)
                .is_some_and(|c| c.is_ascii_digit() || c == '.')
            {
                self.pos += 1;
                let im = self.unsigned_real()?;
                self.expect('i')?;
                return Ok(Complex64::new(re, s * im));
            }
        }
        Ok(Complex64::new(re, 0.0))
    }

    fn real(&mut self) -> Result<f64> {
        let s = Self::sign(self.peek());
        if s.is_some() {
            self.pos += 1;
        }
        Ok(s.unwrap_or(1.0) * self.unsigned_real()?)
    }

    fn unsigned_real(&mut self) -> Result<f64> {
        let start = self.pos;
        let at = self.offset();
        let mut text = String::new();
        let digits = |p: &mut Self, text: &mut String| {
            let mut n = 0;
            while let Some(c) = p.peek().filter(|c| c.is_ascii_digit()) {
                text.push(c);
                p.pos += 1;
                n += 1;
            }
            n
        };
        let mut n = digits(self, &mut text);
        if self.peek() == Some('.') {
            text.push('.');
            self.pos += 1;
            n += digits(self, &mut text);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.error("expected a number"));
        }
        if self.peek() == Some('e') {
            let save = self.pos;
            let mut exp = String::from("e");
            self.pos += 1;
            if let Some(s) = Self::sign(self.peek()) {
                exp.push(if s < 0.0 { '-' } else { '+' });
                self.pos += 1;
            }
            if digits(self, &mut exp) == 0 {
                self.pos = save;
            } else {
                text.push_str(&exp);
            }
        }
        text.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Self::error_at(at, format!("invalid number '{text}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_terminals() {
        assert_eq!(parse_symbol("identity").unwrap(), AnalyticMap::Identity);
        assert_eq!(parse_symbol("  IDENTITY ").unwrap(), AnalyticMap::Identity);
        assert_eq!(
            parse_symbol("mobius(0.5+0i)").unwrap(),
            AnalyticMap::Mobius(DiskPoint::new(0.5, 0.0).unwrap())
        );
        assert_eq!(
            parse_symbol("const(2)").unwrap(),
            AnalyticMap::Constant(Complex64::new(2.0, 0.0))
        );
    }

    #[test]
    fn nested_expression() {
        let m = parse_symbol("compose(pow(2), dilate(0.9, identity))").unwrap();
        let z = DiskPoint::new(0.3, -0.2).unwrap();
        let expect = (z.to_complex() * 0.9).powu(2);
        assert!((m.eval(z) - expect).norm() < 1e-15);
    }

    #[test]
    fn complex_literals() {
        let m = parse_symbol("affine(1e-1-2.5E-1i, -0.5i)").unwrap();
        assert_eq!(
            m,
            AnalyticMap::Affine {
                a: Complex64::new(0.1, -0.25),
                b: Complex64::new(0.0, -0.5)
            }
        );
        let m = parse_symbol("const(0.25\u{2212}1i)").unwrap();
        assert_eq!(m, AnalyticMap::Constant(Complex64::new(0.25, -1.0)));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_symbol("compose(pow(2), dilate(0.9 identity))") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 27),
            other => panic!("{other:?}"),
        }
        match parse_symbol("mobius(1+0i)") {
            Err(Error::Syntax { position, message }) => {
                assert_eq!(position, 7);
                assert!(message.contains("out of range"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_symbol("pow(0)"), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse_symbol("pow(1.5)"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_symbol("dilate(1.5, identity)"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_symbol("frobnicate(1)"),
            Err(Error::Syntax { position: 0, .. })
        ));
        assert!(matches!(
            parse_symbol("identity)"),
            Err(Error::Syntax { position: 8, .. })
        ));
        assert!(matches!(
            parse_symbol(""),
            Err(Error::Syntax { position: 0, .. })
        ));
    }
}
