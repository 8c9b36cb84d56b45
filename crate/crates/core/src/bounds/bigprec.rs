use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use serde::Serialize;

use crate::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// A bound evaluated in arbitrary precision.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BigValue {
    /// Decimal digits after the point, truncated to the requested count.
    pub decimal: String,
    pub value: f64,
}

struct Ctx {
    p: usize,
    cc: Consts,
}

impl Ctx {
    fn new(digits: usize) -> Result<Self> {
        if digits == 0 || digits > 10_000 {
            return Err(Error::param("digits", "must be in 1..=10000"));
        }
        // ~3.33 bits per digit plus guard words
        let p = (digits as f64 * 3.33) as usize + 128;
        let cc = Consts::new().map_err(|e| Error::InvariantViolation(format!("astro-float: {e:?}")))?;
        Ok(Ctx { p, cc })
    }

    fn int(&self, n: u64) -> BigFloat {
        BigFloat::from_u64(n, self.p)
    }

    fn parse(&mut self, s: &str) -> Result<BigFloat> {
        let x = BigFloat::parse(s, Radix::Dec, self.p, RM, &mut self.cc);
        if x.is_nan() {
            return Err(Error::Parse(format!("`{s}` is not a decimal number")));
        }
        Ok(x)
    }

    fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(self.p, RM, &mut self.cc)
    }

    fn finish(&mut self, x: &BigFloat, digits: usize) -> Result<BigValue> {
        let s = x
            .format(Radix::Dec, RM, &mut self.cc)
            .map_err(|e| Error::InvariantViolation(format!("astro-float: {e:?}")))?;
        let value: f64 = s.parse().map_err(|_| Error::InvariantViolation(format!("unparsable `{s}`")))?;
        Ok(BigValue { decimal: plain_decimal(&s, digits), value })
    }
}

/// Converts `d.ddde-k` to `0.0..ddd` with `digits` digits after the point.
/// Only values in `(0, 1)` occur here.
fn plain_decimal(s: &str, digits: usize) -> String {
    let (mant, exp) = s.split_once('e').unwrap_or((s, "0"));
    let exp: i64 = exp.parse().unwrap_or(0);
    let mant: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    // value = 0.<mant> × 10^(exp + 1)
    let shift = exp + 1;
    let body = if shift <= 0 {
        format!("{}{}", "0".repeat((-shift) as usize), mant)
    } else {
        // not expected for values below one
        return s.to_string();
    };
    let mut body: String = body.chars().take(digits).collect();
    while body.len() < digits {
        body.push('0');
    }
    format!("0.{body}")
}

fn check_alpha(alpha: &BigFloat, ctx: &Ctx) -> Result<()> {
    if alpha.is_zero() || !alpha.is_positive() || alpha.cmp(&ctx.int(1)).is_none_or(|c| c > 0) {
        return Err(Error::param("alpha", "must lie in (0, 1]"));
    }
    Ok(())
}

/// [`lower_bound`](super::lower_bound) with `alpha` given as a decimal string.
pub fn lower_bound_big(alpha: &str, digits: usize) -> Result<BigValue> {
    let mut ctx = Ctx::new(digits)?;
    let p = ctx.p;
    let a = ctx.parse(alpha)?;
    check_alpha(&a, &ctx)?;
    let (one, two, three) = (ctx.int(1), ctx.int(2), ctx.int(3));
    let ln2 = ctx.ln(&two);
    let ln3a = ctx.ln(&three.div(&a, p, RM));
    let den = one
        .add(&one.add(&ln3a, p, RM).div(&ln2, p, RM), p, RM)
        .add(&two.div(&a, p, RM), p, RM);
    let x = a.div(&two, p, RM).div(&den, p, RM);
    ctx.finish(&x, digits)
}

pub fn upper_bound_big(alpha: &str, digits: usize) -> Result<BigValue> {
    let mut ctx = Ctx::new(digits)?;
    let p = ctx.p;
    let a = ctx.parse(alpha)?;
    check_alpha(&a, &ctx)?;
    let pw = ctx.int(2).pow(&a.neg(), p, RM, &mut ctx.cc);
    let x = ctx.int(1).sub(&pw, p, RM);
    ctx.finish(&x, digits)
}

pub fn trivial_upper_bound_big(digits: usize) -> Result<BigValue> {
    let mut ctx = Ctx::new(digits)?;
    let p = ctx.p;
    let (l3, l2) = (ctx.ln(&ctx.int(3)), ctx.ln(&ctx.int(2)));
    let x = l3.div(&l2, p, RM).sub(&ctx.int(1), p, RM);
    ctx.finish(&x, digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_digits() {
        let t = trivial_upper_bound_big(60).unwrap();
        assert!(t.decimal.starts_with("0.584962500721156181453738943947816508759814407692481060455752"));
        assert_eq!(upper_bound_big("1", 50).unwrap().decimal, format!("0.5{}", "0".repeat(49)));
        let l = lower_bound_big("1", 50).unwrap();
        assert!(l.decimal.starts_with("0.08295096337978733757844503271728819312882263739386"));
        assert!((l.value - super::super::lower_bound(1.0).unwrap()).abs() < 1e-15);
        let u = upper_bound_big("0.5", 50).unwrap();
        // 1 - 1/sqrt 2
        assert!(u.decimal.starts_with("0.29289321881345247559915563789515096071516406231152"));
    }

    #[test]
    fn agrees_with_double_precision() {
        for a in ["0.1", "0.25", "0.5", "0.75", "0.9"] {
            let x: f64 = a.parse().unwrap();
            assert!((lower_bound_big(a, 50).unwrap().value - super::super::lower_bound(x).unwrap()).abs() < 1e-15);
            assert!((upper_bound_big(a, 50).unwrap().value - super::super::upper_bound(x).unwrap()).abs() < 1e-15);
        }
        assert!(lower_bound_big("0", 50).is_err());
        assert!(lower_bound_big("1.5", 50).is_err());
        assert!(lower_bound_big("abc", 50).is_err());
    }

    #[test]
    fn decimal_layout() {
        assert_eq!(plain_decimal("5.8496e-1", 6), "0.584960");
        assert_eq!(plain_decimal("8.29e-2", 5), "0.08290");
    }
}
