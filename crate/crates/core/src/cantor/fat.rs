use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::{Error, Result};

fn ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

fn pow2m1(m: u32) -> BigInt {
    (BigInt::one() << m) - 1
}

/// `l_n = 1/(2^{n+1} - 1)`, the length of each interval of `C_n`.
pub fn interval_length(n: u32) -> BigRational {
    ratio(BigInt::one(), pow2m1(n + 1))
}

/// `r_m = l_{m-1} - 2 l_m = 1/((2^m - 1)(2^{m+1} - 1))`, the gap opened at step `m >= 1`.
pub fn removal_length(m: u32) -> BigRational {
    assert!(m >= 1, "gaps are opened from step 1 on");
    ratio(BigInt::one(), pow2m1(m) * pow2m1(m + 1))
}

/// `C_n`: `2^n` closed intervals of length `l_n`, obtained from `[0,1]` by
/// removing the open middle of every interval at each step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FatCantorSet {
    pub depth: u32,
    #[serde(serialize_with = "ser_intervals")]
    pub intervals: Vec<(BigRational, BigRational)>,
}

fn ser_intervals<S: serde::Serializer>(
    v: &[(BigRational, BigRational)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (a, b) in v {
        seq.serialize_element(&[crate::rational::format_ratio(a), crate::rational::format_ratio(b)])?;
    }
    seq.end()
}

/// Deepest level materialized as an interval list.
pub const MAX_MATERIALIZED: u32 = 20;

impl FatCantorSet {
    pub fn level(n: u32) -> Result<Self> {
        if n > MAX_MATERIALIZED {
            return Err(Error::param("n", format!("interval lists are built up to depth {MAX_MATERIALIZED}")));
        }
        let mut intervals = vec![(BigRational::zero(), BigRational::one())];
        for m in 1..=n {
            let len = interval_length(m);
            intervals = intervals
                .into_iter()
                .flat_map(|(a, b)| {
                    let left = (a.clone(), &a + &len);
                    let right = (&b - &len, b);
                    [left, right]
                })
                .collect();
        }
        Ok(FatCantorSet { depth: n, intervals })
    }

    /// Left endpoint of interval `idx` of `C_n`, the binary digits of `idx`
    /// choosing left or right halves from the top down.
    pub fn left_endpoint(n: u32, idx: u64) -> Result<BigRational> {
        if n > 62 || idx >> n != 0 {
            return Err(Error::param("idx", format!("{idx} is not an interval of C_{n}")));
        }
        let mut x = BigRational::zero();
        for m in 1..=n {
            if idx >> (n - m) & 1 == 1 {
                x += interval_length(m - 1) - interval_length(m);
            }
        }
        Ok(x)
    }

    pub fn interval(n: u32, idx: u64) -> Result<(BigRational, BigRational)> {
        let a = Self::left_endpoint(n, idx)?;
        let b = &a + interval_length(n);
        Ok((a, b))
    }

    /// `λ(C_n) = 2^n/(2^{n+1} - 1)`.
    pub fn measure(n: u32) -> BigRational {
        ratio(BigInt::one() << n, pow2m1(n + 1))
    }

    /// `1 - Σ_{m<=n} 2^{m-1} r_m`, accumulated gap by gap.
    pub fn measure_by_removal(n: u32) -> BigRational {
        (1..=n).fold(BigRational::one(), |acc, m| acc - removal_length(m) * BigRational::from_integer(BigInt::one() << (m - 1)))
    }

    pub fn total_length(&self) -> BigRational {
        self.intervals.iter().fold(BigRational::zero(), |acc, (a, b)| acc + (b - a))
    }

    /// The gaps between consecutive intervals.
    pub fn gaps(&self) -> Vec<BigRational> {
        self.intervals.windows(2).map(|w| &w[1].0 - &w[0].1).collect()
    }

    pub fn is_nested_in(&self, parent: &FatCantorSet) -> bool {
        parent.depth + 1 == self.depth
            && self.intervals.chunks(2).zip(&parent.intervals).all(|(kids, (a, b))| {
                kids[0].0 == *a && kids[1].1 == *b && kids[0].1 < kids[1].0
            })
    }
}
