//! Seeded sampler of standard piecewise affine functions.
//!
//! Values are built top-down by midpoint displacement on `V_{n-1}` with
//! amplitude `c · h · 2^{-kα}` at level `k`, rounded to multiples of
//! `2^-24`, and then standardized to level `n`. A draw is kept only if every
//! level-`(n-1)` triangle has three distinct values. When the Hölder
//! certificate at the requested depth fails, the draw is scaled by a dyadic
//! factor below `0.98 c / ratio` and certified again; standardization is
//! linear, so the ratio scales by the same factor.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::certificate::holder_certificate;
use super::paf::{PiecewiseAffineFn, VertexFunction};
use crate::geometry::{triangle_corners, TriangleAddress, Vertex};
use crate::{Error, Result};

const QUANTUM_BITS: u32 = 24;
const SCALE_DENOM: i64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomPafOptions {
    /// Relative displacement amplitude `h`.
    pub headroom: f64,
    /// The certificate is checked on `V_{n + extra}`.
    pub certificate_extra_depth: u32,
    pub max_attempts: u32,
}

impl Default for RandomPafOptions {
    fn default() -> Self {
        RandomPafOptions { headroom: 0.3, certificate_extra_depth: 2, max_attempts: 64 }
    }
}

/// Draws a standard, locally non-constant function at level `n >= 1` whose
/// Hölder certificate with constant `c` passes.
pub fn random_standard_paf(seed: u64, n: u32, alpha: f64, c: f64, opts: RandomPafOptions) -> Result<PiecewiseAffineFn> {
    if n == 0 {
        return Err(Error::param("n", "standard functions are produced at level >= 1"));
    }
    if n > 10 {
        return Err(Error::param("n", "levels above 10 are not sampled"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", "must lie in (0, 1]"));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::param("c", "must lie in (0, 1)"));
    }
    let mut last_reason = String::new();
    for attempt in 0..opts.max_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let coarse = displace(&mut rng, n - 1, alpha, c * opts.headroom)?;
        if let Some(t) = first_repeat(&coarse)? {
            last_reason = format!("triangle {t:?} at level {} has a repeated value", n - 1);
            continue;
        }
        let depth = n + opts.certificate_extra_depth;
        let f = coarse.standardize()?;
        let cert = holder_certificate(&f, alpha, c, depth)?;
        if cert.passes {
            return Ok(f);
        }
        let factor = (0.98 * c / cert.max_ratio * SCALE_DENOM as f64).floor() as i64;
        if factor > 0 {
            let s = BigRational::new(factor.into(), SCALE_DENOM.into());
            let scaled = PiecewiseAffineFn::from_table(
                coarse.level(),
                coarse.entries()?.into_iter().map(|(v, x)| (v, x * &s)).collect(),
            )?;
            let f = scaled.standardize()?;
            if holder_certificate(&f, alpha, c, depth)?.passes {
                return Ok(f);
            }
        }
        last_reason = format!("certificate ratio {} exceeds {c} at {:?}", cert.max_ratio, cert.witness_pair);
    }
    Err(Error::ResamplingCap { attempts: opts.max_attempts, reason: last_reason })
}

fn quantize(x: f64) -> i64 {
    (x * (1u64 << QUANTUM_BITS) as f64).round() as i64
}

fn displace(rng: &mut ChaCha8Rng, level: u32, alpha: f64, amp: f64) -> Result<PiecewiseAffineFn> {
    let mut table: HashMap<Vertex, i64> = HashMap::new();
    let [v1, v2, v3] = TriangleAddress::root().vertex_ids();
    table.insert(v1, 0);
    table.insert(v2, quantize(amp * rng.gen_range(-1.0..1.0)));
    table.insert(v3, quantize(amp * rng.gen_range(-1.0..1.0)));
    for k in 1..=level {
        let a = amp * 2f64.powf(-(k as f64) * alpha);
        for (i, j) in triangle_corners(k - 1) {
            let t = TriangleAddress::from_corner(i, j, k - 1)?;
            let vs = t.vertex_ids();
            for (x, y) in [(0, 1), (1, 2), (0, 2)] {
                let mid = Vertex::new(vs[x].at_level(k).0 + vs[y].at_level(k).0, vs[x].at_level(k).1 + vs[y].at_level(k).1, k + 1);
                let mean = (table[&vs[x]] + table[&vs[y]]) as f64 / 2.0;
                let val = quantize(mean / (1u64 << QUANTUM_BITS) as f64 + a * rng.gen_range(-1.0..1.0));
                table.insert(mid, val);
            }
        }
    }
    let denom = BigInt::from(1u64 << QUANTUM_BITS);
    let table = table.into_iter().map(|(v, x)| (v, BigRational::new(x.into(), denom.clone()))).collect();
    PiecewiseAffineFn::from_table(level, table)
}

fn first_repeat(f: &PiecewiseAffineFn) -> Result<Option<TriangleAddress>> {
    for (i, j) in triangle_corners(f.level()) {
        let t = TriangleAddress::from_corner(i, j, f.level())?;
        let [a, b, c] = f.triangle_values(&t)?;
        if a == b || b == c || a == c {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oversized_draws_are_rescaled() {
        let opts = RandomPafOptions { headroom: 50.0, certificate_extra_depth: 0, max_attempts: 3 };
        let f = random_standard_paf(1, 2, 0.5, 0.01, opts).unwrap();
        assert!(holder_certificate(&f, 0.5, 0.01, 2).unwrap().passes);
    }

    #[test]
    fn deterministic_in_seed() {
        let o = RandomPafOptions::default();
        let a = random_standard_paf(5, 3, 0.5, 0.9, o).unwrap();
        let b = random_standard_paf(5, 3, 0.5, 0.9, o).unwrap();
        assert_eq!(a.entries().unwrap(), b.entries().unwrap());
        let c = random_standard_paf(6, 3, 0.5, 0.9, o).unwrap();
        assert_ne!(a.entries().unwrap(), c.entries().unwrap());
    }

    #[test]
    fn level_four_is_standard_and_certified() {
        let f = random_standard_paf(42, 4, 0.5, 0.9, RandomPafOptions::default()).unwrap();
        assert_eq!(f.level(), 4);
        let cert = holder_certificate(&f, 0.5, 0.9, 6).unwrap();
        assert!(cert.max_ratio <= 0.9);
        for (i, j) in triangle_corners(4) {
            let t = TriangleAddress::from_corner(i, j, 4).unwrap();
            let [a, b, c] = f.triangle_values(&t).unwrap();
            let equal_pairs = (a == b) as u8 + (b == c) as u8 + (a == c) as u8;
            assert_eq!(equal_pairs, 1, "{t:?}");
        }
        assert!(f.is_locally_nonconstant().unwrap());
    }

    #[test]
    fn degenerate_draws_hit_the_cap() {
        // every displacement quantizes to zero, so each draw repeats a value
        let opts = RandomPafOptions { headroom: 1e-15, certificate_extra_depth: 0, max_attempts: 3 };
        match random_standard_paf(1, 2, 0.5, 0.5, opts) {
            Err(Error::ResamplingCap { attempts: 3, reason }) => assert!(reason.contains("repeated")),
            other => panic!("expected resampling cap, got {other:?}"),
        }
    }
}
