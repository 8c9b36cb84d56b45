use anyhow::Result;
use clap::Args;
use hl_core::bounds::{witness_box_count, witness_dimension};
use hl_core::geometry::{lattice_count, lattice_hits, HorizontalLevel};
use hl_core::BernoulliWitnessFn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::{CsvSink, RunConfig};

/// Prefix length for the brute-force geometric recount of each stream.
const GEOMETRIC_DIGITS: usize = 8;

#[derive(Args, Debug, Serialize)]
pub struct WitnessArgs {
    /// Hölder exponent; the digit law is `P(1) = 2^-α`, so `0 < α < 1`.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,

    /// Digits per stream.
    #[arg(long, default_value_t = 1000)]
    pub depth: usize,

    #[arg(long, default_value_t = 20)]
    pub trials: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// First level of the slope fit (default: last half).
    #[arg(long)]
    pub window: Option<u32>,

    /// One row per level instead of one per trial.
    #[arg(long)]
    pub trace: bool,
}

pub fn run(args: &WitnessArgs, cfg: &RunConfig) -> Result<bool> {
    let w = BernoulliWitnessFn::new(args.alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut sink = CsvSink::open(cfg, &["trial", "n", "count", "log2count", "slope"])?;
    let mut ok = true;
    let mut slopes = Vec::with_capacity(args.trials);
    for trial in 0..args.trials {
        let digits = w.sample_digits(&mut rng, args.depth);
        let est = witness_box_count(&digits, args.window)?;
        let prefix = &digits[..digits.len().min(GEOMETRIC_DIGITS)];
        let line = HorizontalLevel::from_digits(prefix)?;
        if lattice_count(&line) != lattice_hits(&line)?.up as u128 {
            eprintln!("trial {trial}: digit recursion and geometric count disagree on {prefix:?}");
            ok = false;
        }
        let rows: Box<dyn Iterator<Item = _>> =
            if args.trace { Box::new(est.counts.iter()) } else { Box::new(est.counts.last().into_iter()) };
        for c in rows {
            sink.row([
                trial.to_string(),
                c.n.to_string(),
                format!("{:e}", c.count),
                c.log2_count.to_string(),
                est.slope.to_string(),
            ])?;
        }
        slopes.push(est.slope);
    }
    sink.finish()?;
    if !slopes.is_empty() {
        let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
        eprintln!("mean slope {mean:.5} over {} trials; 1 - 2^-α = {:.5}", slopes.len(), witness_dimension(args.alpha)?);
    }
    Ok(ok)
}
