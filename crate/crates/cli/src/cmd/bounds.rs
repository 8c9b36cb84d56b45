use anyhow::Result;
use clap::Args;
use hl_core::bounds::{bounds_sweep, lower_bound_big, trivial_upper_bound_big, upper_bound_big};
use serde::Serialize;

use crate::grid::{parse_grid, GridPoint};
use crate::output::{CsvSink, RunConfig};
use crate::Precision;

#[derive(Args, Debug, Serialize)]
pub struct BoundsArgs {
    /// A single α; overrides --grid.
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Comma-separated α values, `uniform:N`, or empty.
    #[arg(long, default_value = "uniform:99")]
    pub grid: String,

    /// Digits after the point with --precision big.
    #[arg(long, default_value_t = 50)]
    pub digits: usize,
}

pub fn run(args: &BoundsArgs, precision: Precision, cfg: &RunConfig) -> Result<bool> {
    let grid = match args.alpha {
        Some(a) => vec![GridPoint::from_f64(a)],
        None => parse_grid(&args.grid)?,
    };
    let mut sink = CsvSink::open(cfg, &["alpha", "lower", "upper", "trivial"])?;
    let mut ok = true;
    match precision {
        Precision::Double => {
            let values: Vec<f64> = grid.iter().map(|g| g.value).collect();
            for (g, row) in grid.iter().zip(bounds_sweep(&values)?) {
                ok &= row.ordered();
                sink.row([g.text.clone(), row.lower.to_string(), row.upper.to_string(), row.trivial.to_string()])?;
            }
        }
        Precision::Big => {
            let trivial = trivial_upper_bound_big(args.digits)?;
            for g in &grid {
                let lo = lower_bound_big(&g.text, args.digits)?;
                let up = upper_bound_big(&g.text, args.digits)?;
                ok &= 0.0 < lo.value && lo.value < up.value && up.value < trivial.value;
                sink.row([g.text.as_str(), &lo.decimal, &up.decimal, &trivial.decimal])?;
            }
        }
    }
    sink.finish()?;
    Ok(ok)
}
