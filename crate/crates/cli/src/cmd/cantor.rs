use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use hl_core::cantor::{capacity_gap, product_separated_structure, FatCantorSet};
use hl_core::rational::ratio_to_f64;
use serde::Serialize;

use crate::grid::parse_grid;
use crate::output::{write_json, CsvSink, RunConfig};
use crate::Precision;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CantorTable {
    /// `λ(C_n)` for `n <= depth`.
    Measure,
    /// Gap sums against their closed-form bound, `k <= depth`.
    Capacity,
    /// The product structure on `C × C`, `k <= depth`.
    Structure,
}

#[derive(Args, Debug, Serialize)]
pub struct CantorArgs {
    #[arg(long, value_enum, default_value_t = CantorTable::Measure)]
    pub table: CantorTable,

    #[arg(long, default_value_t = 20)]
    pub depth: u32,

    /// α values of the capacity table.
    #[arg(long, default_value = "0.4,0.55,0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95,1")]
    pub grid: String,

    /// Also write the structure certificate as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

pub fn run(args: &CantorArgs, precision: Precision, cfg: &RunConfig) -> Result<bool> {
    match args.table {
        CantorTable::Measure => measure(args, precision, cfg),
        CantorTable::Capacity => capacity(args, cfg),
        CantorTable::Structure => structure(args, cfg),
    }
}

fn measure(args: &CantorArgs, precision: Precision, cfg: &RunConfig) -> Result<bool> {
    let mut sink = CsvSink::open(cfg, &["n", "measure", "removal_agrees"])?;
    let mut ok = true;
    for n in 0..=args.depth {
        let closed = FatCantorSet::measure(n);
        let agrees = closed == FatCantorSet::measure_by_removal(n);
        ok &= agrees;
        let shown = match precision {
            Precision::Double => ratio_to_f64(&closed).to_string(),
            Precision::Big => closed.to_string(),
        };
        sink.row([n.to_string(), shown, agrees.to_string()])?;
    }
    sink.finish()?;
    Ok(ok)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn capacity(args: &CantorArgs, cfg: &RunConfig) -> Result<bool> {
    let grid = parse_grid(&args.grid)?;
    let mut sink = CsvSink::open(
        cfg,
        &["k", "alpha", "direct_sum", "closed_form_bound", "ratio_to_interval", "closed_form_ratio", "within_bound", "diverges"],
    )?;
    let mut ok = true;
    for g in &grid {
        for k in 1..=args.depth {
            let c = capacity_gap(k, g.value)?;
            ok &= c.diverges || c.within_bound();
            sink.row([
                k.to_string(),
                g.text.clone(),
                c.direct_sum.to_string(),
                opt(c.closed_form_bound),
                c.ratio_to_interval.to_string(),
                opt(c.closed_form_ratio),
                c.within_bound().to_string(),
                c.diverges.to_string(),
            ])?;
        }
    }
    sink.finish()?;
    Ok(ok)
}

fn structure(args: &CantorArgs, cfg: &RunConfig) -> Result<bool> {
    let s = product_separated_structure(args.depth)?;
    let mut sink = CsvSink::open(cfg, &["k", "pieces", "max_diam", "min_dist", "diam_ok", "dist_ok"])?;
    for l in &s.levels {
        sink.row([
            l.k.to_string(),
            l.pieces.to_string(),
            l.max_diam.to_string(),
            l.min_dist.to_string(),
            l.diam_ok.to_string(),
            l.dist_ok.to_string(),
        ])?;
    }
    sink.finish()?;
    if let Some(path) = &args.json {
        write_json(path, cfg, &s)?;
    }
    Ok(s.certified)
}
