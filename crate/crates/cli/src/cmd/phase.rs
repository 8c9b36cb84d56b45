use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use hl_core::cantor::{feasibility_search, phase_perturbation, product_separated_structure, Phase, PhaseTransitionConfig};
use hl_core::rational::{parse_ratio, ratio_to_f64};
use hl_core::BigRational;
use serde::Serialize;

use crate::output::{write_json, CsvSink, RunConfig};

/// Levels of `C × C` checked exactly before the search reuses `(ν, ρ, K)`.
const STRUCTURE_LEVELS: u32 = 10;

#[derive(Args, Debug, Serialize)]
pub struct PhaseArgs {
    #[arg(long, default_value_t = 0.6)]
    pub alpha: f64,

    /// Hölder constant `c < 1` (`p/q` or decimal).
    #[arg(long, default_value = "1/2")]
    pub c: String,

    /// Scale `M` of the function being approximated.
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,

    #[arg(long, default_value_t = 60)]
    pub k_max: u32,

    /// Cylinder level of the perturbation.
    #[arg(long, default_value_t = 3)]
    pub k: u32,

    /// Also write the perturbation report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

pub fn run(args: &PhaseArgs, cfg: &RunConfig) -> Result<bool> {
    let c = parse_ratio(&args.c)?;
    let s = product_separated_structure(args.k_max.clamp(2, STRUCTURE_LEVELS))?;
    let rep = feasibility_search(args.alpha, ratio_to_f64(&c), args.m, &s, args.k_max)?;
    let mut sink = CsvSink::open(cfg, &["k", "lhs", "rhs", "log2_ratio", "feasible"])?;
    for r in &rep.rows {
        sink.row([r.k.to_string(), format!("{:e}", r.lhs), format!("{:e}", r.rhs), r.log2_ratio.to_string(), r.feasible.to_string()])?;
    }
    sink.finish()?;
    let mut ok = s.certified;
    match rep.phase {
        Phase::Below => match rep.first_feasible_k {
            Some(k) => eprintln!("feasible piecewise-constant approximation at k={k}"),
            None => {
                eprintln!("no feasible k up to {}", args.k_max);
                ok = false;
            }
        },
        Phase::Boundary => eprintln!("boundary: lhs/rhs does not depend on k; no conclusion"),
        Phase::Above => {
            // base f(x, y) = c (x + y)/2, perturbed around the first cylinder
            let half = BigRational::new(1.into(), 2.into());
            let cc = c.clone();
            let base = move |x: &BigRational, y: &BigRational| &cc * (x + y) * &half;
            let report = phase_perturbation(base, &PhaseTransitionConfig::new(args.alpha, c, args.k))?;
            let holds = rep.infeasible_up_to == Some(args.k_max) && report.large_change && report.passes;
            if holds {
                eprintln!("infeasible; perturbation certificate holds");
            } else {
                eprintln!("infeasible up to {:?}; perturbation certificate fails", rep.infeasible_up_to);
            }
            ok &= holds;
            if let Some(path) = &args.json {
                write_json(path, cfg, &report)?;
            }
        }
    }
    Ok(ok)
}
