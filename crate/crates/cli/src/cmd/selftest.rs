use anyhow::Result;
use hl_core::bounds::{bounds_sweep, feasible_l, lower_bound, trivial_upper_bound_sierpinski, uniform_grid, upper_bound, witness_box_count};
use hl_core::cantor::{capacity_gap, feasibility_search, phase_perturbation, product_separated_structure, FatCantorSet, PhaseTransitionConfig};
use hl_core::geometry::{lattice_count, lattice_hits, HorizontalLevel};
use hl_core::holder::{random_standard_paf, RandomPafOptions};
use hl_core::levelset::{well_conducting_census, D1};
use hl_core::{BernoulliWitnessFn, BigRational, LevelSetTree, LevelValue, TriangleAddress, VertexFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::output::{CsvSink, RunConfig};

type Check = fn() -> Result<bool>;

const CHECKS: &[(&str, Check)] = &[
    ("bound values at alpha 1", bound_values),
    ("bound ordering on 99 points", bound_ordering),
    ("lattice count law", lattice_law),
    ("conservation and measure", conservation),
    ("census", census),
    ("witness slope", witness_slope),
    ("fat cantor measure", fat_cantor),
    ("capacity bound", capacity),
    ("separated structure and feasibility", feasibility),
    ("phase perturbation", perturbation),
];

pub fn run(cfg: &RunConfig) -> Result<bool> {
    let mut sink = CsvSink::open(cfg, &["check", "status", "detail"])?;
    let mut all = true;
    for (name, check) in CHECKS {
        let (status, detail) = match check() {
            Ok(true) => ("PASS", String::new()),
            Ok(false) => ("FAIL", String::new()),
            Err(e) => ("FAIL", format!("{e:#}")),
        };
        all &= status == "PASS";
        sink.row([*name, status, &detail])?;
    }
    sink.finish()?;
    Ok(all)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn bound_values() -> Result<bool> {
    Ok((lower_bound(1.0)? - 0.08295).abs() <= 5e-5
        && upper_bound(1.0)? == 0.5
        && (trivial_upper_bound_sierpinski() - 0.584962500721).abs() <= 1e-11)
}

fn bound_ordering() -> Result<bool> {
    Ok(bounds_sweep(&uniform_grid(99))?.iter().all(|r| r.ordered()))
}

fn lattice_law() -> Result<bool> {
    for bits in 0..16u32 {
        let digits: Vec<u8> = (0..4).map(|k| ((bits >> (3 - k)) & 1) as u8).collect();
        let line = HorizontalLevel::from_digits(&digits)?;
        let law = 1u128 << digits.iter().filter(|&&d| d == 0).count();
        if lattice_count(&line) != law || lattice_hits(&line)?.up as u128 != law {
            return Ok(false);
        }
    }
    Ok(true)
}

fn conservation() -> Result<bool> {
    let f = random_standard_paf(42, 3, 0.5, 0.9, RandomPafOptions::default())?;
    let v = f.triangle_values(&TriangleAddress::root())?;
    let (lo, hi) = (v.iter().min().unwrap(), v.iter().max().unwrap());
    for u in [101, 307, 503, 701, 907] {
        let r = lo + (hi - lo) * q(u, 1009);
        let tree = match LevelSetTree::build(&f, &LevelValue::new(r), 1, 5) {
            Err(hl_core::Error::LevelCollision { .. }) => continue,
            t => t?,
        };
        let m = tree.measure_summary();
        if !(tree.conservation_all(3).passed() && m.total_mass_ok && m.mu_le_kappa_ok) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn census() -> Result<bool> {
    let d1 = D1::new(1, 2)?;
    let f = random_standard_paf(7, 3, 0.5, 0.9, RandomPafOptions::default())?;
    for n in [2, 4, 6] {
        if !well_conducting_census(&f, n, 1, d1, 0.5)?.passes() {
            return Ok(false);
        }
    }
    Ok(feasible_l(1.0, d1)? == 6)
}

fn witness_slope() -> Result<bool> {
    let w = BernoulliWitnessFn::new(0.5)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut sum = 0.0;
    for _ in 0..20 {
        sum += witness_box_count(&w.sample_digits(&mut rng, 1000), None)?.slope;
    }
    Ok((sum / 20.0 - (1.0 - 0.5f64.sqrt())).abs() <= 0.02)
}

fn fat_cantor() -> Result<bool> {
    for n in 0..=30u32 {
        let expected = q(1 << n, (1 << (n + 1)) - 1);
        if FatCantorSet::measure(n) != expected || FatCantorSet::measure_by_removal(n) != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

fn capacity() -> Result<bool> {
    for k in 1..=20 {
        for a in 11..=20 {
            if !capacity_gap(k, a as f64 * 0.05)?.within_bound() {
                return Ok(false);
            }
        }
    }
    Ok(capacity_gap(5, 0.4)?.diverges)
}

fn feasibility() -> Result<bool> {
    let s = product_separated_structure(10)?;
    let low = feasibility_search(0.4, 0.5, 1.0, &s, 60)?;
    let high = feasibility_search(0.6, 0.5, 1.0, &s, 60)?;
    Ok(s.certified && low.first_feasible_k.is_some() && high.infeasible_up_to == Some(60))
}

fn perturbation() -> Result<bool> {
    let base = |x: &BigRational, y: &BigRational| (x + y) * q(1, 4);
    let rep = phase_perturbation(base, &PhaseTransitionConfig::new(0.6, q(1, 2), 3))?;
    Ok(rep.large_change && rep.passes)
}
