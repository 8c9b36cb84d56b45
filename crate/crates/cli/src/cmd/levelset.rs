use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use hl_core::holder::{random_standard_paf, RandomPafOptions};
use hl_core::levelset::{well_conducting_census, D1};
use hl_core::rational::parse_ratio;
use hl_core::{BigRational, Error, LevelSetTree, LevelValue, PiecewiseAffineFn, TriangleAddress, VertexFunction};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::{write_json, CsvSink, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FnKind {
    /// Seeded standard piecewise affine function.
    Random,
    /// Values 0, 0, 1 at the corners of the base triangle.
    Affine,
    Constant,
}

#[derive(Args, Debug, Serialize)]
pub struct FnArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = FnKind::Random)]
    pub function: FnKind,

    /// Level of the random function.
    #[arg(long, default_value_t = 3)]
    pub fn_level: u32,

    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,

    /// Hölder constant certified for the random function.
    #[arg(long, default_value_t = 0.9)]
    pub c: f64,

    /// Tree depth in steps of `l` levels.
    #[arg(long, default_value_t = 5)]
    pub depth: u32,

    #[arg(long, default_value_t = 1)]
    pub l: u32,

    /// Fixed level value (`p/q` or decimal) instead of sampling.
    #[arg(long)]
    pub r: Option<String>,

    /// Number of sampled level values.
    #[arg(long, default_value_t = 20)]
    pub r_count: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct LevelsetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub f: FnArgs,

    /// Largest `k` of the conservation checks.
    #[arg(long, default_value_t = 3)]
    pub k: u32,

    /// Also write the deepest approximate level sets as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct HistArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub f: FnArgs,

    /// Census exponent `d1` (`p/q` or decimal).
    #[arg(long, default_value = "1/2")]
    pub d1: String,
}

struct Sampled {
    r: BigRational,
    tree: LevelSetTree,
}

impl FnArgs {
    fn function(&self) -> Result<PiecewiseAffineFn> {
        let q = |n: i64| BigRational::from_integer(n.into());
        Ok(match self.function {
            FnKind::Random => random_standard_paf(self.seed, self.fn_level, self.alpha, self.c, RandomPafOptions::default())
                .context("drawing the random function")?,
            FnKind::Affine => PiecewiseAffineFn::affine([q(0), q(0), q(1)]),
            FnKind::Constant => PiecewiseAffineFn::constant(q(0)),
        })
    }

    /// Level values drawn from `seed + 1` on the grid `lo + (hi - lo) u/1009`;
    /// a flat root triangle uses `lo + (2u - 1009)/2018`. Values meeting a
    /// vertex value are redrawn.
    fn sample(&self, f: &PiecewiseAffineFn) -> Result<Vec<Sampled>> {
        let build = |r: &BigRational| LevelSetTree::build(f, &LevelValue::new(r.clone()), self.l, self.depth);
        if let Some(text) = &self.r {
            let r = parse_ratio(text)?;
            let tree = build(&r)?;
            return Ok(vec![Sampled { r, tree }]);
        }
        let (lo, hi) = hull(f)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(1));
        let mut out = Vec::with_capacity(self.r_count);
        for _ in 0..self.r_count {
            let mut tries = 0;
            loop {
                let u: i64 = rng.gen_range(1..1009);
                let r = if lo == hi {
                    &lo + BigRational::new((2 * u - 1009).into(), 2018.into())
                } else {
                    &lo + (&hi - &lo) * BigRational::new(u.into(), 1009.into())
                };
                match build(&r) {
                    Ok(tree) => {
                        out.push(Sampled { r, tree });
                        break;
                    }
                    Err(Error::LevelCollision { vertex }) => {
                        eprintln!("r = {r} equals f({vertex}); resampling");
                        tries += 1;
                        if tries == 100 {
                            bail!("no admissible level value after 100 draws");
                        }
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Ok(out)
    }
}

fn hull(f: &PiecewiseAffineFn) -> Result<(BigRational, BigRational)> {
    let v = f.triangle_values(&TriangleAddress::root())?;
    let lo = v.iter().min().cloned().unwrap_or_default();
    let hi = v.iter().max().cloned().unwrap_or_default();
    Ok((lo, hi))
}

pub fn run(args: &LevelsetArgs, cfg: &RunConfig) -> Result<bool> {
    let f = args.f.function()?;
    let (lo, hi) = hull(&f)?;
    let sampled = args.f.sample(&f)?;
    let mut sink = CsvSink::open(
        cfg,
        &[
            "r_index",
            "r",
            "members",
            "kappa_sum",
            "kappa_max",
            "inside_hull",
            "conservation_checked",
            "conservation_equalities",
            "conservation_failures",
            "mass_ok",
        ],
    )?;
    let mut ok = true;
    let mut deepest = Vec::with_capacity(sampled.len());
    for (i, s) in sampled.iter().enumerate() {
        let cons = s.tree.conservation_all(args.k);
        let mass = s.tree.measure_summary();
        let inside = lo < s.r && s.r < hi;
        // with Δ₀ a member, the conductivities on each level sum to at least 1
        let mut kappa_ok = true;
        if inside {
            for m in 0..=s.tree.depth() {
                if s.tree.level_set(m)?.kappa_sum() < BigRational::one() {
                    eprintln!("r = {}: Σκ < 1 on level {m}", s.r);
                    kappa_ok = false;
                }
            }
        }
        for failure in &cons.failures {
            eprintln!("r = {}: conservation fails: {failure:?}", s.r);
        }
        let mass_ok = mass.total_mass_ok && mass.mu_le_kappa_ok;
        ok &= cons.passed() && mass_ok && kappa_ok;
        let set = s.tree.level_set(s.tree.depth())?;
        let last = s.tree.summary().pop().context("empty tree")?;
        sink.row([
            i.to_string(),
            s.r.to_string(),
            set.members.len().to_string(),
            last.kappa_sum.to_string(),
            last.kappa_max.to_string(),
            inside.to_string(),
            cons.checked.to_string(),
            cons.equalities.to_string(),
            cons.failures.len().to_string(),
            mass_ok.to_string(),
        ])?;
        deepest.push(set);
    }
    sink.finish()?;
    if let Some(path) = &args.json {
        write_json(path, cfg, &deepest)?;
    }
    Ok(ok)
}

pub fn run_hist(args: &HistArgs, cfg: &RunConfig) -> Result<bool> {
    let d1: D1 = args.d1.parse()?;
    let f = args.f.function()?;
    let sampled = args.f.sample(&f)?;
    let mut hist: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for s in &sampled {
        for m in 0..=s.tree.depth() {
            for member in s.tree.level_set(m)?.members {
                *hist.entry((m, member.kappa_exp)).or_default() += 1;
            }
        }
    }
    let mut sink = CsvSink::open(cfg, &["level", "kappa_exp", "count"])?;
    for ((level, exp), count) in &hist {
        sink.row([level.to_string(), exp.to_string(), count.to_string()])?;
    }
    sink.finish()?;

    let mut ok = true;
    for n in 1..=args.f.depth {
        if d1.times(n).is_err() {
            continue;
        }
        let rep = well_conducting_census(&f, n, args.f.l, d1, args.f.alpha)?;
        eprintln!(
            "census n = {n}: {} well-conducting triangles, binomial bound {:.4e}{}",
            rep.count,
            rep.binomial_bound,
            if rep.passes() { "" } else { "  EXCEEDED" }
        );
        ok &= rep.passes();
    }
    Ok(ok)
}
