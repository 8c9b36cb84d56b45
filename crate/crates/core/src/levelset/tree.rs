use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::labeling::extreme_labeling;
use crate::geometry::{boundary_family, BoundaryFamilyL, TriangleAddress};
use crate::holder::VertexFunction;
use crate::rational::{format_ratio, pow2_neg, ratio_to_f64, serde_ratio};
use crate::{Error, Result};

/// A level `r` that must avoid every vertex value met during a computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelValue {
    #[serde(with = "serde_ratio")]
    pub r: BigRational,
}

impl LevelValue {
    pub fn new(r: BigRational) -> Self {
        LevelValue { r }
    }

    /// Checks `r ∉ f(V_m)` eagerly.
    pub fn checked(r: BigRational, f: &(impl VertexFunction + ?Sized), m: u32) -> Result<Self> {
        for v in crate::geometry::vertex_set(m) {
            let val = if v.level() <= f.level() {
                f.vertex_value(&v)?
            } else {
                let (t, c) = v.incident().into_iter().next().ok_or(Error::MissingVertex(v))?;
                f.triangle_values(&t)?[c as usize].clone()
            };
            if val == r {
                return Err(Error::LevelCollision { vertex: v.address().unwrap_or_default() });
            }
        }
        Ok(LevelValue { r })
    }
}

/// One element of `G_n^l(r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub address: TriangleAddress,
    /// `κ = 2^-kappa_exp`.
    pub kappa_exp: u32,
    /// Mass of the conductivity-proportional measure; zero for members that
    /// are not `l,r`-descendants of `Δ₀`.
    #[serde(with = "serde_ratio")]
    pub mu: BigRational,
}

/// `G_n^l(r)` with conductivities and measure weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxLevelSet {
    #[serde(with = "serde_ratio")]
    pub r: BigRational,
    pub n: u32,
    pub l: u32,
    pub members: Vec<Member>,
}

impl ApproxLevelSet {
    pub fn addresses(&self) -> Vec<TriangleAddress> {
        self.members.iter().map(|m| m.address.clone()).collect()
    }

    pub fn kappa_sum(&self) -> BigRational {
        self.members.iter().fold(BigRational::zero(), |acc, m| acc + pow2_neg(m.kappa_exp))
    }
}

/// One CSV row: `(level, count, Σκ, max κ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSummary {
    pub level: u32,
    pub count: usize,
    pub kappa_sum: f64,
    pub kappa_max: f64,
}

#[derive(Clone, Debug)]
struct Node {
    address: TriangleAddress,
    values: [BigRational; 3],
    kappa_exp: u32,
    member: bool,
    /// Member whose whole ancestor chain up to `Δ₀` consists of members.
    descendant: bool,
    parent: Option<usize>,
    /// First level of the unbroken run of member ancestors ending here.
    run_start: u32,
    mu: BigRational,
}

/// All triangles of `τ_m^l`, `m <= n`, that can still meet the level set,
/// with conductivities and the measure `μ`.
///
/// A non-member is expanded only while `f` is not yet affine on it; once it
/// is, no subtriangle can contain `r` in the interior of its value hull.
#[derive(Clone, Debug)]
pub struct LevelSetTree {
    r: BigRational,
    l: u32,
    family: BoundaryFamilyL,
    levels: Vec<Vec<Node>>,
}

fn strictly_inside(r: &BigRational, v: &[BigRational; 3]) -> bool {
    v.iter().any(|x| x < r) && v.iter().any(|x| x > r)
}

impl LevelSetTree {
    pub fn build(f: &(impl VertexFunction + ?Sized), r: &LevelValue, l: u32, n: u32) -> Result<Self> {
        let family = boundary_family(l)?;
        let r = r.r.clone();
        let check = |t: &TriangleAddress, v: &[BigRational; 3]| -> Result<()> {
            if let Some(k) = v.iter().position(|x| *x == r) {
                let vertex = t.vertex_ids()[k];
                return Err(Error::LevelCollision { vertex: vertex.address().unwrap_or_default() });
            }
            Ok(())
        };
        let root = TriangleAddress::root();
        let rv = f.triangle_values(&root)?;
        check(&root, &rv)?;
        let member = strictly_inside(&r, &rv);
        let mut levels = vec![vec![Node {
            address: root,
            values: rv,
            kappa_exp: 0,
            member,
            descendant: member,
            parent: None,
            run_start: if member { 0 } else { 1 },
            mu: if member { BigRational::one() } else { BigRational::zero() },
        }]];
        for m in 0..n {
            let mut next = Vec::new();
            for (pi, p) in levels[m as usize].iter().enumerate() {
                let affine = p.address.level() >= f.level();
                if !p.member && affine {
                    continue;
                }
                let lab = extreme_labeling(&p.values);
                let extreme: Vec<usize> =
                    [lab.low, lab.high].into_iter().flatten().map(|c| family.corner_index(c as u8)).collect();
                let first_child = next.len();
                for (wi, w) in family.addresses.iter().enumerate() {
                    let address = p.address.concat(w.digits());
                    let values = f.triangle_values(&address)?;
                    check(&address, &values)?;
                    let member = strictly_inside(&r, &values);
                    let kappa_exp = p.kappa_exp + u32::from(!extreme.contains(&wi));
                    next.push(Node {
                        address,
                        values,
                        kappa_exp,
                        member,
                        descendant: member && p.descendant,
                        parent: Some(pi),
                        run_start: if !member {
                            m + 2
                        } else if p.member {
                            p.run_start
                        } else {
                            m + 1
                        },
                        mu: BigRational::zero(),
                    });
                }
                if p.descendant {
                    let kids = &mut next[first_child..];
                    let total = kids
                        .iter()
                        .filter(|c| c.descendant)
                        .fold(BigRational::zero(), |acc, c| acc + pow2_neg(c.kappa_exp));
                    if total.is_zero() {
                        return Err(Error::InvariantViolation(format!(
                            "{:?} belongs to G_{m} but has no member child",
                            p.address
                        )));
                    }
                    for c in kids.iter_mut().filter(|c| c.descendant) {
                        c.mu = &p.mu * pow2_neg(c.kappa_exp) / &total;
                    }
                }
            }
            levels.push(next);
        }
        Ok(LevelSetTree { r, l, family, levels })
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn family(&self) -> &BoundaryFamilyL {
        &self.family
    }

    pub fn level_set(&self, m: u32) -> Result<ApproxLevelSet> {
        let nodes = self.levels.get(m as usize).ok_or_else(|| Error::param("n", "beyond the built depth"))?;
        let mut members: Vec<Member> = nodes
            .iter()
            .filter(|x| x.member)
            .map(|x| Member { address: x.address.clone(), kappa_exp: x.kappa_exp, mu: x.mu.clone() })
            .collect();
        members.sort_by(|a, b| a.address.cmp(&b.address));
        Ok(ApproxLevelSet { r: self.r.clone(), n: m, l: self.l, members })
    }

    pub fn summary(&self) -> Vec<LevelSummary> {
        self.levels
            .iter()
            .enumerate()
            .map(|(m, nodes)| {
                let mem: Vec<&Node> = nodes.iter().filter(|x| x.member).collect();
                let sum = mem.iter().fold(BigRational::zero(), |acc, x| acc + pow2_neg(x.kappa_exp));
                let max = mem.iter().map(|x| x.kappa_exp).min().map_or(0.0, |e| 2f64.powi(-(e as i32)));
                LevelSummary { level: m as u32, count: mem.len(), kappa_sum: ratio_to_f64(&sum), kappa_max: max }
            })
            .collect()
    }

    fn find(&self, t: &TriangleAddress) -> Option<(u32, usize)> {
        let depth = t.level() / self.l;
        if t.level() % self.l != 0 {
            return None;
        }
        let nodes = self.levels.get(depth as usize)?;
        nodes.iter().position(|x| &x.address == t).map(|i| (depth, i))
    }

    /// `κ` of an `l,r`-descendant of `Δ₀`, as the exponent of `1/2`.
    pub fn conductivity(&self, t: &TriangleAddress) -> Result<u32> {
        match self.find(t) {
            Some((m, i)) if self.levels[m as usize][i].descendant => Ok(self.levels[m as usize][i].kappa_exp),
            _ => Err(Error::NotADescendant { address: t.clone() }),
        }
    }

    /// Weak conservation for one member `t` and `k >= 1` further levels.
    pub fn conservation(&self, t: &TriangleAddress, k: u32) -> Result<ConservationResult> {
        if k == 0 {
            return Err(Error::param("k", "must be at least 1"));
        }
        let (m, idx) = self.find(t).ok_or_else(|| Error::param("T", format!("{t:?} is not in the tree")))?;
        if !self.levels[m as usize][idx].member {
            return Err(Error::param("T", format!("{t:?} is not in G_{m}")));
        }
        if m + k > self.depth() {
            return Err(Error::param("k", "descendants beyond the built depth"));
        }
        let lhs = self.descendant_sums(m, k)[idx].clone();
        let rhs = pow2_neg(self.levels[m as usize][idx].kappa_exp);
        Ok(ConservationResult { address: t.clone(), k, pass: lhs >= rhs, lhs, rhs })
    }

    /// `Σ κ` over `D_r^l(T) ∩ τ_{m+k}^l` for every node `T` of level `m`.
    fn descendant_sums(&self, m: u32, k: u32) -> Vec<BigRational> {
        let mut sums = vec![BigRational::zero(); self.levels[m as usize].len()];
        for x in self.levels[(m + k) as usize].iter().filter(|x| x.member && x.run_start <= m) {
            let mut idx = x.parent.expect("deeper node has a parent");
            for lvl in (m + 1..m + k).rev() {
                idx = self.levels[lvl as usize][idx].parent.expect("deeper node has a parent");
            }
            sums[idx] += pow2_neg(x.kappa_exp);
        }
        sums
    }

    /// Checks weak conservation for every member of every level and every
    /// `1 <= k <= k_max` that fits in the tree.
    pub fn conservation_all(&self, k_max: u32) -> ConservationSummary {
        let mut out = ConservationSummary::default();
        for m in 0..=self.depth() {
            for k in 1..=k_max.min(self.depth() - m) {
                let sums = self.descendant_sums(m, k);
                for (x, lhs) in self.levels[m as usize].iter().zip(sums) {
                    if !x.member {
                        continue;
                    }
                    out.checked += 1;
                    let rhs = pow2_neg(x.kappa_exp);
                    if lhs < rhs {
                        out.failures.push(ConservationResult { address: x.address.clone(), k, lhs, rhs, pass: false });
                    } else if lhs == rhs {
                        out.equalities += 1;
                    }
                }
            }
        }
        out
    }

    /// Exact checks of `μ`: unit mass per level and `μ(T) <= κ(T)`.
    pub fn measure_summary(&self) -> MeasureSummary {
        let mut s = MeasureSummary { levels: 0, total_mass_ok: true, mu_le_kappa_ok: true, max_mu_over_kappa: 0.0 };
        if !self.levels[0][0].descendant {
            return s;
        }
        for nodes in &self.levels {
            s.levels += 1;
            let mut total = BigRational::zero();
            for x in nodes.iter().filter(|x| x.descendant) {
                total += &x.mu;
                let kappa = pow2_neg(x.kappa_exp);
                if x.mu > kappa {
                    s.mu_le_kappa_ok = false;
                }
                s.max_mu_over_kappa = s.max_mu_over_kappa.max(ratio_to_f64(&(&x.mu / kappa)));
            }
            if total != BigRational::one() {
                s.total_mass_ok = false;
            }
        }
        s
    }

    /// `μ` on the `l,r`-descendants of `Δ₀` at level `m`.
    pub fn measure(&self, m: u32) -> Result<BTreeMap<TriangleAddress, BigRational>> {
        let nodes = self.levels.get(m as usize).ok_or_else(|| Error::param("n", "beyond the built depth"))?;
        Ok(nodes.iter().filter(|x| x.descendant).map(|x| (x.address.clone(), x.mu.clone())).collect())
    }

    /// Descendants of `Δ₀` at level `m` with their conductivity exponent and mass.
    pub fn descendants(&self, m: u32) -> Vec<Member> {
        self.levels
            .get(m as usize)
            .map(|nodes| {
                nodes
                    .iter()
                    .filter(|x| x.descendant)
                    .map(|x| Member { address: x.address.clone(), kappa_exp: x.kappa_exp, mu: x.mu.clone() })
                    .collect()
            })
            .unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservationResult {
    pub address: TriangleAddress,
    pub k: u32,
    #[serde(serialize_with = "ser_ratio")]
    pub lhs: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub rhs: BigRational,
    pub pass: bool,
}

fn ser_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConservationSummary {
    pub checked: u64,
    pub equalities: u64,
    pub failures: Vec<ConservationResult>,
}

impl ConservationSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: ConservationSummary) {
        self.checked += other.checked;
        self.equalities += other.equalities;
        self.failures.extend(other.failures);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasureSummary {
    /// Levels on which `μ` was checked (0 when `Δ₀ ∉ G_0`).
    pub levels: u32,
    pub total_mass_ok: bool,
    pub mu_le_kappa_ok: bool,
    pub max_mu_over_kappa: f64,
}

/// `G_n^l(r)` with conductivities and `μ`.
pub fn approx_level_set(f: &(impl VertexFunction + ?Sized), r: &LevelValue, n: u32, l: u32) -> Result<ApproxLevelSet> {
    LevelSetTree::build(f, r, l, n)?.level_set(n)
}

/// `κ_n^l(T)` as the exponent `j` of `2^-j`; `T` must be an
/// `l,r`-descendant of `Δ₀`.
pub fn conductivity(f: &(impl VertexFunction + ?Sized), r: &LevelValue, t: &TriangleAddress, l: u32) -> Result<u32> {
    if t.level() % l != 0 {
        return Err(Error::NotADescendant { address: t.clone() });
    }
    LevelSetTree::build(f, r, l, t.level() / l)?.conductivity(t)
}

pub fn conservation_check(
    f: &(impl VertexFunction + ?Sized),
    r: &LevelValue,
    t: &TriangleAddress,
    k: u32,
    l: u32,
) -> Result<ConservationResult> {
    if t.level() % l != 0 {
        return Err(Error::param("T", "address length must be a multiple of l"));
    }
    LevelSetTree::build(f, r, l, t.level() / l + k)?.conservation(t, k)
}

/// `μ` on the level-`n` descendants of `Δ₀`.
pub fn conductivity_measure(
    f: &(impl VertexFunction + ?Sized),
    r: &LevelValue,
    n: u32,
    l: u32,
) -> Result<BTreeMap<TriangleAddress, BigRational>> {
    let tree = LevelSetTree::build(f, r, l, n)?;
    if !tree.levels[0][0].descendant {
        return Err(Error::param("r", "Δ₀ is not in G_0, so μ is undefined"));
    }
    tree.measure(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holder::PiecewiseAffineFn;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn apex() -> PiecewiseAffineFn {
        PiecewiseAffineFn::affine([q(0, 1), q(0, 1), q(1, 1)])
    }

    fn addrs(set: &ApproxLevelSet) -> Vec<String> {
        set.members.iter().map(|m| m.address.to_string()).collect()
    }

    #[test]
    fn constant_function_has_empty_level_sets() {
        let f = PiecewiseAffineFn::constant(q(1, 2));
        for n in 0..4 {
            let s = approx_level_set(&f, &LevelValue::new(q(1, 3)), n, 1).unwrap();
            assert!(s.members.is_empty());
        }
        assert!(matches!(
            approx_level_set(&f, &LevelValue::new(q(1, 2)), 1, 1),
            Err(Error::LevelCollision { .. })
        ));
    }

    #[test]
    fn first_level_membership() {
        // Midpoint values: v4 = 0, v5 = 1/2, v6 = 1/2. Child hulls are
        // [0, 1/2], [0, 1/2] and [1/2, 1].
        let f = apex();
        let s = approx_level_set(&f, &LevelValue::new(q(1, 3)), 1, 1).unwrap();
        assert_eq!(addrs(&s), ["0", "1"]);
        let s = approx_level_set(&f, &LevelValue::new(q(2, 3)), 1, 1).unwrap();
        assert_eq!(addrs(&s), ["2"]);
    }

    #[test]
    fn conductivity_of_first_children() {
        let f = apex();
        let r = LevelValue::new(q(1, 3));
        assert_eq!(conductivity(&f, &r, &TriangleAddress::root(), 1).unwrap(), 0);
        // v1 is the low extreme (tie with v2 collapses to v1)
        assert_eq!(conductivity(&f, &r, &"0".parse().unwrap(), 1).unwrap(), 0);
        assert_eq!(conductivity(&f, &r, &"1".parse().unwrap(), 1).unwrap(), 1);
        assert!(matches!(conductivity(&f, &r, &"2".parse().unwrap(), 1), Err(Error::NotADescendant { .. })));
    }

    #[test]
    fn conservation_at_the_root() {
        let f = apex();
        let r = LevelValue::new(q(1, 3));
        let c = conservation_check(&f, &r, &TriangleAddress::root(), 1, 1).unwrap();
        assert_eq!(c.lhs, q(3, 2));
        assert_eq!(c.rhs, q(1, 1));
        assert!(c.pass);
    }

    #[test]
    fn single_chain_conserves_with_equality() {
        // Along y = r the apex function has one extreme chain at v3 once r
        // is above every midpoint value met.
        let f = apex();
        let r = LevelValue::new(q(5, 6));
        let tree = LevelSetTree::build(&f, &r, 1, 3).unwrap();
        let s = tree.level_set(1).unwrap();
        assert_eq!(addrs(&s), ["2"]);
        let c = tree.conservation(&TriangleAddress::root(), 1).unwrap();
        assert_eq!(c.lhs, c.rhs);
        let m = tree.measure(1).unwrap();
        assert_eq!(m.values().next().unwrap(), &q(1, 1));
    }

    #[test]
    fn measure_splits_proportionally() {
        let f = apex();
        let m = conductivity_measure(&f, &LevelValue::new(q(1, 3)), 1, 1).unwrap();
        assert_eq!(m[&"0".parse().unwrap()], q(2, 3));
        assert_eq!(m[&"1".parse().unwrap()], q(1, 3));
        let tree = LevelSetTree::build(&f, &LevelValue::new(q(1, 3)), 1, 6).unwrap();
        let s = tree.measure_summary();
        assert!(s.total_mass_ok && s.mu_le_kappa_ok);
        assert!(s.max_mu_over_kappa <= 1.0);
        assert!(tree.conservation_all(3).passed());
    }

    #[test]
    fn boundary_family_levels() {
        let f = PiecewiseAffineFn::affine([q(0, 1), q(1, 3), q(1, 1)]);
        let r = LevelValue::new(q(1, 7));
        for l in 1..=3 {
            let tree = LevelSetTree::build(&f, &r, l, 2).unwrap();
            let s = tree.level_set(2).unwrap();
            assert!(!s.members.is_empty());
            assert!(s.members.iter().all(|m| m.address.level() == 2 * l));
            assert!(tree.conservation_all(2).passed());
            let ms = tree.measure_summary();
            assert!(ms.total_mass_ok && ms.mu_le_kappa_ok);
        }
    }

    #[test]
    fn json_shape() {
        let s = approx_level_set(&apex(), &LevelValue::new(q(1, 3)), 1, 1).unwrap();
        let js = serde_json::to_value(&s).unwrap();
        assert_eq!(js["r"], "1/3");
        assert_eq!(js["members"][0]["address"], "0");
        assert_eq!(js["members"][1]["kappa_exp"], 1);
        assert_eq!(js["members"][1]["mu"], "1/3");
        let back: ApproxLevelSet = serde_json::from_value(js).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn eager_level_check() {
        let f = apex().standardize().unwrap();
        assert!(LevelValue::checked(q(1, 2), &f, 3).is_err());
        assert!(LevelValue::checked(q(1, 3), &f, 3).is_ok());
    }
}
