use hl_core::holder::{random_standard_paf, RandomPafOptions};
use hl_core::{BigRational, Error, LevelSetTree, LevelValue, PiecewiseAffineFn, TriangleAddress, VertexFunction};
use proptest::prelude::*;

fn triangles(level: u32) -> Vec<TriangleAddress> {
    let mut out = vec![TriangleAddress::root()];
    for _ in 0..level {
        out = out.iter().flat_map(|t| t.children()).collect();
    }
    out
}

fn straddles(f: &PiecewiseAffineFn, t: &TriangleAddress, r: &BigRational) -> bool {
    let v = f.triangle_values(t).unwrap();
    v.iter().any(|x| x < r) && v.iter().any(|x| x > r)
}

fn level_in_hull(f: &PiecewiseAffineFn, u: i64) -> BigRational {
    let root = f.triangle_values(&TriangleAddress::root()).unwrap();
    let lo = root.iter().min().unwrap().clone();
    let hi = root.iter().max().unwrap().clone();
    &lo + (&hi - &lo) * BigRational::new(u.into(), 1009.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn members_match_brute_force(seed in 0u64..400, u in 1i64..1009) {
        let f = random_standard_paf(seed, 2, 0.5, 0.9, RandomPafOptions::default()).unwrap();
        let r = level_in_hull(&f, u);
        let tree = match LevelSetTree::build(&f, &LevelValue::new(r.clone()), 1, 5) {
            Err(Error::LevelCollision { .. }) => return Ok(()),
            other => other.unwrap(),
        };
        for m in f.level()..=5 {
            let got = tree.level_set(m).unwrap().addresses();
            let want: Vec<TriangleAddress> = triangles(m).into_iter().filter(|t| straddles(&f, t, &r)).collect();
            prop_assert!(!want.is_empty());
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn members_straddle_and_nest(seed in 0u64..400, u in 1i64..1009, l in 1u32..=3) {
        let f = random_standard_paf(seed, 2, 0.5, 0.9, RandomPafOptions::default()).unwrap();
        let r = level_in_hull(&f, u);
        let depth = 6 / l;
        let tree = match LevelSetTree::build(&f, &LevelValue::new(r.clone()), l, depth) {
            Err(Error::LevelCollision { .. }) => return Ok(()),
            other => other.unwrap(),
        };
        for m in 0..=depth {
            let set = tree.level_set(m).unwrap();
            for t in set.addresses() {
                prop_assert!(straddles(&f, &t, &r));
            }
            if m >= 1 && (m - 1) * l >= f.level() {
                let parents = tree.level_set(m - 1).unwrap().addresses();
                for t in set.addresses() {
                    let p = TriangleAddress::from_digits(t.digits()[..((m - 1) * l) as usize].to_vec()).unwrap();
                    prop_assert!(parents.contains(&p), "{:?} has no member parent", t);
                }
            }
        }
    }

    #[test]
    fn conservation_never_fails(seed in 0u64..400, u in 1i64..1009) {
        let f = random_standard_paf(seed, 3, 0.5, 0.9, RandomPafOptions::default()).unwrap();
        let r = level_in_hull(&f, u);
        let tree = match LevelSetTree::build(&f, &LevelValue::new(r), 1, 6) {
            Err(Error::LevelCollision { .. }) => return Ok(()),
            other => other.unwrap(),
        };
        let s = tree.conservation_all(4);
        prop_assert!(s.failures.is_empty(), "{:?}", s.failures);
        let m = tree.measure_summary();
        prop_assert!(m.total_mass_ok && m.mu_le_kappa_ok);
    }
}

#[test]
fn level_outside_the_range_is_empty() {
    let f = random_standard_paf(3, 2, 0.5, 0.9, RandomPafOptions::default()).unwrap();
    let root = f.triangle_values(&TriangleAddress::root()).unwrap();
    let above = root.iter().max().unwrap() + BigRational::new(1.into(), 7.into());
    let tree = LevelSetTree::build(&f, &LevelValue::new(above), 1, 4).unwrap();
    for m in 0..=4 {
        assert!(tree.level_set(m).unwrap().members.is_empty());
    }
}
