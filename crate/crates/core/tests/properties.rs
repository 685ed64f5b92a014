use std::collections::BTreeSet;

use kleinian::enumerate::{
    enumerate_index, enumerate_lexicographic, from_base, from_bijective_base, split_range, to_base,
    to_bijective_base,
};
use kleinian::groups::{make_schottky_group, make_tangent_inversion_group, PairRules};
use kleinian::moebius::FixedPoints;
use kleinian::render::{evaluate_orbit_endpoint, seed_point};
use kleinian::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn close(a: Complex, b: Complex, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

fn complex(r: f64) -> impl Strategy<Value = Complex> {
    (-r..r, -r..r).prop_map(|(x, y)| c(x, y))
}

fn map() -> impl Strategy<Value = MoebiusMap> {
    (complex(2.0), complex(2.0), complex(2.0), complex(2.0))
        .prop_filter("well conditioned", |(a, b, cc, d)| (a * d - b * cc).norm() > 0.25)
        .prop_map(|(a, b, cc, d)| MoebiusMap::new(a, b, cc, d).unwrap())
}

fn finite(p: Point) -> Option<Complex> {
    p.finite().filter(|z| z.norm() < 1e6)
}

fn schottky() -> GeneratorSet {
    let unit = |x: f64, y: f64| Circle::new(c(x, y), 1.0).unwrap();
    make_schottky_group(unit(-2.0, 0.0), unit(2.0, 0.0), unit(0.0, -2.0), unit(0.0, 2.0)).unwrap()
}

fn tangent4() -> GeneratorSet {
    let s = 2f64.sqrt();
    let unit = |x: f64, y: f64| Circle::new(c(x, y), 1.0).unwrap();
    make_tangent_inversion_group([unit(s, 0.0), unit(0.0, s), unit(-s, 0.0), unit(0.0, -s)]).unwrap()
}

proptest! {
    #[test]
    fn composition_is_a_homomorphism(g1 in map(), g2 in map(), z in complex(3.0)) {
        let inner = g2.apply(Point::Finite(z));
        let stepwise = finite(inner).and_then(|w| finite(g1.apply(Point::Finite(w))));
        prop_assume!(stepwise.is_some());
        let composed = finite(g1.compose(&g2).apply(Point::Finite(z)));
        prop_assume!(composed.is_some());
        prop_assert!(close(stepwise.unwrap(), composed.unwrap(), 1e-9));
    }

    #[test]
    fn composition_is_associative(g1 in map(), g2 in map(), g3 in map(), z in complex(3.0)) {
        let left = finite(g1.compose(&g2).compose(&g3).apply(Point::Finite(z)));
        let right = finite(g1.compose(&g2.compose(&g3)).apply(Point::Finite(z)));
        prop_assume!(left.is_some() && right.is_some());
        prop_assert!(close(left.unwrap(), right.unwrap(), 1e-9));
    }

    #[test]
    fn inverse_undoes(g in map(), z in complex(3.0)) {
        let there = g.apply(Point::Finite(z));
        prop_assume!(finite(there).is_some());
        let back = g.inverse().apply(there).finite().unwrap();
        prop_assert!(close(back, z, 1e-9));
    }

    #[test]
    fn fixed_points_are_fixed(g in map()) {
        let fixed = g.fixed_points();
        prop_assert!(fixed != FixedPoints::AllPoints);
        for lambda in fixed.finite_points() {
            let image = g.apply(Point::Finite(lambda)).finite().unwrap();
            prop_assert!((image - lambda).norm() <= 1e-9 * (1.0 + lambda.norm()));
        }
    }

    #[test]
    fn circle_inversion_is_an_involution(center in complex(2.0), r in 0.1f64..3.0, z in complex(4.0)) {
        let circle = Circle::new(center, r).unwrap();
        prop_assume!((z - center).norm() > 1e-3);
        let once = circle.invert_point(Point::Finite(z));
        let twice = circle.invert_point(once).finite().unwrap();
        prop_assert!((twice - z).norm() <= 1e-12 * (1.0 + z.norm()) * (1.0 + (r / (z - center).norm()).powi(2)));
    }

    #[test]
    fn reduction_is_idempotent_and_keeps_the_element(
        digits in proptest::collection::vec(0u8..4, 0..12),
        z in complex(0.5),
    ) {
        let gs = schottky();
        let rules = gs.presentation_rules();
        let word = Word::from(digits.clone());
        let reduced = rules.reduce(&word).unwrap();
        prop_assert!(rules.is_reduced(reduced.digits()));
        prop_assert_eq!(rules.reduce(&reduced).unwrap(), reduced.clone());
        let full = finite(evaluate_orbit_endpoint(&digits, &gs, z));
        let short = finite(evaluate_orbit_endpoint(reduced.digits(), &gs, z));
        prop_assume!(full.is_some() && short.is_some());
        prop_assert!(close(full.unwrap(), short.unwrap(), 1e-7));
    }

    #[test]
    fn orbit_endpoint_matches_composed_map(digits in proptest::collection::vec(0u8..4, 1..8), z in complex(0.5)) {
        let gs = schottky();
        let composed = digits.iter().fold(MoebiusMap::identity(), |acc, &d| {
            let kleinian::groups::GeneratorKind::Conformal(m) = gs.get(d).kind else { unreachable!() };
            acc.compose(&m)
        });
        let direct = finite(evaluate_orbit_endpoint(&digits, &gs, z));
        let via_map = finite(composed.apply(Point::Finite(z)));
        prop_assume!(direct.is_some() && via_map.is_some());
        prop_assert!(close(direct.unwrap(), via_map.unwrap(), 1e-9));
    }

    #[test]
    fn base_conversion_round_trips(i in any::<u64>(), n in 2usize..=36) {
        let i = i as u128;
        prop_assert_eq!(from_base(to_base(i, n).digits(), n), Some(i));
        if i > 0 {
            let w = to_bijective_base(i, n).unwrap();
            prop_assert_eq!(from_bijective_base(w.digits(), n), Some(i));
        }
    }

    #[test]
    fn bijective_order_is_shortlex(i in 1u64..1_000_000, j in 1u64..1_000_000, n in 2usize..=6) {
        prop_assume!(i < j);
        let a = to_bijective_base(i as u128, n).unwrap();
        let b = to_bijective_base(j as u128, n).unwrap();
        prop_assert!((a.len(), a.digits()) < (b.len(), b.digits()));
    }

    #[test]
    fn split_ranges_reproduce_the_unsplit_run(
        d in 1usize..6,
        parts in 1usize..9,
        self_inverse in any::<bool>(),
        cardinal in any::<bool>(),
    ) {
        let inverse = if self_inverse { vec![0, 1, 2] } else { vec![0, 2, 1] };
        let rules = CancellationRules::Presentation(PairRules::from_inverse_index(&inverse));
        let mode = if cardinal { EnumerationMode::IndexCardinal } else { EnumerationMode::IndexOrdinal };
        let cfg = EnumeratorConfig::new(3, d, mode).unwrap();
        let mut whole = Vec::new();
        enumerate_index(&rules, &cfg, &mut |w: &[u8]| whole.push(w.to_vec())).unwrap();
        let (a, b) = cfg.effective_range().unwrap();
        let mut pieces = Vec::new();
        for (s, e) in split_range(a, b, parts) {
            let sub = cfg.with_range(s, e).unwrap();
            enumerate_index(&rules, &sub, &mut |w: &[u8]| pieces.push(w.to_vec())).unwrap();
        }
        prop_assert_eq!(whole, pieces);
    }
}

#[test]
fn isometric_circle_maps_onto_the_inverse_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let gs = schottky();
    for g in gs.generators() {
        let kleinian::groups::GeneratorKind::Conformal(m) = g.kind else { unreachable!() };
        let from = m.isometric_circle().unwrap();
        let to = m.inverse().isometric_circle().unwrap();
        for _ in 0..100 {
            let t: f64 = rand::Rng::gen_range(&mut rng, 0.0..std::f64::consts::TAU);
            let image = m.apply(Point::Finite(from.point_at(t))).finite().unwrap();
            assert!(to.boundary_distance(image) < 1e-9);
        }
    }
}

/// Every generator moves a plotted limit point close to another plotted
/// point of depth at most d + 1.
#[test]
fn limit_set_is_invariant_on_a_sample() {
    let gs = tangent4();
    let rules = gs.presentation_rules();
    let d = 6;
    let seed = seed_point(&gs);
    let mut all = Vec::new();
    let mut top = Vec::new();
    enumerate_lexicographic(&rules, d + 1, false, &mut |w: &[u8]| {
        if let Some(z) = evaluate_orbit_endpoint(w, &gs, seed).finite() {
            all.push(z);
            if w.len() == d {
                top.push(z);
            }
        }
    });
    let pixel = 2.0 * 1.1 / 512.0;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sample: Vec<_> = top.choose_multiple(&mut rng, 200).copied().collect();
    assert_eq!(sample.len(), 200);
    for p in sample {
        for g in gs.generators() {
            let q = g.apply(Point::Finite(p)).finite().unwrap();
            let nearest = all.iter().map(|z| (z - q).norm()).fold(f64::INFINITY, f64::min);
            assert!(nearest <= 2.0 * pixel, "{p} under {} lands {nearest} away", g.label);
        }
    }
}

#[test]
fn ordinal_and_tree_sets_agree_for_a_cayley_table() {
    use kleinian::groups::{CayleyCell, CayleyTable};
    // a^3 = 1 written as a table over {a, A}: rows a, aa, A, AA
    let (a, big) = (0u8, 1u8);
    let r = |w: &[u8]| CayleyCell::Replace(w.to_vec());
    let table = CayleyTable::new(
        2,
        vec![
            (vec![a], vec![r(&[a, a]), CayleyCell::Cancel]),
            (vec![a, a], vec![CayleyCell::Cancel, CayleyCell::Cancel]),
            (vec![big], vec![CayleyCell::Cancel, r(&[big, big])]),
            (vec![big, big], vec![CayleyCell::Cancel, CayleyCell::Cancel]),
        ],
    )
    .unwrap();
    let rules = CancellationRules::Cayley(table);
    let mut tree = BTreeSet::new();
    enumerate_lexicographic(&rules, 6, false, &mut |w: &[u8]| {
        tree.insert(w.to_vec());
    });
    let cfg = EnumeratorConfig::new(2, 6, EnumerationMode::IndexOrdinal).unwrap();
    let mut ordinal = BTreeSet::new();
    enumerate_index(&rules, &cfg, &mut |w: &[u8]| {
        ordinal.insert(w.to_vec());
    })
    .unwrap();
    assert_eq!(tree, ordinal);
    let expected: BTreeSet<Vec<u8>> = [vec![0], vec![1], vec![0, 0], vec![1, 1]].into_iter().collect();
    assert_eq!(tree, expected);
}
