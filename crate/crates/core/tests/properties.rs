mod common;

use std::collections::HashSet;

use num_rational::Ratio;
use proptest::prelude::*;
use rand::Rng;

use common::{random_diagram, random_element, random_f, random_word, rng};
use thompson_core::generators::x0_power;
use thompson_core::io::{parse_certificate, parse_element, parse_inline, parse_word, serialize_certificate, serialize_element, serialize_inline};
use thompson_core::oracle::{word_length, BallIndex, DEFAULT_NODE_CAP};
use thompson_core::synth::synthesize_word;
use thompson_core::witness::{closing_element, WitnessOptions};
use thompson_core::word::bw;
use thompson_core::{verify, witness, Alphabet, BinaryWord, Class, Element, VerifyMode, WitnessConstants};

fn scaled() -> WitnessConstants {
    WitnessConstants::scaled(Ratio::new(1, 4), Ratio::from_integer(3), 4, 8).unwrap()
}

/// Every bit string of length `len`.
fn words_of_length(len: usize) -> impl Iterator<Item = BinaryWord> {
    (0u32..1 << len).map(move |bits| (0..len).fold(BinaryWord::empty(), |w, i| w.child((bits >> i & 1) as u8)))
}

proptest! {
    #[test]
    fn dipole_removal_is_confluent(seed: u64) {
        let mut r = rng(seed);
        let base = r.gen_range(1..=8);
        let monotone = r.gen_bool(0.5);
        let mut d = random_diagram(&mut r, base, monotone);
        for _ in 0..r.gen_range(0..6) {
            let i = r.gen_range(0..d.num_leaves());
            d.insert_dipole(i);
        }
        let reference = d.clone().reduce();
        for _ in 0..3 {
            prop_assert_eq!(d.clone().reduce_with(|k| r.gen_range(0..k)), reference.clone());
        }
    }

    #[test]
    fn group_axioms(seed: u64) {
        let mut r = rng(seed);
        let (a, b, c) = (random_element(&mut r), random_element(&mut r), random_element(&mut r));
        prop_assert_eq!(a.multiply(&b).multiply(&c), a.multiply(&b.multiply(&c)));
        prop_assert_eq!(a.multiply(&Element::identity()), a.clone());
        prop_assert!(a.multiply(&a.invert()).is_identity());
        prop_assert!(a.invert().multiply(&a).is_identity());
    }

    #[test]
    fn products_act_left_to_right(seed: u64) {
        let mut r = rng(seed);
        let (a, b) = (random_element(&mut r), random_element(&mut r));
        let ab = a.multiply(&b);
        let depth = [&a, &b, &ab].iter().flat_map(|e| e.pairs().iter().map(|p| p.0.len().max(p.1.len()))).max().unwrap();
        let len = (2 * depth).min(12);
        for w in words_of_length(len) {
            if let (Some(x), Some(y)) = (ab.apply_prefix(&w), a.apply_prefix(&w).and_then(|v| b.apply_prefix(&v))) {
                prop_assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn interval_copy_is_a_homomorphism(seed: u64) {
        let mut r = rng(seed);
        let (h1, h2) = (random_f(&mut r, 8), random_f(&mut r, 8));
        let u = common::random_tree(&mut r, 5).swap_remove(r.gen_range(0..5));
        let lhs = h1.multiply(&h2).copy_into_interval(&u).unwrap();
        let rhs = h1.copy_into_interval(&u).unwrap().multiply(&h2.copy_into_interval(&u).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn disjoint_supports_commute(seed: u64) {
        let mut r = rng(seed);
        let h = random_f(&mut r, 8);
        let other = random_f(&mut r, 8);
        // a acts only on [1], b only on [0]
        let a = other.copy_into_interval(&bw("1")).unwrap();
        let b = h.copy_into_interval(&bw("0")).unwrap();
        prop_assert!(a.fixes_interval_pointwise(&bw("0")));
        prop_assert_eq!(a.multiply(&b), b.multiply(&a));
    }

    #[test]
    fn classes_are_closed_under_products(seed: u64) {
        let mut r = rng(seed);
        let (fa, fb) = (random_f(&mut r, 10), random_f(&mut r, 10));
        prop_assert_eq!(fa.multiply(&fb).classify(), Class::F);
        let la = r.gen_range(0..10);
        let lb = r.gen_range(0..10);
        let (ta, tb) = (random_word(&mut r, Alphabet::B, la).eval(), random_word(&mut r, Alphabet::B, lb).eval());
        prop_assert_ne!(ta.multiply(&tb).classify(), Class::VOnly);
        prop_assert_eq!(random_word(&mut r, Alphabet::A, la).eval().classify(), Class::F);
    }

    #[test]
    fn lemma_parts_for_x0_and_its_inverse(seed: u64) {
        let mut r = rng(seed);
        let g = random_element(&mut r);
        prop_assume!(g.num_leaves() >= 4);
        let n = g.num_leaves();
        let (l0, l1) = g.edge_depths();
        for (sign, ell, near, side) in [(1, l0, ["1", "01"], "1"), (-1, l1, ["0", "10"], "0")] {
            let gx = g.multiply(&x0_power(sign));
            let m = gx.num_leaves();
            let depth = if sign > 0 { gx.edge_depths().0 } else { gx.edge_depths().1 };
            prop_assert!(m + 1 >= n && m <= n + 1);
            if ell == 1 {
                prop_assert!(m == n + 1 && depth == 1);
            } else {
                prop_assert!((m == n || m + 1 == n) && depth == ell - 1);
                if near.iter().any(|w| g.range_strictly_extends(&bw(w))) {
                    prop_assert!(m == n && gx.range_strictly_extends(&bw(side)));
                }
            }
        }
    }

    /// The power bound, on orbits that never drop below four leaves.
    #[test]
    fn power_bound_while_lemma_applies(seed: u64) {
        let mut r = rng(seed);
        let g = random_element(&mut r);
        prop_assume!(g.num_leaves() >= 4);
        let n = g.num_leaves() as i64;
        let (l0, l1) = g.edge_depths();
        for (sign, ell) in [(1, l0 as i64), (-1, l1 as i64)] {
            let mut acc = g.clone();
            for i in 0..=20 {
                let ni = acc.num_leaves() as i64;
                if ni < 4 {
                    break;
                }
                prop_assert!(ni >= n + i - 2 * (ell - 1));
                acc = acc.multiply(&x0_power(sign));
            }
        }
    }

    #[test]
    fn interval_copies_graft_onto_a_branch(seed: u64) {
        let mut r = rng(seed);
        let g = random_element(&mut r);
        let (u, v) = g.pairs()[r.gen_range(0..g.num_leaves())].clone();
        let h = random_f(&mut r, 10);
        let product = g.multiply(&h.copy_into_interval(&v).unwrap());
        prop_assert_eq!(product.num_leaves(), g.num_leaves() + h.num_leaves() - 1);
        let mut expected: HashSet<_> = g.pairs().iter().filter(|p| p.0 != u).cloned().collect();
        expected.extend(h.pairs().iter().map(|(w, z)| (u.concat(w), v.concat(z))));
        prop_assert_eq!(product.pairs().iter().cloned().collect::<HashSet<_>>(), expected);
    }

    #[test]
    fn synthesis_evaluates_back(seed: u64, alphabet in prop::sample::select(vec![Alphabet::A, Alphabet::B, Alphabet::C])) {
        let mut r = rng(seed);
        let len = r.gen_range(0..=10);
        let a = random_word(&mut r, alphabet, len).eval();
        let s = synthesize_word(&a, alphabet, 4).unwrap();
        prop_assert_eq!(s.word.eval(), a.clone());
        if let Some(d) = word_length(&a, alphabet, 4) {
            prop_assert!(s.word.length() == d as u64);
        }
    }

    #[test]
    fn word_length_is_at_most_word_size(seed: u64) {
        let mut r = rng(seed);
        let len = r.gen_range(0..=7);
        let w = random_word(&mut r, Alphabet::B, len);
        prop_assert!(word_length(&w.eval(), Alphabet::B, len as u32).is_some());
    }

    #[test]
    fn closing_element_inverts_f(seed: u64) {
        let mut r = rng(seed);
        let g = random_f(&mut r, 10);
        prop_assert_eq!(closing_element(&g), g.invert());
    }

    #[test]
    fn text_formats_roundtrip(seed: u64) {
        let mut r = rng(seed);
        let g = random_element(&mut r);
        prop_assert_eq!(parse_element(&serialize_element(&g)).unwrap(), (g.clone(), true));
        prop_assert_eq!(parse_inline(&serialize_inline(&g)).unwrap(), g);
        let len = r.gen_range(0..=12);
        let w = random_word(&mut r, Alphabet::C, len);
        let back = parse_word(&w.to_string(), Some(Alphabet::C)).unwrap();
        prop_assert_eq!(back.letters(), w.letters());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn witness_invariants(seed: u64) {
        let mut r = rng(seed);
        let len = r.gen_range(2..=6);
        let g = random_word(&mut r, Alphabet::A, len).eval();
        prop_assume!(g.num_leaves() >= 4);
        let cert = witness(&g, &scaled(), Alphabet::A, &WitnessOptions::default()).unwrap();
        prop_assert_eq!(g.multiply(&cert.word().eval()), cert.target.clone());
        let report = verify(&cert, VerifyMode::Lemmas, 8);
        prop_assert!(report.passed(), "{}", report);
        prop_assert_eq!(parse_certificate(&serialize_certificate(&cert)).unwrap(), cert);
    }
}

#[test]
fn power_bound_counterexample() {
    // x0^-2 has four leaves and ℓ0 = 3, but x0^-2 · x0^2 is the identity
    let g = x0_power(-2);
    assert_eq!(g.num_leaves(), 4);
    assert_eq!(g.edge_depths().0, 3);
    assert!((g.multiply(&x0_power(2)).num_leaves() as i64) < 4 + 2 - 2 * (3 - 1));
}

#[test]
fn ball_distances_change_by_at_most_one_per_step() {
    let ball = BallIndex::enumerate(Alphabet::B, 4, DEFAULT_NODE_CAP).unwrap();
    for (g, d) in ball.iter() {
        for s in Alphabet::B.steps() {
            if let Some(e) = ball.distance(&g.multiply(s.element())) {
                assert!(d.abs_diff(e) <= 1);
            }
        }
    }
    let again = BallIndex::enumerate(Alphabet::B, 4, DEFAULT_NODE_CAP).unwrap();
    assert!(ball.iter().zip(again.iter()).all(|(x, y)| x == y));
}
