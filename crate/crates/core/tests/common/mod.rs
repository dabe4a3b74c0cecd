//! Random diagrams, elements and words shared by the integration tests.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thompson_core::{Alphabet, BinaryWord, Element, GroupWord, TreeDiagram};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A tree grown by splitting uniformly chosen leaves.
pub fn random_tree(rng: &mut ChaCha8Rng, leaves: usize) -> Vec<BinaryWord> {
    let mut branches = vec![BinaryWord::empty()];
    while branches.len() < leaves {
        let i = rng.gen_range(0..branches.len());
        let w = branches.swap_remove(i);
        branches.push(w.child(0));
        branches.push(w.child(1));
    }
    branches.sort();
    branches
}

pub fn random_diagram(rng: &mut ChaCha8Rng, leaves: usize, order_preserving: bool) -> TreeDiagram {
    let domain = random_tree(rng, leaves);
    let mut range = random_tree(rng, leaves);
    if !order_preserving {
        range.shuffle(rng);
    }
    TreeDiagram::new(domain.into_iter().zip(range).collect()).expect("two prefix codes of equal size")
}

pub fn random_word(rng: &mut ChaCha8Rng, alphabet: Alphabet, len: usize) -> GroupWord {
    let steps = alphabet.steps();
    GroupWord::from_steps(alphabet, (0..len).map(|_| steps[rng.gen_range(0..steps.len())])).unwrap()
}

/// Reduced V diagrams, F diagrams and evaluated words over C, in equal
/// proportion.
pub fn random_element(rng: &mut ChaCha8Rng) -> Element {
    match rng.gen_range(0..3) {
        0 => {
            let n = rng.gen_range(1..=12);
            random_diagram(rng, n, false).reduce()
        }
        1 => {
            let n = rng.gen_range(1..=12);
            random_diagram(rng, n, true).reduce()
        }
        _ => {
            let len = rng.gen_range(0..=16);
            random_word(rng, Alphabet::C, len).eval()
        }
    }
}

pub fn random_f(rng: &mut ChaCha8Rng, max_leaves: usize) -> Element {
    let n = rng.gen_range(1..=max_leaves);
    random_diagram(rng, n, true).reduce()
}
