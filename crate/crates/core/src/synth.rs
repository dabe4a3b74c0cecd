//! Words for elements: geodesics inside a search radius, and a constructive
//! fallback beyond it.
//!
//! The fallback writes an element of F as `P(T+) · P(T-)⁻¹`, where `P(T)` is
//! the positive element carrying `T` to the right vine, read off as a product
//! of `x_k` by greedy rotations along the right spine. Elements of T and V
//! are first sorted into F by rotations (conjugates of `c1`) and front block
//! swaps (conjugates of `pi0`) acting on the leaves of their range tree.

use crate::element::{Class, Element};
use crate::generators::{x_n_word, Alphabet, Generator, GroupWord};
use crate::oracle;
use crate::word::BinaryWord;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthesisError {
    #[error("element of class {class:?} is not generated by alphabet {alphabet}")]
    NotInGroup { class: Class, alphabet: Alphabet },
    #[error("synthesized word does not evaluate to the element")]
    Failure,
}

/// How a synthesized word was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SynthesisRoute {
    /// Shortest word, found by search.
    Geodesic,
    /// Constructive normal-form word; not necessarily shortest.
    Fallback,
    /// Undoing a known path back to a geodesic; not necessarily shortest.
    Retrace,
}

impl SynthesisRoute {
    pub fn name(self) -> &'static str {
        match self {
            SynthesisRoute::Geodesic => "geodesic",
            SynthesisRoute::Fallback => "fallback",
            SynthesisRoute::Retrace => "retrace",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [SynthesisRoute::Geodesic, SynthesisRoute::Fallback, SynthesisRoute::Retrace]
            .into_iter()
            .find(|r| r.name() == s)
    }

    pub fn is_minimal(self) -> bool {
        self == SynthesisRoute::Geodesic
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synthesized {
    pub word: GroupWord,
    pub route: SynthesisRoute,
}

/// A word over `alphabet` evaluating to `a`: a geodesic when `|a| ≤ bfs_cap`,
/// otherwise the constructive fallback.
pub fn synthesize_word(a: &Element, alphabet: Alphabet, bfs_cap: u32) -> Result<Synthesized, SynthesisError> {
    let class = a.classify();
    if !alphabet.generates(class) {
        return Err(SynthesisError::NotInGroup { class, alphabet });
    }
    if let Some(word) = oracle::geodesic(a, alphabet, bfs_cap) {
        return Ok(Synthesized { word, route: SynthesisRoute::Geodesic });
    }
    let word = fallback_word(a, alphabet)?;
    Ok(Synthesized { word, route: SynthesisRoute::Fallback })
}

/// The constructive word for `a`, checked by evaluation.
pub fn fallback_word(a: &Element, alphabet: Alphabet) -> Result<GroupWord, SynthesisError> {
    let class = a.classify();
    if !alphabet.generates(class) {
        return Err(SynthesisError::NotInGroup { class, alphabet });
    }
    let domain: Vec<BinaryWord> = a.pairs().iter().map(|p| p.0.clone()).collect();
    let range = a.range_tree().into_branches();
    let word = if class == Class::F {
        positive_word(&domain, alphabet).concat(&positive_word(&range, alphabet).inverse())
    } else {
        // g·E = (T+, id, T-) for the sorting product E, so g = (T+, T-)·E⁻¹.
        let sorter = sorting_word(a, &range, alphabet);
        positive_word(&domain, alphabet)
            .concat(&positive_word(&range, alphabet).inverse())
            .concat(&sorter.inverse())
    };
    if word.eval() != *a {
        return Err(SynthesisError::Failure);
    }
    Ok(word)
}

const LEAF: u32 = u32::MAX;

/// Full binary tree in an arena; `kids[v] == [LEAF, LEAF]` marks a leaf.
struct Arena {
    kids: Vec<[u32; 2]>,
}

impl Arena {
    fn from_branches(branches: &[BinaryWord]) -> Self {
        let bits = crate::tree::preorder_of_sorted(branches);
        let mut kids = Vec::with_capacity(bits.len());
        // stack of (node, next child slot to fill)
        let mut stack: Vec<(u32, usize)> = Vec::new();
        for internal in bits {
            let id = kids.len() as u32;
            kids.push([LEAF, LEAF]);
            if let Some(&mut (parent, ref mut slot)) = stack.last_mut() {
                kids[parent as usize][*slot] = id;
                *slot += 1;
            }
            if internal {
                stack.push((id, 0));
            }
            while let Some(&(_, 2)) = stack.last() {
                stack.pop();
            }
        }
        Self { kids }
    }

    fn is_leaf(&self, v: u32) -> bool {
        self.kids[v as usize][0] == LEAF
    }
}

/// Indices `k_1 ≤ k_2 ≤ …` with `(T, right vine) = x_{k_1} x_{k_2} …`.
pub fn positive_indices(branches: &[BinaryWord]) -> Vec<usize> {
    let mut arena = Arena::from_branches(branches);
    let mut out = Vec::new();
    let (mut v, mut k) = (0u32, 0usize);
    while !arena.is_leaf(v) {
        let [l, r] = arena.kids[v as usize];
        if arena.is_leaf(l) {
            v = r;
            k += 1;
        } else {
            // ((A, B), C) -> (A, (B, C)), reusing the node of (A, B)
            let [a, b] = arena.kids[l as usize];
            arena.kids[l as usize] = [b, r];
            arena.kids[v as usize] = [a, l];
            out.push(k);
        }
    }
    out
}

/// Word for the positive element carrying the tree with `branches` onto the
/// right vine with the same number of leaves.
pub fn positive_word(branches: &[BinaryWord], alphabet: Alphabet) -> GroupWord {
    let mut w = GroupWord::empty(alphabet);
    for k in positive_indices(branches) {
        for &l in x_n_word(k, alphabet).letters() {
            w.push(l).expect("x0 and x1 lie in every alphabet");
        }
    }
    w
}

/// Branches of the right vine with `m ≥ 1` leaves: `0, 10, …, 1^{m-1}`.
fn right_vine(m: usize) -> Vec<BinaryWord> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m - 1 {
        let mut w = BinaryWord::repeat(1, i);
        w.push(0);
        out.push(w);
    }
    out.push(BinaryWord::repeat(1, m - 1));
    out
}

/// The tree with subtrees `left` at 0 and `right` at 1.
fn join(left: &[BinaryWord], right: &[BinaryWord]) -> Vec<BinaryWord> {
    let (zero, one) = (BinaryWord::repeat(0, 1), BinaryWord::repeat(1, 1));
    left.iter().map(|w| zero.concat(w)).chain(right.iter().map(|w| one.concat(w))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    /// Range rank r goes to (r - k) mod n.
    Rotate(usize),
    /// The first `x` ranks trade places with the next `y`.
    Swap(usize, usize),
}

fn apply_op(seq: &[usize], op: Op) -> Vec<usize> {
    let n = seq.len();
    let mut out = vec![0; n];
    for (r, &label) in seq.iter().enumerate() {
        let to = match op {
            Op::Rotate(k) => (r + n - k) % n,
            Op::Swap(x, y) if r < x => r + y,
            Op::Swap(x, y) if r < x + y => r - x,
            Op::Swap(..) => r,
        };
        out[to] = label;
    }
    out
}

/// Rotations and swaps that sort `seq` (labels by range rank) to the identity.
fn sorting_ops(mut seq: Vec<usize>) -> Vec<Op> {
    let n = seq.len();
    let mut ops = Vec::new();
    let push = |ops: &mut Vec<Op>, seq: &mut Vec<usize>, op: Op| {
        *seq = apply_op(seq, op);
        // merge consecutive rotations
        if let (Op::Rotate(k), Some(Op::Rotate(prev))) = (op, ops.last().copied()) {
            ops.pop();
            let total = (prev + k) % n;
            if total != 0 {
                ops.push(Op::Rotate(total));
            }
        } else {
            ops.push(op);
        }
    };
    let p = seq.iter().position(|&l| l == 0).unwrap();
    if p > 0 {
        push(&mut ops, &mut seq, Op::Rotate(p));
    }
    let mut k = 0;
    loop {
        while k < n && seq[k] == k {
            k += 1;
        }
        if k == n {
            return ops;
        }
        let p = seq.iter().position(|&l| l == k).unwrap();
        push(&mut ops, &mut seq, Op::Rotate(k));
        push(&mut ops, &mut seq, Op::Swap(p - k, 1));
        push(&mut ops, &mut seq, Op::Rotate(n - k));
    }
}

/// A word for `E = (T-, π, T-)` with `g·E` in F.
fn sorting_word(g: &Element, range: &[BinaryWord], alphabet: Alphabet) -> GroupWord {
    let n = range.len();
    let perm = g.permutation();
    let mut seq = vec![0; n];
    for (i, &r) in perm.iter().enumerate() {
        seq[r] = i;
    }
    let base = positive_word(range, alphabet);
    let mut w = GroupWord::empty(alphabet);
    for op in sorting_ops(seq) {
        let (from, gen, to) = match op {
            Op::Rotate(k) => (join(&right_vine(k), &right_vine(n - k)), Generator::C1, join(&right_vine(n - k), &right_vine(k))),
            Op::Swap(x, y) => {
                let z = right_vine(n - x - y);
                (join(&join(&right_vine(x), &right_vine(y)), &z), Generator::Pi0, join(&join(&right_vine(y), &right_vine(x)), &z))
            }
        };
        let mut from = from;
        from.sort();
        let mut to = to;
        to.sort();
        let mut piece = base.concat(&positive_word(&from, alphabet).inverse());
        piece.push_power(gen, 1).expect("class checked against alphabet");
        let piece = piece.concat(&positive_word(&to, alphabet)).concat(&base.inverse());
        w = w.concat(&piece);
    }
    w
}
