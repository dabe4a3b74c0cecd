//! Tree-pair diagrams and their reduced forms.
//!
//! A diagram is kept as its list of branch pairs `u -> v`: `u` runs over the
//! leaves of the domain tree, `v` over the leaves of the range tree, and the
//! leaf permutation is implicit in which `v` each `u` is paired with. As a
//! map of infinite binary words, `u·s ↦ v·s`.
//!
//! Products compose left to right: `a.multiply(&b)` first applies `a`, then `b`.

use std::collections::HashSet;

use crate::tree::{self, BinaryTree, TreeError};
use crate::word::BinaryWord;

pub type BranchPair = (BinaryWord, BinaryWord);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagramError {
    #[error("domain tree: {0}")]
    Domain(TreeError),
    #[error("range tree: {0}")]
    Range(TreeError),
    #[error("leaf map is not a bijection: {0} appears twice")]
    NotABijection(BinaryWord),
    #[error("element has a nontrivial leaf permutation; only elements of F have interval copies")]
    NotInF,
}

/// Which of the three Thompson groups an element lies in (smallest first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    F,
    TOnly,
    VOnly,
}

/// A possibly unreduced tree-pair diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDiagram {
    // sorted by domain branch
    pairs: Vec<BranchPair>,
}

impl TreeDiagram {
    /// Validates both trees and the bijection.
    pub fn new(mut pairs: Vec<BranchPair>) -> Result<Self, DiagramError> {
        pairs.sort();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(DiagramError::NotABijection(w[0].0.clone()));
            }
        }
        let domain: Vec<BinaryWord> = pairs.iter().map(|p| p.0.clone()).collect();
        tree::check_complete_prefix_code(&domain).map_err(DiagramError::Domain)?;
        let mut range: Vec<BinaryWord> = pairs.iter().map(|p| p.1.clone()).collect();
        range.sort();
        for w in range.windows(2) {
            if w[0] == w[1] {
                return Err(DiagramError::NotABijection(w[0].clone()));
            }
        }
        tree::check_complete_prefix_code(&range).map_err(DiagramError::Range)?;
        Ok(Self { pairs })
    }

    /// Builds `(domain, σ, range)` where leaf `i` of `domain` goes to leaf
    /// `perm[i]` of `range` (leaves counted left to right).
    pub fn from_trees(domain: &BinaryTree, range: &BinaryTree, perm: &[usize]) -> Result<Self, DiagramError> {
        let n = domain.num_leaves();
        if range.num_leaves() != n || perm.len() != n {
            return Err(DiagramError::NotABijection(BinaryWord::empty()));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(DiagramError::NotABijection(range.branches()[p.min(n - 1)].clone()));
            }
            seen[p] = true;
        }
        let pairs = domain
            .branches()
            .iter()
            .zip(perm)
            .map(|(u, &p)| (u.clone(), range.branches()[p].clone()))
            .collect();
        Ok(Self { pairs })
    }

    pub(crate) fn from_sorted_unchecked(pairs: Vec<BranchPair>) -> Self {
        Self { pairs }
    }

    pub fn pairs(&self) -> &[BranchPair] {
        &self.pairs
    }

    pub fn num_leaves(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_reduced(&self) -> bool {
        self.dipoles().is_empty()
    }

    /// Indices `i` such that pairs `i, i+1` form a dipole `u0→v0, u1→v1`.
    pub fn dipoles(&self) -> Vec<usize> {
        dipole_positions(&self.pairs)
    }

    /// Removes the dipole starting at pair index `i`.
    pub fn remove_dipole(&mut self, i: usize) {
        assert!(is_dipole(&self.pairs[i], &self.pairs[i + 1]), "no dipole at {i}");
        let (mut u, mut v) = self.pairs.remove(i + 1);
        u.pop();
        v.pop();
        self.pairs[i] = (u, v);
    }

    /// Inserts a dipole at the leaf pair with index `i`: `u→v` becomes
    /// `u0→v0, u1→v1`.
    pub fn insert_dipole(&mut self, i: usize) {
        let (u, v) = self.pairs[i].clone();
        self.pairs[i] = (u.child(0), v.child(0));
        self.pairs.insert(i + 1, (u.child(1), v.child(1)));
    }

    /// Reduces, choosing which dipole to remove next with `pick(count)`.
    /// Any choice sequence ends at the same element.
    pub fn reduce_with(mut self, mut pick: impl FnMut(usize) -> usize) -> Element {
        loop {
            let ds = self.dipoles();
            if ds.is_empty() {
                return Element { pairs: self.pairs };
            }
            let i = ds[pick(ds.len()) % ds.len()];
            self.remove_dipole(i);
        }
    }

    pub fn reduce(self) -> Element {
        Element { pairs: reduce_sorted(self.pairs) }
    }
}

fn is_dipole(a: &BranchPair, b: &BranchPair) -> bool {
    let (u0, v0) = a;
    let (u1, v1) = b;
    u0.len() == u1.len()
        && v0.len() == v1.len()
        && u0.last_bit() == Some(0)
        && u1.last_bit() == Some(1)
        && v0.last_bit() == Some(0)
        && v1.last_bit() == Some(1)
        && u0.common_prefix_len(u1) + 1 == u0.len()
        && v0.common_prefix_len(v1) + 1 == v0.len()
}

fn dipole_positions(pairs: &[BranchPair]) -> Vec<usize> {
    (0..pairs.len().saturating_sub(1))
        .filter(|&i| is_dipole(&pairs[i], &pairs[i + 1]))
        .collect()
}

/// Removes all dipoles from a domain-sorted pair list, scanning right to left.
/// Sibling leaves are adjacent in domain order, so a stack suffices.
pub(crate) fn reduce_sorted(pairs: Vec<BranchPair>) -> Vec<BranchPair> {
    let mut stack: Vec<BranchPair> = Vec::with_capacity(pairs.len());
    for p in pairs.into_iter().rev() {
        stack.push(p);
        while stack.len() >= 2 {
            let n = stack.len();
            if !is_dipole(&stack[n - 1], &stack[n - 2]) {
                break;
            }
            stack.pop();
            let (u, v) = stack.last_mut().unwrap();
            u.pop();
            v.pop();
        }
    }
    stack.reverse();
    stack
}

/// A group element: the unique reduced tree-pair diagram. Equality and
/// hashing are those of the sorted branch-pair list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    pairs: Vec<BranchPair>,
}

impl Element {
    pub fn identity() -> Self {
        Self { pairs: vec![(BinaryWord::empty(), BinaryWord::empty())] }
    }

    /// Validates and reduces. Returns the element together with whether the
    /// input was already reduced.
    pub fn from_pairs(pairs: Vec<BranchPair>) -> Result<(Self, bool), DiagramError> {
        let d = TreeDiagram::new(pairs)?;
        let was_reduced = d.is_reduced();
        Ok((d.reduce(), was_reduced))
    }

    /// `pairs` must be a valid diagram sorted by domain branch; it is reduced here.
    pub(crate) fn from_sorted_pairs(pairs: Vec<BranchPair>) -> Self {
        Self { pairs: reduce_sorted(pairs) }
    }

    /// `pairs` must be sorted, valid and reduced.
    pub(crate) fn from_reduced_unchecked(pairs: Vec<BranchPair>) -> Self {
        debug_assert!(dipole_positions(&pairs).is_empty());
        Self { pairs }
    }

    pub fn pairs(&self) -> &[BranchPair] {
        &self.pairs
    }

    pub fn diagram(&self) -> TreeDiagram {
        TreeDiagram::from_sorted_unchecked(self.pairs.clone())
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.len() == 1
    }

    /// N(g): leaves in either tree of the reduced diagram.
    pub fn num_leaves(&self) -> usize {
        self.pairs.len()
    }

    pub fn domain_tree(&self) -> BinaryTree {
        BinaryTree::from_sorted_unchecked(self.pairs.iter().map(|p| p.0.clone()).collect())
    }

    pub fn range_tree(&self) -> BinaryTree {
        let mut r: Vec<BinaryWord> = self.pairs.iter().map(|p| p.1.clone()).collect();
        r.sort();
        BinaryTree::from_sorted_unchecked(r)
    }

    /// Does some branch of the range tree equal `w`?
    pub fn range_has_branch(&self, w: &BinaryWord) -> bool {
        self.pairs.iter().any(|p| &p.1 == w)
    }

    /// Is `w` a strict prefix of some range branch?
    pub fn range_strictly_extends(&self, w: &BinaryWord) -> bool {
        self.pairs.iter().any(|p| p.1.len() > w.len() && w.is_prefix_of(&p.1))
    }

    /// `perm[i]`: position in the range tree of the image of domain leaf `i`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.pairs.len()).collect();
        order.sort_by(|&i, &j| self.pairs[i].1.cmp(&self.pairs[j].1));
        let mut perm = vec![0; order.len()];
        for (rank, &i) in order.iter().enumerate() {
            perm[i] = rank;
        }
        perm
    }

    pub fn invert(&self) -> Element {
        let mut pairs: Vec<BranchPair> = self.pairs.iter().map(|(u, v)| (v.clone(), u.clone())).collect();
        pairs.sort_unstable();
        Element { pairs }
    }

    /// The product `self · other`: apply `self`, then `other`.
    ///
    /// Lifts both diagrams to the least common refinement of `self`'s range
    /// tree and `other`'s domain tree by a single merge over the two sorted
    /// branch lists, then reduces.
    pub fn multiply(&self, other: &Element) -> Element {
        let mut left: Vec<(&BinaryWord, &BinaryWord)> = self.pairs.iter().map(|(u, v)| (v, u)).collect();
        left.sort_unstable_by(|a, b| a.0.cmp(b.0));
        let right = &other.pairs;
        let mut out: Vec<BranchPair> = Vec::with_capacity(left.len().max(right.len()) + 4);
        let (mut i, mut j) = (0, 0);
        while i < left.len() && j < right.len() {
            let (v, u) = left[i];
            let (p, q) = (&right[j].0, &right[j].1);
            if v.len() <= p.len() && v.is_prefix_of(p) {
                // v is refined by other's domain tree: p = v·s
                let s = p.suffix_from(v.len());
                out.push((u.concat(&s), q.clone()));
                j += 1;
                if j == right.len() || !v.is_prefix_of(&right[j].0) {
                    i += 1;
                }
            } else if p.is_prefix_of(v) {
                // v = p·s
                let s = v.suffix_from(p.len());
                out.push((u.clone(), q.concat(&s)));
                i += 1;
                if i == left.len() || !p.is_prefix_of(left[i].0) {
                    j += 1;
                }
            } else {
                unreachable!("range and domain trees must be complete prefix codes");
            }
        }
        debug_assert!(i == left.len() && j == right.len());
        out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Element::from_sorted_pairs(out)
    }

    pub fn pow(&self, k: i64) -> Element {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut acc = Element::identity();
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.multiply(&sq);
            }
        }
        acc
    }

    /// Image of the finite word `w`: if `w = u·s` with `u → v` a branch,
    /// returns `v·s`. `None` when `w` is a proper prefix of a domain branch.
    pub fn apply_prefix(&self, w: &BinaryWord) -> Option<BinaryWord> {
        // the last domain branch that sorts <= w is the only candidate prefix
        let idx = self.pairs.partition_point(|p| &p.0 <= w);
        if idx == 0 {
            return None;
        }
        let (u, v) = &self.pairs[idx - 1];
        u.is_prefix_of(w).then(|| v.concat(&w.suffix_from(u.len())))
    }

    /// (ℓ0, ℓ1): lengths of the leftmost and rightmost range branches.
    pub fn edge_depths(&self) -> (usize, usize) {
        let min = self.pairs.iter().map(|p| &p.1).min().unwrap();
        let max = self.pairs.iter().map(|p| &p.1).max().unwrap();
        (min.len(), max.len())
    }

    pub fn classify(&self) -> Class {
        let perm = self.permutation();
        let n = perm.len();
        if perm.iter().enumerate().all(|(i, &p)| p == i) {
            Class::F
        } else if perm.iter().enumerate().all(|(i, &p)| p == (perm[0] + i) % n) {
            Class::TOnly
        } else {
            Class::VOnly
        }
    }

    /// The copy `h_[u]` of an element of F, supported in the interval `[u]`.
    pub fn copy_into_interval(&self, u: &BinaryWord) -> Result<Element, DiagramError> {
        if self.classify() != Class::F {
            return Err(DiagramError::NotInF);
        }
        let mut pairs: Vec<BranchPair> = self.pairs.iter().map(|(v, w)| (u.concat(v), u.concat(w))).collect();
        for p in BinaryTree::minimal_containing(u).into_branches() {
            if &p != u {
                pairs.push((p.clone(), p));
            }
        }
        pairs.sort_unstable();
        Ok(Element::from_sorted_pairs(pairs))
    }

    /// Does the element restrict to the identity on the dyadic interval `[u]`?
    pub fn fixes_interval_pointwise(&self, u: &BinaryWord) -> bool {
        self.pairs.iter().filter(|(p, _)| p.comparable(u)).all(|(p, q)| p == q)
    }

    /// Is the support contained in `[u]`? Every branch outside `[u]` is fixed.
    pub fn supported_in(&self, u: &BinaryWord) -> bool {
        self.pairs.iter().filter(|(p, _)| !u.is_prefix_of(p)).all(|(p, q)| p == q)
    }

    /// Total number of symbols over all branches; a size measure for
    /// deciding whether an element is cheap to print.
    pub fn total_branch_length(&self) -> usize {
        self.pairs.iter().map(|(u, v)| u.len() + v.len()).sum()
    }

    /// Compact canonical byte encoding (preorder caret bits of both trees
    /// plus the permutation), used as the hash key of Cayley-ball indices.
    pub fn to_key(&self) -> ElementKey {
        let n = self.pairs.len();
        let domain: Vec<BinaryWord> = self.pairs.iter().map(|p| p.0.clone()).collect();
        let range = self.range_tree();
        let perm = self.permutation();
        let identity_perm = perm.iter().enumerate().all(|(i, &p)| i == p);
        let mut bytes = Vec::with_capacity(8 + n / 2);
        write_varint(&mut bytes, (n as u64) << 1 | u64::from(!identity_perm));
        let mut bits = tree::preorder_of_sorted(&domain);
        bits.extend(range.preorder());
        for chunk in bits.chunks(8) {
            let mut b = 0u8;
            for (k, &bit) in chunk.iter().enumerate() {
                b |= u8::from(bit) << k;
            }
            bytes.push(b);
        }
        if !identity_perm {
            for p in perm {
                write_varint(&mut bytes, p as u64);
            }
        }
        ElementKey(bytes.into_boxed_slice())
    }

    pub fn from_key(key: &ElementKey) -> Option<Element> {
        let bytes = &key.0;
        let mut pos = 0;
        let head = read_varint(bytes, &mut pos)?;
        let n = (head >> 1) as usize;
        let has_perm = head & 1 == 1;
        if n == 0 || n > bytes.len() * 8 {
            return None;
        }
        let nbits = 2 * (2 * n - 1);
        let nbytes = nbits.div_ceil(8);
        let raw = bytes.get(pos..pos + nbytes)?;
        pos += nbytes;
        let bits: Vec<bool> = (0..nbits).map(|k| raw[k / 8] >> (k % 8) & 1 == 1).collect();
        let domain = tree::branches_from_preorder(&bits[..2 * n - 1])?;
        let range = tree::branches_from_preorder(&bits[2 * n - 1..])?;
        let perm: Vec<usize> = if has_perm {
            (0..n).map(|_| read_varint(bytes, &mut pos).map(|p| p as usize)).collect::<Option<_>>()?
        } else {
            (0..n).collect()
        };
        let pairs = domain.into_iter().zip(perm).map(|(u, p)| Some((u, range.get(p)?.clone()))).collect::<Option<Vec<_>>>()?;
        Some(Element { pairs })
    }
}

/// Output of [`Element::to_key`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementKey(Box<[u8]>);

impl ElementKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// N of the encoded element, read from the header.
    pub fn num_leaves(&self) -> usize {
        let mut pos = 0;
        read_varint(&self.0, &mut pos).map_or(0, |h| (h >> 1) as usize)
    }
}

fn write_varint(out: &mut Vec<u8>, mut x: u64) {
    while x >= 0x80 {
        out.push((x as u8) | 0x80);
        x >>= 7;
    }
    out.push(x as u8);
}

fn read_varint(bytes: &[u8], pos: &mut usize) -> Option<u64> {
    let mut x = 0u64;
    let mut shift = 0;
    loop {
        let b = *bytes.get(*pos)?;
        *pos += 1;
        x |= u64::from(b & 0x7f) << shift;
        if b & 0x80 == 0 {
            return Some(x);
        }
        shift += 7;
        if shift > 63 {
            return None;
        }
    }
}

/// Every symbol sequence of length `n`, in lexicographic order.
pub fn all_words(n: usize) -> Vec<BinaryWord> {
    (0..1u64 << n)
        .map(|k| BinaryWord::from_bits((0..n).rev().map(|i| (k >> i & 1) as u8)))
        .collect()
}

/// Branch pairs as a set, for order-insensitive comparisons in tests.
pub fn pair_set(e: &Element) -> HashSet<BranchPair> {
    e.pairs.iter().cloned().collect()
}
