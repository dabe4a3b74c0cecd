//! Finite full binary trees, identified with their sets of branches.

use crate::word::BinaryWord;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("a tree needs at least one branch")]
    Empty,
    #[error("branch {0} is a prefix of branch {1}")]
    PrefixViolation(BinaryWord, BinaryWord),
    #[error("branches do not cover every infinite binary word")]
    IncompleteCode,
}

/// A finite rooted full binary tree, stored as its branches in
/// left-to-right order. The branch set is always a complete prefix code.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryTree {
    branches: Vec<BinaryWord>,
}

impl BinaryTree {
    /// The one-leaf tree.
    pub fn trivial() -> Self {
        Self { branches: vec![BinaryWord::empty()] }
    }

    /// Validates `branches` as a complete prefix code.
    pub fn new(mut branches: Vec<BinaryWord>) -> Result<Self, TreeError> {
        branches.sort();
        check_complete_prefix_code(&branches)?;
        Ok(Self { branches })
    }

    pub(crate) fn from_sorted_unchecked(branches: Vec<BinaryWord>) -> Self {
        Self { branches }
    }

    pub fn branches(&self) -> &[BinaryWord] {
        &self.branches
    }

    pub fn num_leaves(&self) -> usize {
        self.branches.len()
    }

    pub fn into_branches(self) -> Vec<BinaryWord> {
        self.branches
    }

    /// Length of the leftmost branch.
    pub fn left_depth(&self) -> usize {
        self.branches[0].len()
    }

    /// Length of the rightmost branch.
    pub fn right_depth(&self) -> usize {
        self.branches[self.branches.len() - 1].len()
    }

    /// The smallest tree having `u` as a branch: `u` together with the
    /// siblings of every node on the path to `u`.
    pub fn minimal_containing(u: &BinaryWord) -> Self {
        let mut branches = Vec::with_capacity(u.len() + 1);
        let mut path = BinaryWord::empty();
        for b in u.bits() {
            branches.push(path.child(1 - b));
            path.push(b);
        }
        branches.push(path);
        branches.sort();
        Self { branches }
    }

    /// Preorder caret encoding: `true` for an internal node, `false` for a
    /// leaf. Has length `2n - 1` for an `n`-leaf tree.
    pub fn preorder(&self) -> Vec<bool> {
        preorder_of_sorted(&self.branches)
    }
}

/// `branches` must be sorted. Checks prefix-freeness, then collapses sibling
/// pairs with a stack; the code is complete iff everything collapses to the root.
pub(crate) fn check_complete_prefix_code(branches: &[BinaryWord]) -> Result<(), TreeError> {
    if branches.is_empty() {
        return Err(TreeError::Empty);
    }
    for pair in branches.windows(2) {
        // If u prefixes some later word, it prefixes its immediate successor.
        if pair[0].is_prefix_of(&pair[1]) {
            return Err(TreeError::PrefixViolation(pair[0].clone(), pair[1].clone()));
        }
    }
    let mut stack: Vec<BinaryWord> = Vec::with_capacity(64);
    for w in branches {
        stack.push(w.clone());
        while stack.len() >= 2 {
            let n = stack.len();
            let (a, b) = (&stack[n - 2], &stack[n - 1]);
            if a.len() == b.len()
                && a.last_bit() == Some(0)
                && b.last_bit() == Some(1)
                && a.common_prefix_len(b) + 1 == a.len()
            {
                let mut parent = stack.pop().unwrap();
                parent.pop();
                stack.pop();
                stack.push(parent);
            } else {
                break;
            }
        }
    }
    if stack.len() == 1 && stack[0].is_empty() {
        Ok(())
    } else {
        Err(TreeError::IncompleteCode)
    }
}

pub(crate) fn preorder_of_sorted(branches: &[BinaryWord]) -> Vec<bool> {
    let mut out = Vec::with_capacity(2 * branches.len());
    let mut prev: Option<&BinaryWord> = None;
    for w in branches {
        // w = lcp · 1 · 0^k relative to the previous leaf, or 0^k for the first.
        let k = match prev {
            None => w.len(),
            Some(p) => w.len() - p.common_prefix_len(w) - 1,
        };
        out.extend(std::iter::repeat_n(true, k));
        out.push(false);
        prev = Some(w);
    }
    out
}

/// Inverse of [`preorder_of_sorted`]. Returns `None` on a malformed encoding.
pub(crate) fn branches_from_preorder(bits: &[bool]) -> Option<Vec<BinaryWord>> {
    let mut out = Vec::new();
    let mut path = BinaryWord::empty();
    let mut pos = 0;
    loop {
        let internal = *bits.get(pos)?;
        pos += 1;
        if internal {
            path.push(0);
            continue;
        }
        out.push(path.clone());
        // climb while we are a right child
        loop {
            match path.pop() {
                None => {
                    return (pos == bits.len()).then_some(out);
                }
                Some(1) => continue,
                Some(_) => {
                    path.push(1);
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::bw;

    fn words(ws: &[&str]) -> Vec<BinaryWord> {
        ws.iter().map(|s| bw(s)).collect()
    }

    #[test]
    fn trivial_tree() {
        let t = BinaryTree::new(words(&["-"])).unwrap();
        assert_eq!(t.num_leaves(), 1);
        assert_eq!(t, BinaryTree::trivial());
    }

    #[test]
    fn three_leaf_tree() {
        let t = BinaryTree::new(words(&["1", "01", "00"])).unwrap();
        assert_eq!(t.num_leaves(), 3);
        assert_eq!(t.branches(), &words(&["00", "01", "1"])[..]);
    }

    #[test]
    fn prefix_violation() {
        assert_eq!(
            BinaryTree::new(words(&["0", "01", "1"])),
            Err(TreeError::PrefixViolation(bw("0"), bw("01")))
        );
    }

    #[test]
    fn incomplete_code() {
        assert_eq!(BinaryTree::new(words(&["00", "1"])), Err(TreeError::IncompleteCode));
        assert_eq!(BinaryTree::new(words(&["0"])), Err(TreeError::IncompleteCode));
        assert_eq!(BinaryTree::new(vec![]), Err(TreeError::Empty));
    }

    #[test]
    fn minimal_tree_around_branch() {
        let t = BinaryTree::minimal_containing(&bw("101"));
        assert_eq!(t.branches(), &words(&["0", "100", "101", "11"])[..]);
        assert_eq!(BinaryTree::minimal_containing(&bw("-")), BinaryTree::trivial());
    }

    #[test]
    fn preorder_roundtrip() {
        for ws in [vec!["-"], vec!["0", "1"], vec!["00", "01", "1"], vec!["0", "100", "101", "11"]] {
            let t = BinaryTree::new(words(&ws)).unwrap();
            let bits = t.preorder();
            assert_eq!(bits.len(), 2 * t.num_leaves() - 1);
            assert_eq!(branches_from_preorder(&bits).unwrap(), t.branches());
        }
        assert!(branches_from_preorder(&[true, false]).is_none());
        assert!(branches_from_preorder(&[false, false]).is_none());
    }
}
