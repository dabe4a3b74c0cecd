//! A mutable tree-pair diagram for walking long words letter by letter.
//!
//! Both trees live in one node arena; each leaf points at its partner leaf
//! in the other tree. Right multiplication by a generator only touches the
//! top few levels of the range tree: the range tree is refined until it
//! contains the generator's domain tree (splitting partner domain leaves in
//! step), the hanging subtrees are re-attached along the generator's range
//! tree, and dipoles are cancelled upwards from the rebuilt nodes. Every
//! step is O(1) amortised, and the leaf count is tracked exactly.

use crate::element::Element;
use crate::generators::{GroupWord, Step};
use crate::word::BinaryWord;

const NIL: u32 = u32::MAX;
const FREED: u32 = u32::MAX - 1;

#[derive(Debug, Clone, Copy)]
struct Node {
    parent: u32,
    kids: [u32; 2],
    // partner leaf in the other tree; NIL for internal nodes
    partner: u32,
}

impl Node {
    fn leaf(parent: u32) -> Self {
        Self { parent, kids: [NIL, NIL], partner: NIL }
    }
}

/// Shape of a generator's reduced diagram as short bit strings.
#[derive(Debug, Clone)]
struct Shape {
    // domain branches in order, with the range branch each maps to
    pairs: Vec<(Vec<u8>, Vec<u8>)>,
    // proper prefixes of the range branches, shortest first, root excluded
    range_internal: Vec<Vec<u8>>,
}

impl Shape {
    fn of(step: Step) -> Self {
        let bits = |w: &BinaryWord| w.bits().collect::<Vec<u8>>();
        let pairs: Vec<(Vec<u8>, Vec<u8>)> = step.element().pairs().iter().map(|(u, v)| (bits(u), bits(v))).collect();
        let mut range_internal: Vec<Vec<u8>> = Vec::new();
        for (_, v) in &pairs {
            for k in 1..v.len() {
                if !range_internal.iter().any(|p| p[..] == v[..k]) {
                    range_internal.push(v[..k].to_vec());
                }
            }
        }
        range_internal.sort_by_key(|p| p.len());
        Self { pairs, range_internal }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AuditError {
    #[error("leaf count {counted} differs from tracked count {tracked}")]
    LeafCount { counted: usize, tracked: usize },
    #[error("broken parent or partner link at node {0}")]
    Link(u32),
    #[error("uncancelled dipole at range node {0}")]
    Dipole(u32),
}

/// An element under construction by right multiplication.
#[derive(Debug, Clone)]
pub struct LiveDiagram {
    nodes: Vec<Node>,
    free: Vec<u32>,
    domain_root: u32,
    range_root: u32,
    leaves: usize,
    shapes: Vec<(Step, Shape)>,
    scratch: Vec<u32>,
    // range nodes rebuilt since the last local audit, when tracking
    touched: Vec<u32>,
    tracking: bool,
}

impl LiveDiagram {
    pub fn identity() -> Self {
        Self::from_element(&Element::identity())
    }

    pub fn from_element(g: &Element) -> Self {
        let mut live = Self {
            nodes: Vec::with_capacity(4 * g.num_leaves()),
            free: Vec::new(),
            domain_root: NIL,
            range_root: NIL,
            leaves: g.num_leaves(),
            shapes: Vec::new(),
            scratch: Vec::new(),
            touched: Vec::new(),
            tracking: false,
        };
        let domain: Vec<BinaryWord> = g.pairs().iter().map(|p| p.0.clone()).collect();
        let range = g.range_tree().into_branches();
        let (droot, dleaves) = live.build(&domain);
        let (rroot, rleaves) = live.build(&range);
        live.domain_root = droot;
        live.range_root = rroot;
        for (i, &r) in g.permutation().iter().enumerate() {
            let (d, r) = (dleaves[i], rleaves[r]);
            live.nodes[d as usize].partner = r;
            live.nodes[r as usize].partner = d;
        }
        live
    }

    /// Builds a tree from sorted branches; returns the root and the leaves
    /// in order.
    fn build(&mut self, branches: &[BinaryWord]) -> (u32, Vec<u32>) {
        let bits = crate::tree::preorder_of_sorted(branches);
        let mut leaves = Vec::with_capacity(branches.len());
        let mut stack: Vec<(u32, usize)> = Vec::new();
        let mut root = NIL;
        for internal in bits {
            let parent = stack.last().map_or(NIL, |&(p, _)| p);
            let id = self.alloc(Node::leaf(parent));
            if let Some((p, slot)) = stack.last_mut() {
                self.nodes[*p as usize].kids[*slot] = id;
                *slot += 1;
            } else {
                root = id;
            }
            if internal {
                stack.push((id, 0));
            } else {
                leaves.push(id);
            }
            while let Some(&(_, 2)) = stack.last() {
                stack.pop();
            }
        }
        (root, leaves)
    }

    fn alloc(&mut self, node: Node) -> u32 {
        if let Some(id) = self.free.pop() {
            self.nodes[id as usize] = node;
            id
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    fn release(&mut self, id: u32) {
        self.nodes[id as usize].parent = FREED;
        self.free.push(id);
    }

    fn is_leaf(&self, id: u32) -> bool {
        self.nodes[id as usize].kids[0] == NIL
    }

    /// N of the current element.
    pub fn num_leaves(&self) -> usize {
        self.leaves
    }

    /// Splits leaf `r` of the range tree and its partner in the domain tree.
    fn split(&mut self, r: u32) {
        let d = self.nodes[r as usize].partner;
        let r0 = self.alloc(Node::leaf(r));
        let r1 = self.alloc(Node::leaf(r));
        let d0 = self.alloc(Node::leaf(d));
        let d1 = self.alloc(Node::leaf(d));
        self.nodes[r0 as usize].partner = d0;
        self.nodes[d0 as usize].partner = r0;
        self.nodes[r1 as usize].partner = d1;
        self.nodes[d1 as usize].partner = r1;
        self.nodes[r as usize].kids = [r0, r1];
        self.nodes[r as usize].partner = NIL;
        self.nodes[d as usize].kids = [d0, d1];
        self.nodes[d as usize].partner = NIL;
        self.leaves += 1;
    }

    /// The range node at `path`, splitting leaves on the way.
    fn descend(&mut self, path: &[u8]) -> u32 {
        let mut v = self.range_root;
        for &b in path {
            if self.is_leaf(v) {
                self.split(v);
            }
            v = self.nodes[v as usize].kids[b as usize];
        }
        v
    }

    fn shape(&mut self, step: Step) -> usize {
        if let Some(i) = self.shapes.iter().position(|(s, _)| *s == step) {
            return i;
        }
        self.shapes.push((step, Shape::of(step)));
        self.shapes.len() - 1
    }

    /// Right multiplication by one generator step.
    pub fn push(&mut self, step: Step) {
        let si = self.shape(step);
        let shape = std::mem::replace(&mut self.shapes[si].1, Shape { pairs: Vec::new(), range_internal: Vec::new() });
        // subtrees hanging at the generator's domain leaves
        let mut hanging = std::mem::take(&mut self.scratch);
        hanging.clear();
        for (u, _) in &shape.pairs {
            let t = self.descend(u);
            hanging.push(t);
        }
        // recycle the internal nodes strictly below the root that held them
        let mut pool: Vec<u32> = Vec::with_capacity(4);
        for (u, _) in &shape.pairs {
            let mut v = self.range_root;
            for &b in &u[..u.len().saturating_sub(1)] {
                v = self.nodes[v as usize].kids[b as usize];
                if !pool.contains(&v) {
                    pool.push(v);
                }
            }
        }
        debug_assert_eq!(pool.len(), shape.range_internal.len());
        // rebuild: internal nodes of the generator's range tree
        let root = self.range_root;
        let mut placed: Vec<(&[u8], u32)> = Vec::with_capacity(8);
        placed.push((&[], root));
        for p in &shape.range_internal {
            let id = pool.pop().expect("generator trees have equal size");
            placed.push((p, id));
        }
        let lookup = |placed: &[(&[u8], u32)], p: &[u8]| placed.iter().find(|(q, _)| *q == p).map(|&(_, id)| id);
        for (i, (_, v)) in shape.pairs.iter().enumerate() {
            let t = hanging[i];
            let parent = lookup(&placed, &v[..v.len() - 1]).unwrap();
            self.nodes[t as usize].parent = parent;
            self.nodes[parent as usize].kids[v[v.len() - 1] as usize] = t;
        }
        for &(p, id) in &placed[1..] {
            let parent = lookup(&placed, &p[..p.len() - 1]).unwrap();
            self.nodes[id as usize].parent = parent;
            self.nodes[id as usize].partner = NIL;
            self.nodes[parent as usize].kids[p[p.len() - 1] as usize] = id;
        }
        // cancel dipoles, deepest rebuilt nodes first
        let mut work: Vec<u32> = placed.iter().map(|&(_, id)| id).collect();
        if self.tracking {
            self.touched.extend_from_slice(&work);
        }
        while let Some(r) = work.pop() {
            if let Some(up) = self.try_cancel(r) {
                work.push(up);
            }
        }
        self.scratch = hanging;
        self.shapes[si].1 = shape;
    }

    /// Cancels a dipole at range node `r` if there is one; returns the
    /// parent of `r` to re-examine.
    fn try_cancel(&mut self, r: u32) -> Option<u32> {
        let node = self.nodes[r as usize];
        if node.parent == FREED || node.kids[0] == NIL {
            return None;
        }
        let [a, b] = node.kids;
        if !self.is_leaf(a) || !self.is_leaf(b) {
            return None;
        }
        let (da, db) = (self.nodes[a as usize].partner, self.nodes[b as usize].partner);
        let p = self.nodes[da as usize].parent;
        if p == NIL || self.nodes[p as usize].kids != [da, db] {
            return None;
        }
        for id in [a, b, da, db] {
            self.release(id);
        }
        self.nodes[r as usize].kids = [NIL, NIL];
        self.nodes[r as usize].partner = p;
        self.nodes[p as usize].kids = [NIL, NIL];
        self.nodes[p as usize].partner = r;
        self.leaves -= 1;
        let up = self.nodes[r as usize].parent;
        (up != NIL).then_some(up)
    }

    /// Full traversal: parent and partner links, the leaf count, and the
    /// absence of dipoles.
    pub fn audit(&self) -> Result<(), AuditError> {
        let mut counted = [0usize; 2];
        for (t, root) in [self.domain_root, self.range_root].into_iter().enumerate() {
            if self.nodes[root as usize].parent != NIL {
                return Err(AuditError::Link(root));
            }
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                let node = self.nodes[v as usize];
                if node.kids[0] == NIL {
                    if node.kids[1] != NIL || node.partner == NIL {
                        return Err(AuditError::Link(v));
                    }
                    let q = self.nodes[node.partner as usize];
                    if q.partner != v || q.kids[0] != NIL {
                        return Err(AuditError::Link(v));
                    }
                    counted[t] += 1;
                    continue;
                }
                for k in node.kids {
                    if k == NIL || self.nodes[k as usize].parent != v {
                        return Err(AuditError::Link(v));
                    }
                    stack.push(k);
                }
                if t == 1 && self.is_dipole(v) {
                    return Err(AuditError::Dipole(v));
                }
            }
        }
        if counted[0] != self.leaves || counted[1] != self.leaves {
            return Err(AuditError::LeafCount { counted: counted[0].max(counted[1]), tracked: self.leaves });
        }
        Ok(())
    }

    /// Checks the links and dipole-freeness around every range node rebuilt
    /// since the previous call, in time proportional to the number of steps.
    pub fn audit_recent(&mut self) -> Result<(), AuditError> {
        let touched = std::mem::take(&mut self.touched);
        for &v in &touched {
            let node = self.nodes[v as usize];
            if node.parent == FREED {
                continue;
            }
            let up_ok = if node.parent == NIL { v == self.range_root } else { self.nodes[node.parent as usize].kids.contains(&v) };
            if !up_ok {
                return Err(AuditError::Link(v));
            }
            if node.kids[0] == NIL {
                self.check_leaf(v)?;
                continue;
            }
            for k in node.kids {
                if k == NIL || self.nodes[k as usize].parent != v {
                    return Err(AuditError::Link(v));
                }
                if self.is_leaf(k) {
                    self.check_leaf(k)?;
                }
            }
            if self.is_dipole(v) {
                return Err(AuditError::Dipole(v));
            }
        }
        self.touched = touched;
        self.touched.clear();
        Ok(())
    }

    fn check_leaf(&self, v: u32) -> Result<(), AuditError> {
        let node = self.nodes[v as usize];
        if node.kids[1] != NIL || node.partner == NIL {
            return Err(AuditError::Link(v));
        }
        let q = self.nodes[node.partner as usize];
        if q.partner != v || q.kids[0] != NIL || q.parent == FREED {
            return Err(AuditError::Link(v));
        }
        if q.parent != NIL && !self.nodes[q.parent as usize].kids.contains(&node.partner) {
            return Err(AuditError::Link(node.partner));
        }
        Ok(())
    }

    fn is_dipole(&self, v: u32) -> bool {
        let [a, b] = self.nodes[v as usize].kids;
        if a == NIL || !self.is_leaf(a) || !self.is_leaf(b) {
            return false;
        }
        let (da, db) = (self.nodes[a as usize].partner, self.nodes[b as usize].partner);
        let p = self.nodes[da as usize].parent;
        p != NIL && self.nodes[p as usize].kids == [da, db]
    }

    /// Branch words of the leaves of the tree at `root`, by node id.
    fn leaf_words(&self, root: u32, out: &mut Vec<(u32, BinaryWord)>) {
        let mut path = BinaryWord::empty();
        // (node, next child to visit)
        let mut stack: Vec<(u32, u8)> = vec![(root, 0)];
        while let Some((v, next)) = stack.pop() {
            if self.is_leaf(v) {
                out.push((v, path.clone()));
                path.pop();
                continue;
            }
            if next < 2 {
                stack.push((v, next + 1));
                path.push(next);
                stack.push((self.nodes[v as usize].kids[next as usize], 0));
            } else {
                path.pop();
            }
        }
    }

    pub fn to_element(&self) -> Element {
        let mut dom = Vec::with_capacity(self.leaves);
        self.leaf_words(self.domain_root, &mut dom);
        let mut ran = Vec::with_capacity(self.leaves);
        self.leaf_words(self.range_root, &mut ran);
        ran.sort_unstable_by_key(|&(id, _)| id);
        let pairs = dom
            .into_iter()
            .map(|(id, u)| {
                let partner = self.nodes[id as usize].partner;
                let k = ran.binary_search_by_key(&partner, |&(id, _)| id).expect("partner is a range leaf");
                (u, ran[k].1.clone())
            })
            .collect();
        Element::from_pairs(pairs).expect("live diagram stays valid").0
    }
}

/// Audit counters of a [`Tracer`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AuditCounts {
    pub local: u64,
    pub full: u64,
}

/// A [`LiveDiagram`] with an audit schedule: a local audit of the rebuilt
/// nodes every `audit_every` steps, and a full audit whenever the steps
/// since the last one reach the current leaf count (so full audits cost
/// O(1) amortised per step) and at every [`Tracer::checkpoint`].
#[derive(Debug, Clone)]
pub struct Tracer {
    live: LiveDiagram,
    audit_every: u64,
    steps: u64,
    since_local: u64,
    since_full: u64,
    counts: AuditCounts,
}

impl Tracer {
    /// `audit_every = 0` disables the local audits.
    pub fn new(start: &Element, audit_every: u64) -> Self {
        let mut live = LiveDiagram::from_element(start);
        live.tracking = audit_every > 0;
        Self { live, audit_every, steps: 0, since_local: 0, since_full: 0, counts: AuditCounts::default() }
    }

    pub fn push(&mut self, step: Step) -> Result<(), AuditError> {
        self.live.push(step);
        self.steps += 1;
        self.since_local += 1;
        self.since_full += 1;
        if self.audit_every > 0 && self.since_local >= self.audit_every {
            self.live.audit_recent()?;
            self.counts.local += 1;
            self.since_local = 0;
            if self.since_full >= self.live.num_leaves() as u64 {
                self.checkpoint()?;
            }
        }
        Ok(())
    }

    /// Full audit now.
    pub fn checkpoint(&mut self) -> Result<(), AuditError> {
        self.live.audit()?;
        self.counts.full += 1;
        self.since_full = 0;
        Ok(())
    }

    /// Steps taken so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn num_leaves(&self) -> usize {
        self.live.num_leaves()
    }

    pub fn audits(&self) -> AuditCounts {
        self.counts
    }

    pub fn element(&self) -> Element {
        self.live.to_element()
    }
}

/// Options for [`walk`].
#[derive(Debug, Clone, Copy)]
pub struct WalkOptions {
    /// Local audit period in steps (0 disables auditing).
    pub audit_every: u64,
    /// Record N at every `stride`-th prefix (and at the end).
    pub stride: u64,
}

/// Leaf counts along a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    /// `(prefix length, N(g · prefix))`, starting with the empty prefix.
    pub samples: Vec<(u64, u64)>,
    /// Smallest N over all prefixes, with its prefix length.
    pub min_leaves: (u64, u64),
    pub audits: AuditCounts,
    pub final_element: Element,
}

/// Walks `word` from `start`, recording leaf counts.
pub fn walk(start: &Element, word: &GroupWord, opts: WalkOptions) -> Result<Walk, AuditError> {
    let mut tracer = Tracer::new(start, opts.audit_every);
    let mut samples = vec![(0, tracer.num_leaves() as u64)];
    let mut min_leaves = (0, tracer.num_leaves() as u64);
    let total = word.length();
    for step in word.steps() {
        tracer.push(step)?;
        let (k, n) = (tracer.steps(), tracer.num_leaves() as u64);
        if n < min_leaves.1 {
            min_leaves = (k, n);
        }
        if opts.stride > 0 && (k % opts.stride == 0 || k == total) {
            samples.push((k, n));
        }
    }
    tracer.checkpoint()?;
    Ok(Walk { samples, min_leaves, audits: tracer.audits(), final_element: tracer.element() })
}
