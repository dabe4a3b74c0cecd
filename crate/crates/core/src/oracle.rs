//! Exact search in Cayley graphs: balls, word lengths, geodesics,
//! ball-avoiding distances, divergence profiles and estimates of the
//! leaf-count constants.

use std::collections::HashMap;
use std::fmt;

use indexmap::map::Entry;
use indexmap::IndexMap;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::element::{Element, ElementKey};
use crate::generators::{Alphabet, GroupWord, Step};

pub const DEFAULT_NODE_CAP: usize = 5_000_000;

/// Default ball radius per alphabet: 8 for A, 6 for B, 5 for C.
pub fn default_radius(alphabet: Alphabet) -> u32 {
    match alphabet {
        Alphabet::A => 8,
        Alphabet::B => 6,
        Alphabet::C => 5,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("node cap {cap} exceeded while enumerating radius {radius}")]
    ResourceLimit { cap: usize, radius: u32 },
    #[error("an endpoint lies in the forbidden ball")]
    EndpointForbidden,
}

// Frontiers smaller than this are expanded on the calling thread.
const PAR_THRESHOLD: usize = 256;

fn neighbours(items: &[&Element], steps: &[Step], inverse: bool) -> Vec<Vec<Element>> {
    let expand = |g: &&Element| -> Vec<Element> {
        steps
            .iter()
            .map(|s| {
                let s = if inverse { s.inverse() } else { *s };
                g.multiply(s.element())
            })
            .collect()
    };
    if items.len() >= PAR_THRESHOLD {
        items.par_iter().map(expand).collect()
    } else {
        items.iter().map(expand).collect()
    }
}

/// Largest change of the leaf count under one generator step. Gives the
/// certified bound `|g| ≥ (N(g) - 1) / step_leaf_change`.
pub fn step_leaf_change(alphabet: Alphabet) -> usize {
    alphabet.steps().iter().map(|s| s.element().num_leaves() - 1).max().unwrap()
}

/// Certified lower bound on `|g|` from the leaf count alone.
pub fn leaf_count_length_bound(g: &Element, alphabet: Alphabet) -> u32 {
    ((g.num_leaves() - 1).div_ceil(step_leaf_change(alphabet))) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct BallNode {
    dist: u32,
    // (index of parent, step with parent · step = this)
    parent: Option<(u32, Step)>,
}

/// A Cayley ball: every element at distance at most `radius` from the
/// identity, with its distance and a BFS parent pointer. Elements are held
/// by their compact keys; insertion order is the deterministic BFS order.
#[derive(Debug, Clone)]
pub struct BallIndex {
    alphabet: Alphabet,
    radius: u32,
    nodes: IndexMap<ElementKey, BallNode>,
    // entry i * k + s: index of element(i) · step s, or NONE
    adjacency: Option<Vec<u32>>,
}

const NONE: u32 = u32::MAX;

impl BallIndex {
    /// Breadth-first closure of the identity. Fails once more than
    /// `node_cap` elements have been found.
    pub fn enumerate(alphabet: Alphabet, radius: u32, node_cap: usize) -> Result<Self, OracleError> {
        let ball = Self::build(alphabet, radius, node_cap, false);
        if ball.radius < radius {
            return Err(OracleError::ResourceLimit { cap: node_cap, radius: ball.radius + 1 });
        }
        Ok(ball)
    }

    /// Like [`BallIndex::enumerate`], but stops at the last complete level
    /// that fits under `node_cap`.
    pub fn enumerate_truncated(alphabet: Alphabet, radius: u32, node_cap: usize) -> Self {
        Self::build(alphabet, radius, node_cap, false)
    }

    /// Truncated enumeration that also records the neighbour table.
    pub fn enumerate_with_adjacency(alphabet: Alphabet, radius: u32, node_cap: usize) -> Self {
        Self::build(alphabet, radius, node_cap, true)
    }

    fn build(alphabet: Alphabet, radius: u32, node_cap: usize, with_adjacency: bool) -> Self {
        let steps = alphabet.steps();
        let k = steps.len();
        let mut nodes = IndexMap::new();
        nodes.insert(Element::identity().to_key(), BallNode { dist: 0, parent: None });
        let mut adjacency: Vec<u32> = Vec::new();
        let mut level: Vec<Element> = vec![Element::identity()];
        let mut level_start = 0;
        let mut reached = 0;
        let mut d = 0;
        loop {
            let expand_only = d == radius;
            if expand_only && !with_adjacency {
                break;
            }
            let refs: Vec<&Element> = level.iter().collect();
            let found = neighbours(&refs, &steps, false);
            let mut next_level = Vec::new();
            let mut next: IndexMap<ElementKey, BallNode> = IndexMap::new();
            let mut over = false;
            let mut adj_rows = Vec::with_capacity(if with_adjacency { level.len() * k } else { 0 });
            'outer: for (i, row) in found.into_iter().enumerate() {
                for (s, g) in row.into_iter().enumerate() {
                    let key = g.to_key();
                    if let Some(j) = nodes.get_index_of(&key) {
                        adj_rows.push(j as u32);
                        continue;
                    }
                    if expand_only {
                        adj_rows.push(NONE);
                        continue;
                    }
                    match next.entry(key) {
                        Entry::Occupied(o) => adj_rows.push((nodes.len() + o.index()) as u32),
                        Entry::Vacant(v) => {
                            adj_rows.push((nodes.len() + v.index()) as u32);
                            v.insert(BallNode { dist: d + 1, parent: Some(((level_start + i) as u32, steps[s])) });
                            next_level.push(g);
                            if nodes.len() + next.len() > node_cap {
                                over = true;
                                break 'outer;
                            }
                        }
                    }
                }
            }
            if over {
                // the last complete level has unknown outer neighbours
                if with_adjacency {
                    adjacency.extend(adj_rows.iter().map(|&j| if (j as usize) < nodes.len() { j } else { NONE }));
                    adjacency.resize(nodes.len() * k, NONE);
                }
                break;
            }
            if with_adjacency {
                adjacency.extend(adj_rows);
            }
            if expand_only || next.is_empty() {
                reached = if next.is_empty() { radius } else { d };
                break;
            }
            level_start = nodes.len();
            nodes.extend(next);
            level = next_level;
            d += 1;
            reached = d;
        }
        if with_adjacency {
            adjacency.resize(nodes.len() * k, NONE);
        }
        Self { alphabet, radius: reached, nodes, adjacency: with_adjacency.then_some(adjacency) }
    }

    /// Rebuilds a ball from `(element, distance)` pairs, recomputing parent
    /// pointers. Distances must form a genuine BFS layering.
    pub fn from_distances(alphabet: Alphabet, radius: u32, mut entries: Vec<(Element, u32)>) -> Result<Self, BallFormatError> {
        entries.sort_by_key(|e| e.1);
        let mut nodes: IndexMap<ElementKey, BallNode> = IndexMap::with_capacity(entries.len());
        for (g, d) in &entries {
            if *d > radius {
                return Err(BallFormatError::DistanceAboveRadius(*d));
            }
            if nodes.insert(g.to_key(), BallNode { dist: *d, parent: None }).is_some() {
                return Err(BallFormatError::Duplicate);
            }
        }
        match entries.first() {
            Some((g, 0)) if g.is_identity() => {}
            _ => return Err(BallFormatError::MissingIdentity),
        }
        if entries.get(1).is_some_and(|e| e.1 == 0) {
            return Err(BallFormatError::NotLayered(0));
        }
        let steps = alphabet.steps();
        for (i, (g, d)) in entries.iter().enumerate().skip(1) {
            let parent = steps.iter().find_map(|s| {
                let p = g.multiply(s.inverse().element());
                let (j, _, pn) = nodes.get_full(&p.to_key())?;
                (pn.dist + 1 == *d).then_some((j as u32, *s))
            });
            let Some(parent) = parent else {
                return Err(BallFormatError::NotLayered(*d));
            };
            nodes[i].parent = Some(parent);
        }
        Ok(Self { alphabet, radius, nodes, adjacency: None })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.nodes.contains_key(&g.to_key())
    }

    pub fn distance(&self, g: &Element) -> Option<u32> {
        self.nodes.get(&g.to_key()).map(|n| n.dist)
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.nodes.get_index_of(&g.to_key())
    }

    pub fn element(&self, i: usize) -> Element {
        Element::from_key(self.nodes.get_index(i).unwrap().0).expect("keys are produced by to_key")
    }

    pub fn distance_at(&self, i: usize) -> u32 {
        self.nodes[i].dist
    }

    /// Elements with their distances, in BFS order.
    pub fn iter(&self) -> impl Iterator<Item = (Element, u32)> + '_ {
        (0..self.len()).map(|i| (self.element(i), self.nodes[i].dist))
    }

    /// Indices of the elements at distance exactly `n`.
    pub fn sphere(&self, n: u32) -> std::ops::Range<usize> {
        let start = self.nodes.values().position(|v| v.dist == n).unwrap_or(self.nodes.len());
        let end = self.nodes.values().skip(start).position(|v| v.dist != n).map_or(self.nodes.len(), |k| start + k);
        start..end
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        (0..=self.radius).map(|n| self.sphere(n).len()).collect()
    }

    fn geodesic_at(&self, mut i: usize) -> GroupWord {
        let mut steps = Vec::new();
        while let Some((p, s)) = self.nodes[i].parent {
            steps.push(s);
            i = p as usize;
        }
        steps.reverse();
        GroupWord::from_steps(self.alphabet, steps).expect("steps come from the alphabet")
    }

    /// The geodesic recorded by the parent pointers.
    pub fn geodesic(&self, g: &Element) -> Option<GroupWord> {
        self.index_of(g).map(|i| self.geodesic_at(i))
    }

    /// `c_hat`, `C_hat`: extreme values of `|g| / N(g)` over the ball
    /// without the identity.
    pub fn estimate_constants(&self) -> Option<ConstantsEstimate> {
        let mut lo: Option<Ratio<i64>> = None;
        let mut hi: Option<Ratio<i64>> = None;
        for (key, node) in self.nodes.iter().skip(1) {
            let r = Ratio::new(node.dist as i64, key.num_leaves() as i64);
            lo = Some(lo.map_or(r, |x| x.min(r)));
            hi = Some(hi.map_or(r, |x| x.max(r)));
        }
        Some(ConstantsEstimate { c_hat: lo?, big_c_hat: hi?, radius: self.radius, sample_size: self.len() - 1 })
    }

    /// Neighbour table when recorded: entry `i * k + s` is the index of
    /// `element(i) · step s`, or `u32::MAX` outside the ball.
    pub fn adjacency(&self) -> Option<&[u32]> {
        self.adjacency.as_deref()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BallFormatError {
    #[error("distance {0} exceeds the declared radius")]
    DistanceAboveRadius(u32),
    #[error("element listed twice")]
    Duplicate,
    #[error("ball does not contain the identity at distance 0")]
    MissingIdentity,
    #[error("an element at distance {0} has no neighbour one step closer")]
    NotLayered(u32),
}

/// Extreme ratios `|g| / N(g)` over a ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstantsEstimate {
    pub c_hat: Ratio<i64>,
    pub big_c_hat: Ratio<i64>,
    pub radius: u32,
    pub sample_size: usize,
}

impl fmt::Display for ConstantsEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "radius={} sample={} c_hat={} C_hat={}", self.radius, self.sample_size, self.c_hat, self.big_c_hat)
    }
}

pub fn estimate_constants(alphabet: Alphabet, radius: u32, node_cap: usize) -> Result<ConstantsEstimate, OracleError> {
    let ball = BallIndex::enumerate(alphabet, radius.max(1), node_cap)?;
    Ok(ball.estimate_constants().expect("radius at least 1"))
}

/// Bidirectional breadth-first search from `start` to `goal` through
/// vertices accepted by `allowed`. Returns the distance and a shortest step
/// sequence when it is at most `cap`.
fn bidirectional(
    start: &Element,
    goal: &Element,
    steps: &[Step],
    cap: u32,
    allowed: &(dyn Fn(&Element) -> bool + Sync),
) -> Option<(u32, Vec<Step>)> {
    if start == goal {
        return Some((0, Vec::new()));
    }
    struct Side {
        seen: IndexMap<Element, Option<(u32, Step)>>,
        level: std::ops::Range<usize>,
        depth: u32,
    }
    let mut fwd = Side { seen: IndexMap::new(), level: 0..1, depth: 0 };
    fwd.seen.insert(start.clone(), None);
    let mut bwd = Side { seen: IndexMap::new(), level: 0..1, depth: 0 };
    bwd.seen.insert(goal.clone(), None);

    let chain = |side: &Side, mut i: usize| -> Vec<Step> {
        let mut out = Vec::new();
        while let Some((p, s)) = side.seen[i] {
            out.push(s);
            i = p as usize;
        }
        out
    };

    while fwd.depth + bwd.depth < cap {
        let forward = fwd.level.len() <= bwd.level.len();
        let (this, other) = if forward { (&mut fwd, &bwd) } else { (&mut bwd, &fwd) };
        if this.level.is_empty() {
            return None;
        }
        let frontier: Vec<&Element> = this.level.clone().map(|i| this.seen.get_index(i).unwrap().0).collect();
        let found = neighbours(&frontier, steps, !forward);
        let start_idx = this.level.start;
        let end = this.seen.len();
        let mut meet = None;
        for (k, row) in found.into_iter().enumerate() {
            for (s, g) in row.into_iter().enumerate() {
                if this.seen.contains_key(&g) || !allowed(&g) {
                    continue;
                }
                let hit = other.seen.get_index_of(&g);
                let (idx, _) = this.seen.insert_full(g, Some(((start_idx + k) as u32, steps[s])));
                if let Some(j) = hit {
                    meet = Some((idx, j));
                    break;
                }
            }
            if meet.is_some() {
                break;
            }
        }
        this.level = end..this.seen.len();
        this.depth += 1;
        if let Some((i, j)) = meet {
            let (fi, bj) = if forward { (i, j) } else { (j, i) };
            let mut path = chain(&fwd, fi);
            path.reverse();
            path.extend(chain(&bwd, bj));
            return Some((fwd.depth + bwd.depth, path));
        }
    }
    None
}

/// Exact `|a|` over `alphabet` when it is at most `cap`.
pub fn word_length(a: &Element, alphabet: Alphabet, cap: u32) -> Option<u32> {
    if leaf_count_length_bound(a, alphabet) > cap {
        return None;
    }
    bidirectional(&Element::identity(), a, &alphabet.steps(), cap, &|_| true).map(|(d, _)| d)
}

/// A shortest word for `a` when `|a| ≤ cap`. Deterministic.
pub fn geodesic(a: &Element, alphabet: Alphabet, cap: u32) -> Option<GroupWord> {
    if leaf_count_length_bound(a, alphabet) > cap {
        return None;
    }
    let (_, steps) = bidirectional(&Element::identity(), a, &alphabet.steps(), cap, &|_| true)?;
    Some(GroupWord::from_steps(alphabet, steps).expect("steps come from the alphabet"))
}

/// Length of a shortest path from `a` to `b` avoiding the closed ball of
/// radius `forbidden_radius` about the identity, when it is at most `cap`.
pub fn avoidant_distance(
    a: &Element,
    b: &Element,
    forbidden_radius: u32,
    alphabet: Alphabet,
    cap: u32,
) -> Result<Option<u32>, OracleError> {
    let forbidden = BallIndex::enumerate(alphabet, forbidden_radius, DEFAULT_NODE_CAP)?;
    avoidant_distance_in(a, b, &forbidden, forbidden_radius, cap)
}

/// As [`avoidant_distance`], with the forbidden ball given by `ball`
/// (whose radius must be at least `forbidden_radius`).
pub fn avoidant_distance_in(a: &Element, b: &Element, ball: &BallIndex, forbidden_radius: u32, cap: u32) -> Result<Option<u32>, OracleError> {
    assert!(ball.radius() >= forbidden_radius);
    let allowed = |g: &Element| ball.distance(g).is_none_or(|d| d > forbidden_radius);
    if !allowed(a) || !allowed(b) {
        return Err(OracleError::EndpointForbidden);
    }
    Ok(bidirectional(a, b, &ball.alphabet().steps(), cap, &allowed).map(|(d, _)| d))
}

/// Result of a capped distance query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distance {
    Exact(u32),
    /// The distance exceeds this value.
    Above(u32),
}

impl Distance {
    /// Certified lower bound: the exact value, or one more than the bound.
    pub fn lower_bound(self) -> u32 {
        match self {
            Distance::Exact(d) => d,
            Distance::Above(d) => d + 1,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Exact(d) => write!(f, "{d}"),
            Distance::Above(d) => write!(f, ">{d}"),
        }
    }
}

/// Exact distances up to a cap by meeting a precomputed ball halfway.
pub struct DistanceOracle {
    ball: BallIndex,
}

impl DistanceOracle {
    pub fn new(ball: BallIndex) -> Self {
        Self { ball }
    }

    pub fn build(alphabet: Alphabet, radius: u32, node_cap: usize) -> Result<Self, OracleError> {
        Ok(Self::new(BallIndex::enumerate(alphabet, radius, node_cap)?))
    }

    pub fn ball(&self) -> &BallIndex {
        &self.ball
    }

    /// `|g|` if at most `cap`, else `Above(cap)`. Requires `cap ≤ 2·radius`
    /// for exactness up to `cap`; beyond that the answer is still a valid
    /// lower bound.
    pub fn distance(&self, g: &Element, cap: u32) -> Distance {
        if let Some(d) = self.ball.distance(g) {
            return if d <= cap { Distance::Exact(d) } else { Distance::Above(cap) };
        }
        let alphabet = self.ball.alphabet();
        let r = self.ball.radius();
        if cap <= r || leaf_count_length_bound(g, alphabet) > cap {
            return Distance::Above(cap.max(r));
        }
        // the first backward level touching the ball sits at depth |g| - r
        let steps: Vec<Step> = alphabet.steps().iter().map(|s| s.inverse()).collect();
        let mut seen: HashMap<Element, ()> = HashMap::new();
        seen.insert(g.clone(), ());
        let mut level = vec![g.clone()];
        for depth in 1..=cap - r {
            let refs: Vec<&Element> = level.iter().collect();
            let found = neighbours(&refs, &steps, false);
            let mut next = Vec::new();
            for y in found.into_iter().flatten() {
                if self.ball.contains(&y) {
                    return Distance::Exact(depth + r);
                }
                if seen.insert(y.clone(), ()).is_none() {
                    next.push(y);
                }
            }
            level = next;
        }
        Distance::Above(cap)
    }
}

/// Provenance of a divergence value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileTag {
    /// Maximum over every pair of the sphere, each distance exact.
    Exact,
    /// Maximum over a uniform sample of pairs, each distance exact.
    Sampled,
    /// Some pair exceeded the cap; the value is a lower bound.
    LowerBound,
}

impl ProfileTag {
    pub fn name(self) -> &'static str {
        match self {
            ProfileTag::Exact => "exact",
            ProfileTag::Sampled => "sampled",
            ProfileTag::LowerBound => "lower_bound",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [ProfileTag::Exact, ProfileTag::Sampled, ProfileTag::LowerBound].into_iter().find(|t| t.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivergenceRow {
    pub n: u32,
    pub div: u32,
    pub tag: ProfileTag,
    pub sphere_size: usize,
    pub pairs: usize,
    /// Pairs whose distance needed a search outside the precomputed ball.
    pub escalated: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct ProfileOptions {
    /// Spheres larger than this are sampled.
    pub sphere_threshold: usize,
    /// Number of pairs drawn from a sampled sphere.
    pub sample_pairs: usize,
    /// Radius of the precomputed ball; defaults to `n_max + 4`.
    pub ball_radius: Option<u32>,
    pub node_cap: usize,
    pub seed: u64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self { sphere_threshold: 2000, sample_pairs: 2000, ball_radius: None, node_cap: DEFAULT_NODE_CAP, seed: 0 }
    }
}

/// `div(n)` for `1 ≤ n ≤ n_max`: the largest distance between two points of
/// the sphere of radius `n` among paths avoiding the closed ball of radius
/// `⌊n/4⌋`.
///
/// Distances are first found inside a precomputed ball of radius `R`. A
/// path of length `L` between points at distance `n` stays within radius
/// `n + ⌊L/2⌋`, so every path with `L ≤ 2(R - n) + 1` is visible there and
/// any in-ball value `U ≤ 2(R + 1 - n)` is exact. Larger or missing values
/// are settled by a restricted bidirectional search, largest first, until
/// no remaining pair can raise the maximum.
pub fn divergence_profile(alphabet: Alphabet, n_max: u32, cap: u32, opts: &ProfileOptions) -> Result<Vec<DivergenceRow>, OracleError> {
    let want = opts.ball_radius.unwrap_or(n_max + 4).max(n_max);
    let ball = BallIndex::enumerate_with_adjacency(alphabet, want, opts.node_cap);
    if ball.radius() < n_max {
        return Err(OracleError::ResourceLimit { cap: opts.node_cap, radius: ball.radius() + 1 });
    }
    let k = alphabet.steps().len();
    let adj = ball.adjacency().expect("recorded during enumeration");
    let dist: Vec<u32> = (0..ball.len()).map(|i| ball.distance_at(i)).collect();
    let r = ball.radius();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let fr = n / 4;
        let sphere = ball.sphere(n);
        let size = sphere.len();
        let sampled = size > opts.sphere_threshold;
        let mut pairs: Vec<(usize, usize)> = if sampled {
            (0..opts.sample_pairs)
                .map(|_| {
                    let a = rng.gen_range(sphere.clone());
                    let mut b = rng.gen_range(sphere.clone());
                    while b == a && size > 1 {
                        b = rng.gen_range(sphere.clone());
                    }
                    (a.min(b), a.max(b))
                })
                .collect()
        } else {
            sphere.clone().flat_map(|a| (a + 1..sphere.end).map(move |b| (a, b))).collect()
        };
        pairs.sort_unstable();
        pairs.dedup();
        let mut by_source: Vec<(usize, Vec<usize>)> = Vec::new();
        for &(a, b) in &pairs {
            match by_source.last_mut() {
                Some((s, t)) if *s == a => t.push(b),
                _ => by_source.push((a, vec![b])),
            }
        }
        let found: Vec<Vec<Option<u32>>> = by_source
            .par_iter()
            .map_init(
                || vec![u32::MAX; ball.len()],
                |seen, (src, targets)| annulus_bfs(adj, k, &dist, fr, cap, seen, *src, targets),
            )
            .collect();
        let exact_limit = 2 * (r + 1 - n);
        let mut best = 0u32;
        // (upper bound or None, a, b) for pairs not settled inside the ball
        let mut open: Vec<(Option<u32>, usize, usize)> = Vec::new();
        for ((src, targets), ds) in by_source.iter().zip(&found) {
            for (&t, d) in targets.iter().zip(ds) {
                match *d {
                    Some(d) if d <= exact_limit => best = best.max(d),
                    d => open.push((d, *src, t)),
                }
            }
        }
        open.sort_by_key(|&(d, a, b)| (std::cmp::Reverse(d.unwrap_or(u32::MAX)), a, b));
        let mut escalated = 0;
        let mut lower = false;
        for &(upper, a, b) in &open {
            if upper.is_some_and(|u| u <= best) {
                break;
            }
            escalated += 1;
            let limit = upper.map_or(cap, |u| u.min(cap));
            let d = avoidant_distance_in(&ball.element(a), &ball.element(b), &ball, fr, limit)?;
            match d {
                Some(d) => best = best.max(d),
                None if upper.is_some_and(|u| u <= cap) => unreachable!("a path of the recorded length exists"),
                None => {
                    lower = true;
                    best = best.max(cap + 1);
                }
            }
        }
        let tag = if lower {
            ProfileTag::LowerBound
        } else if sampled {
            ProfileTag::Sampled
        } else {
            ProfileTag::Exact
        };
        rows.push(DivergenceRow { n, div: best, tag, sphere_size: size, pairs: pairs.len(), escalated });
    }
    Ok(rows)
}

/// Breadth-first search from `src` through the ball's neighbour table,
/// restricted to vertices farther than `fr` from the identity. Returns the
/// depth at which each target was reached, if within `cap`.
#[allow(clippy::too_many_arguments)]
fn annulus_bfs(adj: &[u32], k: usize, dist: &[u32], fr: u32, cap: u32, seen: &mut [u32], src: usize, targets: &[usize]) -> Vec<Option<u32>> {
    let mut touched = vec![src];
    seen[src] = 0;
    let mut frontier = vec![src];
    let mut depth = 0;
    let mut remaining = targets.len();
    while !frontier.is_empty() && depth < cap && remaining > 0 {
        depth += 1;
        let mut next = Vec::new();
        for &v in &frontier {
            for &u in &adj[v * k..v * k + k] {
                if u == NONE {
                    continue;
                }
                let u = u as usize;
                if seen[u] != NONE || dist[u] <= fr {
                    continue;
                }
                seen[u] = depth;
                touched.push(u);
                if targets.binary_search(&u).is_ok() {
                    remaining -= 1;
                }
                next.push(u);
            }
        }
        frontier = next;
    }
    let out = targets.iter().map(|&t| (seen[t] != NONE).then_some(seen[t])).collect();
    for t in touched {
        seen[t] = NONE;
    }
    out
}
