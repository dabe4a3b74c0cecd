//! Path certificates and their checker.

use std::fmt;

use num_rational::Ratio;

use crate::element::Element;
use crate::generators::{eval_word, x_n, Alphabet, GroupWord};
use crate::live::{AuditCounts, AuditError, Tracer};
use crate::oracle::{step_leaf_change, BallIndex, DistanceOracle, DEFAULT_NODE_CAP};
use crate::synth::SynthesisRoute;
use crate::witness::{closing_element, endpoint_element, endpoint_word, WitnessConstants};
use crate::word::BinaryWord;

/// Where the value standing for `|g|` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LambdaSource {
    Exact,
    /// `⌈C·N(g)⌉`, used when `|g|` is beyond the search cap.
    Surrogate,
}

impl LambdaSource {
    pub fn name(self) -> &'static str {
        match self {
            LambdaSource::Exact => "exact",
            LambdaSource::Surrogate => "surrogate",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [LambdaSource::Exact, LambdaSource::Surrogate].into_iter().find(|l| l.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lambda {
    pub value: u64,
    pub source: LambdaSource,
}

/// Role of a segment in the path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentLabel {
    /// `w1` … `w5`.
    W(u8),
    /// The connector.
    P,
    /// An inverted `w_i` of the second witness, walked backwards.
    WInv(u8),
}

impl SegmentLabel {
    pub fn name(self) -> String {
        match self {
            SegmentLabel::W(i) => format!("w{i}"),
            SegmentLabel::P => "p".to_string(),
            SegmentLabel::WInv(i) => format!("w{i}inv"),
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        if s == "p" {
            return Some(SegmentLabel::P);
        }
        let rest = s.strip_prefix('w')?;
        let (digits, inv) = match rest.strip_suffix("inv") {
            Some(d) => (d, true),
            None => (rest, false),
        };
        let i: u8 = digits.parse().ok().filter(|i| (1..=5).contains(i))?;
        if digits.len() != 1 {
            return None;
        }
        Some(if inv { SegmentLabel::WInv(i) } else { SegmentLabel::W(i) })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub label: SegmentLabel,
    pub word: GroupWord,
    /// How a synthesized segment was obtained.
    pub route: Option<SynthesisRoute>,
}

/// `N` of the element reached after `prefix` letters, with its distance
/// from the identity when known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evidence {
    pub prefix: u64,
    pub leaves: u64,
    pub distance: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCertificate {
    pub alphabet: Alphabet,
    pub base: Element,
    pub lambda: Lambda,
    /// `λ` of the far endpoint, for connections.
    pub end_lambda: Option<Lambda>,
    pub segments: Vec<Segment>,
    pub target: Element,
    pub constants: WitnessConstants,
    pub stride: u64,
    pub evidence: Vec<Evidence>,
}

impl PathCertificate {
    /// All segments as one word, letters kept verbatim.
    pub fn word(&self) -> GroupWord {
        let letters = self.segments.iter().flat_map(|s| s.word.letters().iter().copied()).collect();
        GroupWord::new(self.alphabet, letters).expect("segments lie in the certificate alphabet")
    }

    /// `||w||`.
    pub fn length(&self) -> u64 {
        self.segments.iter().map(|s| s.word.length()).sum()
    }

    pub fn is_connection(&self) -> bool {
        self.end_lambda.is_some()
    }

    /// `λ` governing the avoidance radius: the smaller one for connections.
    pub fn min_lambda(&self) -> u64 {
        self.end_lambda.map_or(self.lambda.value, |e| e.value.min(self.lambda.value))
    }

    /// `δ·λ`.
    pub fn avoidance_radius(&self) -> Ratio<i64> {
        self.constants.delta * Ratio::from_integer(self.min_lambda() as i64)
    }

    /// The claimed length bound: `D·λ` for a witness, and
    /// `D·(λ1 + λ2) + 2Q·max(λ1, λ2)` for a connection.
    pub fn length_bound(&self) -> Ratio<i64> {
        let d = self.constants.d;
        match self.end_lambda {
            None => d * Ratio::from_integer(self.lambda.value as i64),
            Some(e) => {
                let (a, b) = (self.lambda.value as i64, e.value as i64);
                d * Ratio::from_integer(a + b) + Ratio::from_integer(2 * self.constants.q as i64 * a.max(b))
            }
        }
    }
}

/// Evidence density and audit schedule for [`trace`].
#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    /// Local audit period (0 disables auditing).
    pub audit_every: u64,
    /// Words longer than this are sampled at stride `⌈||w|| / max_records⌉`.
    pub max_records: u64,
    /// Overrides the computed stride.
    pub stride: Option<u64>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { audit_every: 512, max_records: 10_000, stride: None }
    }
}

pub fn stride_for(total: u64, max_records: u64) -> u64 {
    if total <= max_records.max(1) {
        1
    } else {
        total.div_ceil(max_records)
    }
}

/// Output of [`trace`].
#[derive(Debug, Clone)]
pub struct Trace {
    pub evidence: Vec<Evidence>,
    pub stride: u64,
    pub final_element: Element,
    pub audits: AuditCounts,
}

/// Walks the segments from `start`, recording `N` at every stride
/// multiple and at every segment boundary; full audit at each boundary.
pub fn trace(start: &Element, segments: &[Segment], opts: &TraceOptions) -> Result<Trace, AuditError> {
    let total: u64 = segments.iter().map(|s| s.word.length()).sum();
    let stride = opts.stride.unwrap_or_else(|| stride_for(total, opts.max_records)).max(1);
    let mut tracer = Tracer::new(start, opts.audit_every);
    let mut evidence = vec![Evidence { prefix: 0, leaves: tracer.num_leaves() as u64, distance: None }];
    for seg in segments {
        for step in seg.word.steps() {
            tracer.push(step)?;
            if tracer.steps().is_multiple_of(stride) {
                evidence.push(Evidence { prefix: tracer.steps(), leaves: tracer.num_leaves() as u64, distance: None });
            }
        }
        if evidence.last().is_some_and(|e| e.prefix != tracer.steps()) {
            evidence.push(Evidence { prefix: tracer.steps(), leaves: tracer.num_leaves() as u64, distance: None });
        }
        if opts.audit_every > 0 {
            tracer.checkpoint()?;
        }
    }
    Ok(Trace { evidence, stride, final_element: tracer.element(), audits: tracer.audits() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerifyMode {
    /// Exact distances of the recorded prefixes, up to a cap.
    Exact,
    /// `c·N(prefix) > δλ` at every recorded prefix.
    LeafBound,
    /// The per-segment lemma chain.
    Lemmas,
}

impl VerifyMode {
    pub fn name(self) -> &'static str {
        match self {
            VerifyMode::Exact => "exact",
            VerifyMode::LeafBound => "leafbound",
            VerifyMode::Lemmas => "lemmas",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [VerifyMode::Exact, VerifyMode::LeafBound, VerifyMode::Lemmas].into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Pass,
    Fail,
    Skip,
}

impl Outcome {
    fn of(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skip => "SKIP",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub mode: VerifyMode,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    /// No check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome != Outcome::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.outcome == Outcome::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: impl Into<String>, outcome: Outcome, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), outcome, detail: detail.into() });
    }

    fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.push(name, Outcome::of(ok), detail);
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode {}", self.mode.name())?;
        for c in &self.checks {
            writeln!(f, "{} {}: {}", c.outcome.name(), c.name, c.detail)?;
        }
        let fails = self.failures().count();
        write!(f, "{}", if fails == 0 { "verdict pass".to_string() } else { format!("verdict fail ({fails} failed)") })
    }
}

/// Checks a certificate. Failures are report entries, never errors.
pub fn verify(cert: &PathCertificate, mode: VerifyMode, bfs_cap: u32) -> VerificationReport {
    let mut report = VerificationReport { mode, checks: Vec::new() };
    let opts = TraceOptions { stride: Some(cert.stride.max(1)), ..TraceOptions::default() };
    let traced = match trace(&cert.base, &cert.segments, &opts) {
        Ok(t) => {
            report.check("audit", true, format!("{} local and {} full audits", t.audits.local, t.audits.full));
            Some(t)
        }
        Err(e) => {
            report.check("audit", false, e.to_string());
            None
        }
    };
    let product = eval_word(&cert.word());
    report.check("endpoint", cert.base.multiply(&product) == cert.target, "base · eval(w) = target");
    if let Some(t) = &traced {
        report.check("trace_endpoint", t.final_element == cert.target, "incremental evaluation reaches the target");
        let recorded: Vec<(u64, u64)> = cert.evidence.iter().map(|e| (e.prefix, e.leaves)).collect();
        let recomputed: Vec<(u64, u64)> = t.evidence.iter().map(|e| (e.prefix, e.leaves)).collect();
        report.check("evidence", recorded == recomputed, format!("{} records at stride {}", recomputed.len(), cert.stride));
    }
    if !cert.is_connection() {
        let ql = cert.constants.q * cert.lambda.value;
        report.check("target_form", cert.target == endpoint_element(ql), format!("target = x0^{ql} x1^-1 x0^{}", 1 - ql as i64));
    }
    if cert.constants.strict {
        report.check("constants", cert.constants.satisfies_strict(), format!("M={} Q={} c={} C={}", cert.constants.m, cert.constants.q, cert.constants.c, cert.constants.big_c));
        let len = Ratio::from_integer(cert.length() as i64);
        report.check("length", len <= cert.length_bound(), format!("||w|| = {} against bound {}", cert.length(), cert.length_bound()));
    } else {
        report.push("constants", Outcome::Skip, "scaled constants");
        report.push("length", Outcome::Skip, format!("scaled constants; ||w|| = {}", cert.length()));
    }
    let leaves: Vec<Evidence> = traced.as_ref().map_or_else(|| cert.evidence.clone(), |t| t.evidence.clone());
    match mode {
        VerifyMode::Exact => exact_checks(cert, &leaves, bfs_cap, &mut report),
        VerifyMode::LeafBound => {
            let threshold = cert.avoidance_radius();
            let worst = leaves.iter().min_by_key(|e| e.leaves);
            let ok = leaves.iter().all(|e| cert.constants.c * Ratio::from_integer(e.leaves as i64) > threshold);
            let detail = worst.map_or(String::new(), |e| format!("min N = {} at prefix {}; c·N > δλ = {}", e.leaves, e.prefix, threshold));
            report.check("leafbound", ok, detail);
        }
        VerifyMode::Lemmas => lemma_checks(cert, &mut report),
    }
    report
}

fn exact_checks(cert: &PathCertificate, evidence: &[Evidence], bfs_cap: u32, report: &mut VerificationReport) {
    let threshold = cert.avoidance_radius();
    let per_step = step_leaf_change(cert.alphabet) as u64;
    let ball = BallIndex::enumerate_truncated(cert.alphabet, bfs_cap.div_ceil(2), DEFAULT_NODE_CAP);
    let oracle = DistanceOracle::new(ball);
    let mut tracer = Tracer::new(&cert.base, 0);
    let mut steps = cert.segments.iter().flat_map(|s| s.word.steps());
    let mut worst: Option<(u64, u32, bool)> = None;
    let mut ok = true;
    for e in evidence {
        while tracer.steps() < e.prefix {
            tracer.push(steps.next().expect("evidence lies within the word")).expect("auditing is off");
        }
        // the leaf count alone may already settle it
        let from_leaves = (e.leaves - 1).div_ceil(per_step);
        let (bound, exact) = if Ratio::from_integer(from_leaves as i64) > threshold && from_leaves > bfs_cap as u64 {
            (from_leaves.min(u32::MAX as u64) as u32, false)
        } else {
            let d = oracle.distance(&tracer.element(), bfs_cap);
            (d.lower_bound(), matches!(d, crate::oracle::Distance::Exact(_)))
        };
        ok &= Ratio::from_integer(bound as i64) > threshold;
        if worst.is_none_or(|w| bound < w.1) {
            worst = Some((e.prefix, bound, exact));
        }
    }
    let detail = worst.map_or(String::new(), |(p, d, exact)| {
        format!("min |g·w'| {}{} at prefix {} over {} prefixes; δλ = {}", if exact { "= " } else { "≥ " }, d, p, evidence.len(), threshold)
    });
    report.check("distance", ok, detail);
}

/// Walks `word` from `start` and returns the first prefix `(k, N)` failing
/// `ok`, or the audit error.
fn first_violation(start: &Element, word: &GroupWord, mut ok: impl FnMut(u64, u64) -> bool) -> Result<Option<(u64, u64)>, AuditError> {
    let mut tracer = Tracer::new(start, 512);
    if !ok(0, tracer.num_leaves() as u64) {
        return Ok(Some((0, tracer.num_leaves() as u64)));
    }
    for step in word.steps() {
        tracer.push(step)?;
        let (k, n) = (tracer.steps(), tracer.num_leaves() as u64);
        if !ok(k, n) {
            return Ok(Some((k, n)));
        }
    }
    tracer.checkpoint()?;
    Ok(None)
}

fn prefix_check(report: &mut VerificationReport, name: String, start: &Element, word: &GroupWord, what: &str, ok: impl FnMut(u64, u64) -> bool) {
    match first_violation(start, word, ok) {
        Ok(None) => report.check(name, true, format!("{what} for all {} prefixes", word.length() + 1)),
        Ok(Some((k, n))) => report.check(name, false, format!("{what} fails at prefix {k} with N = {n}")),
        Err(e) => report.check(name, false, e.to_string()),
    }
}

fn lemma_checks(cert: &PathCertificate, report: &mut VerificationReport) {
    let labels: Vec<SegmentLabel> = cert.segments.iter().map(|s| s.label).collect();
    let witness_labels: Vec<SegmentLabel> = (1..=5).map(SegmentLabel::W).collect();
    let mut connection_labels = witness_labels.clone();
    connection_labels.push(SegmentLabel::P);
    connection_labels.extend((1..=5).rev().map(SegmentLabel::WInv));
    let expected = if cert.is_connection() { &connection_labels } else { &witness_labels };
    if labels != *expected {
        let names: Vec<String> = labels.iter().map(|l| l.name()).collect();
        report.check("structure", false, format!("unexpected segment labels {}", names.join(" ")));
        return;
    }
    report.check("structure", true, format!("{} segments", labels.len()));
    let first: Vec<&Segment> = cert.segments[..5].iter().collect();
    witness_checks(&cert.constants, &cert.base, cert.lambda.value, &first, "", report);
    let Some(end) = cert.end_lambda else { return };
    let inverted: Vec<Segment> = cert.segments[6..]
        .iter()
        .rev()
        .map(|s| Segment { label: s.label, word: s.word.inverse(), route: s.route })
        .collect();
    let second: Vec<&Segment> = inverted.iter().collect();
    witness_checks(&cert.constants, &cert.target, end.value, &second, "second.", report);

    let q = cert.constants.q;
    let (la, lb) = (cert.lambda.value, end.value);
    let p = &cert.segments[5].word;
    let start = endpoint_element(q * la);
    let reached = eval_word(&cert.segments[..5].iter().fold(GroupWord::empty(cert.alphabet), |w, s| w.concat(&s.word)));
    report.check("connector.start", cert.base.multiply(&reached) == start, format!("p starts at x0^{0} x1^-1 x0^{1}", q * la, 1 - (q * la) as i64));
    report.check("connector.length", p.length() == 2 * q * la.max(lb), format!("||p|| = {} against 2Q·max λ = {}", p.length(), 2 * q * la.max(lb)));
    let floor = q * la.min(lb);
    prefix_check(report, "connector.prefixes".into(), &start, p, &format!("N > Q·min λ = {floor}"), |_, n| n > floor);
}

fn witness_checks(k: &WitnessConstants, g: &Element, lambda: u64, segs: &[&Segment], prefix: &str, report: &mut VerificationReport) {
    let name = |s: &str| format!("{prefix}{s}");
    let (m, q) = (k.m, k.q);
    let words: Vec<&GroupWord> = segs.iter().map(|s| &s.word).collect();
    let e: Vec<Element> = words.iter().map(|w| eval_word(w)).collect();
    let g1 = g.multiply(&e[0]);
    let g2 = g1.multiply(&e[1]);
    let g3 = g2.multiply(&e[2]);
    let g4 = g3.multiply(&e[3]);
    let g5 = g4.multiply(&e[4]);
    let (n, n1, n2, n3) = (g.num_leaves() as u64, g1.num_leaves() as u64, g2.num_leaves() as u64, g3.num_leaves() as u64);
    report.check(name("base_size"), n >= 4, format!("N(g) = {n}"));

    report.check(name("w1.zero_not_branch"), !g1.range_has_branch(&crate::word::bw("0")), "0 is not a range branch of g1");
    report.check(name("w1.leaf_growth"), n1 <= n + 2, format!("N(g1) = {n1} ≤ N(g) + 2 = {}", n + 2));
    prefix_check(report, name("w1.prefixes"), g, words[0], &format!("N(g·w') ≥ N(g) = {n}"), |_, x| x >= n);

    let mm = 1 + m * n1;
    report.check(name("w2.is_x_m"), e[1] == x_n(mm as usize), format!("eval(w2) = x_{mm}"));
    prefix_check(report, name("w2.prefixes"), &g1, words[1], &format!("N(g1·w') ≥ N(g1) = {n1}"), |_, x| x >= n1);
    report.check(name("w2.leaf_growth"), n2 >= m * n1, format!("N(g2) = {n2} ≥ M·N(g1) = {}", m * n1));

    report.check(name("w3.closing"), e[2] == closing_element(&g1), "eval(w3) is the closing element of g1");
    match segs[2].route {
        Some(SynthesisRoute::Geodesic) if k.strict => {
            let bound = k.big_c * Ratio::from_integer(n1 as i64);
            report.check(name("w3.length"), Ratio::from_integer(words[2].length() as i64) <= bound, format!("||w3|| = {} ≤ C·N(g1) = {bound}", words[2].length()));
        }
        route => report.push(
            name("w3.length"),
            Outcome::Skip,
            format!("||w3|| = {}; bound needs strict constants and a geodesic (route {})", words[2].length(), route.map_or("unknown", |r| r.name())),
        ),
    }
    report.check(name("w3.leaf_growth"), n3 >= (m - 1) * n1, format!("N(g3) = {n3} ≥ (M-1)·N(g1) = {}", (m - 1) * n1));
    let ell = g3.edge_depths().0;
    let zeros = BinaryWord::repeat(0, ell);
    let has_branch = g3.pairs().binary_search(&(zeros.clone(), zeros.clone())).is_ok();
    report.check(name("w3.fixed_branch"), ell as u64 <= n1 && has_branch, format!("ℓ0(g3) = {ell} ≤ N(g1) = {n1} with branch 0^{ell} → 0^{ell}"));
    report.check(name("w3.fixes_interval"), g3.fixes_interval_pointwise(&zeros), format!("g3 fixes [0^{ell}] pointwise"));

    let ql = q * lambda;
    report.check(name("w4.shape"), words[3].letters() == endpoint_word(ql).letters(), format!("w4 = x0^{ql} x1^-1 x0^{}", 1 - ql as i64));
    report.check(name("w4.q_inequality"), (ell as i64) < ql as i64 - 2, format!("ℓ0(g3) = {ell} < Qλ - 2 = {}", ql as i64 - 2));
    // 2N(g3·w') ≥ 2N(g3) + ||w'|| - 4N(g1)
    prefix_check(report, name("w4.prefixes"), &g3, words[3], "N(g3·w') ≥ N(g3) + ||w'||/2 - 2N(g1)", |kk, x| 2 * x + 4 * n1 >= 2 * n3 + kk);
    report.check(name("w4.commutes"), g3.multiply(&e[3]) == e[3].multiply(&g3), "g3 · w4 = w4 · g3");
    let support = BinaryWord::repeat(0, (ql as usize).saturating_sub(1));
    report.check(name("w4.support"), e[3].supported_in(&support), format!("w4 is supported in [0^{}]", ql.saturating_sub(1)));
    report.check(name("w4.leaf_growth"), g4.num_leaves() as u64 >= ql, format!("N(g4) = {} ≥ Qλ = {ql}", g4.num_leaves()));

    report.check(name("w5.inverse"), e[4] == g3.invert(), format!("eval(w5) = g3⁻¹ (route {})", segs[4].route.map_or("unknown", |r| r.name())));
    report.check(name("w5.endpoint"), g5 == e[3], "g5 = eval(w4)");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::x0_power;
    use crate::witness::{witness, WitnessOptions};

    fn scaled() -> WitnessConstants {
        WitnessConstants::scaled(Ratio::new(1, 4), Ratio::from_integer(3), 4, 8).unwrap()
    }

    fn sample() -> PathCertificate {
        let g = x0_power(2).multiply(&x_n(1));
        witness(&g, &scaled(), Alphabet::A, &WitnessOptions::default()).unwrap()
    }

    #[test]
    fn labels_roundtrip() {
        for l in [SegmentLabel::W(1), SegmentLabel::W(5), SegmentLabel::P, SegmentLabel::WInv(3)] {
            assert_eq!(SegmentLabel::from_name(&l.name()), Some(l));
        }
        for bad in ["w0", "w6", "w11", "q", "winv", "w"] {
            assert_eq!(SegmentLabel::from_name(bad), None, "{bad}");
        }
    }

    #[test]
    fn stride_rule() {
        assert_eq!(stride_for(10_000, 10_000), 1);
        assert_eq!(stride_for(10_001, 10_000), 2);
        assert_eq!(stride_for(1_280_000, 10_000), 128);
    }

    #[test]
    fn every_mode_passes_on_a_genuine_certificate() {
        let cert = sample();
        assert_eq!(cert.evidence.first().unwrap().prefix, 0);
        assert_eq!(cert.evidence.last().unwrap().prefix, cert.length());
        for mode in [VerifyMode::Exact, VerifyMode::LeafBound, VerifyMode::Lemmas] {
            let report = verify(&cert, mode, 8);
            assert!(report.passed(), "{report}");
        }
        let report = verify(&cert, VerifyMode::Lemmas, 8);
        assert_eq!(report.get("length").unwrap().outcome, Outcome::Skip);
        assert_eq!(report.get("w4.commutes").unwrap().outcome, Outcome::Pass);
    }

    #[test]
    fn lemmas_pass_over_wider_alphabets() {
        let c1 = crate::generators::standard_generator(crate::generators::Generator::C1);
        let g = x_n(1).multiply(&c1);
        for alphabet in [Alphabet::B, Alphabet::C] {
            let cert = witness(&g, &scaled(), alphabet, &WitnessOptions { bfs_cap: 6, ..WitnessOptions::default() }).unwrap();
            let report = verify(&cert, VerifyMode::Lemmas, 6);
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn tampered_target_fails() {
        let mut cert = sample();
        cert.target = cert.target.multiply(&x0_power(1));
        let report = verify(&cert, VerifyMode::Lemmas, 8);
        assert_eq!(report.get("endpoint").unwrap().outcome, Outcome::Fail);
        assert_eq!(report.get("target_form").unwrap().outcome, Outcome::Fail);
    }

    #[test]
    fn tampered_evidence_fails() {
        let mut cert = sample();
        cert.evidence[1].leaves += 1;
        assert_eq!(verify(&cert, VerifyMode::LeafBound, 8).get("evidence").unwrap().outcome, Outcome::Fail);
    }
}
