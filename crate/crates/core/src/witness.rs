//! Paths that stay far from the identity.
//!
//! [`witness`] carries an element `g` with `N(g) ≥ 4` to
//! `x0^{Qλ} x1^{-1} x0^{-Qλ+1}` along `w1 w2 w3 w4 w5`, where `λ` stands for
//! `|g|`; [`connect`] joins two such paths through the connector `p`.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul};

use crate::certificate::{trace, Lambda, LambdaSource, PathCertificate, Segment, SegmentLabel, TraceOptions};
use crate::element::{Class, Element};
use crate::generators::{letter_element, x0_power, x_n, x_n_word, Alphabet, Generator, GroupWord, Letter};
use crate::live::AuditError;
use crate::oracle;
use crate::synth::{synthesize_word, SynthesisError, SynthesisRoute, Synthesized};
use crate::word::{bw, BinaryWord};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error("element has {0} leaves; at least 4 are required")]
    TooSmall(usize),
    #[error("Q·λ - 2 = {bound} does not exceed ℓ0(g3) = {ell}")]
    ConstantsTooSmall { ell: usize, bound: i64 },
    #[error("element of class {class:?} is not generated by alphabet {alphabet}")]
    NotInGroup { class: Class, alphabet: Alphabet },
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error("live evaluation failed its audit: {0}")]
    Audit(#[from] AuditError),
    #[error("traced endpoint differs from the expected element")]
    Endpoint,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstantsError {
    #[error("constant {0} must be positive")]
    NotPositive(&'static str),
    #[error("arithmetic overflow while deriving constants")]
    Overflow,
}

/// `c, C, M, Q, δ, D`. Strict constants satisfy `M ≥ 100C/c`,
/// `Q ≥ 10M/c²`, `δ = c/(8M)` and `D = 8M/c + 3Q`; scaled ones only need to
/// be positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessConstants {
    pub c: Ratio<i64>,
    pub big_c: Ratio<i64>,
    pub m: u64,
    pub q: u64,
    pub delta: Ratio<i64>,
    pub d: Ratio<i64>,
    pub strict: bool,
}

fn positive(name: &'static str, r: Ratio<i64>) -> Result<(), ConstantsError> {
    if *r.numer() > 0 {
        Ok(())
    } else {
        Err(ConstantsError::NotPositive(name))
    }
}

fn checked(f: impl FnOnce() -> Option<Ratio<i64>>) -> Result<Ratio<i64>, ConstantsError> {
    f().ok_or(ConstantsError::Overflow)
}

fn ratio_ops(c: Ratio<i64>, m: u64, q: u64) -> Result<(Ratio<i64>, Ratio<i64>), ConstantsError> {
    let mi = i64::try_from(m).map_err(|_| ConstantsError::Overflow)?;
    let qi = i64::try_from(q).map_err(|_| ConstantsError::Overflow)?;
    let delta = checked(|| c.checked_div(&Ratio::from_integer(mi.checked_mul(8)?)))?;
    let d = checked(|| Ratio::from_integer(mi.checked_mul(8)?).checked_div(&c)?.checked_add(&Ratio::from_integer(qi.checked_mul(3)?)))?;
    Ok((delta, d))
}

impl WitnessConstants {
    /// The smallest integers `M = ⌈100C/c⌉`, `Q = ⌈10M/c²⌉` and the derived
    /// `δ`, `D`.
    pub fn strict(c: Ratio<i64>, big_c: Ratio<i64>) -> Result<Self, ConstantsError> {
        positive("c", c)?;
        positive("C", big_c)?;
        let m = checked(|| Ratio::from_integer(100).checked_mul(&big_c)?.checked_div(&c))?.ceil().to_integer();
        let q = checked(|| Ratio::from_integer(m.checked_mul(10)?).checked_div(&c.checked_mul(&c)?))?.ceil().to_integer();
        let (m, q) = (m as u64, q as u64);
        let (delta, d) = ratio_ops(c, m, q)?;
        Ok(Self { c, big_c, m, q, delta, d, strict: true })
    }

    /// Arbitrary positive `M`, `Q`; `δ` and `D` follow the strict formulas.
    pub fn scaled(c: Ratio<i64>, big_c: Ratio<i64>, m: u64, q: u64) -> Result<Self, ConstantsError> {
        positive("c", c)?;
        positive("C", big_c)?;
        if m == 0 {
            return Err(ConstantsError::NotPositive("M"));
        }
        if q == 0 {
            return Err(ConstantsError::NotPositive("Q"));
        }
        let (delta, d) = ratio_ops(c, m, q)?;
        Ok(Self { c, big_c, m, q, delta, d, strict: false })
    }

    /// Do the fields satisfy the strict inequalities and formulas?
    pub fn satisfies_strict(&self) -> bool {
        let (m, q) = (Ratio::from_integer(self.m as i64), Ratio::from_integer(self.q as i64));
        ratio_ops(self.c, self.m, self.q).is_ok_and(|(delta, d)| {
            m * self.c >= Ratio::from_integer(100) * self.big_c
                && q * self.c * self.c >= Ratio::from_integer(10) * m
                && delta == self.delta
                && d == self.d
        })
    }
}

fn guard(g: &Element) -> Result<(), WitnessError> {
    if g.num_leaves() < 4 {
        return Err(WitnessError::TooSmall(g.num_leaves()));
    }
    Ok(())
}

fn word(alphabet: Alphabet, letters: &[(Generator, i64)]) -> GroupWord {
    let letters = letters.iter().filter(|l| l.1 != 0).map(|&(b, e)| Letter::new(b, e)).collect();
    GroupWord::new(alphabet, letters).expect("letters of A lie in every alphabet")
}

/// `x0^2 x1^-1 x0^-1`, the copy of `x0` in `[0]`.
pub fn w1_word() -> GroupWord {
    word(Alphabet::A, &[(Generator::X0, 2), (Generator::X1, -1), (Generator::X0, -1)])
}

/// `w1`: empty unless `0` is a range branch of `g`.
pub fn step_w1(g: &Element) -> Result<(GroupWord, Element), WitnessError> {
    guard(g)?;
    if !g.range_has_branch(&bw("0")) {
        return Ok((GroupWord::empty(Alphabet::A), g.clone()));
    }
    let w1 = w1_word();
    let g1 = g.multiply(&x0_power(1).copy_into_interval(&bw("0")).expect("x0 lies in F"));
    Ok((w1, g1))
}

/// `m = 1 + M·N(g1)`; `w2 = x0^{-(m-1)} x1 x0^{m-1}`, which is `x_m`.
pub fn step_w2(g1: &Element, constants: &WitnessConstants) -> (GroupWord, Element) {
    let m = 1 + constants.m as usize * g1.num_leaves();
    (x_n_word(m, Alphabet::A), g1.multiply(&x_n(m)))
}

/// `h = (T-, σ', T+)`, where `σ'` is the cyclic rotation undoing where
/// `g1` sends its first domain leaf.
pub fn closing_element(g1: &Element) -> Element {
    let domain: Vec<BinaryWord> = g1.pairs().iter().map(|p| p.0.clone()).collect();
    let range = g1.range_tree().into_branches();
    let n = domain.len();
    let k = g1.permutation()[0];
    let pairs = range.into_iter().enumerate().map(|(i, v)| (v, domain[(i + n - k) % n].clone())).collect();
    Element::from_pairs(pairs).expect("rotated diagram is valid").0
}

/// The alphabet for `w3`: `h` lies in T, so B suffices (A inside F).
pub fn closing_alphabet(alphabet: Alphabet) -> Alphabet {
    if alphabet == Alphabet::A {
        Alphabet::A
    } else {
        Alphabet::B
    }
}

/// `w3` writes `closing_element(g1)`; `g3 = g2 · w3`.
pub fn step_w3(g1: &Element, g2: &Element, alphabet: Alphabet, bfs_cap: u32) -> Result<(Synthesized, Element), WitnessError> {
    let h = closing_element(g1);
    let w3 = synthesize_word(&h, closing_alphabet(alphabet), bfs_cap)?;
    Ok((w3, g2.multiply(&h)))
}

/// `x0^{Qλ} x1^{-1} x0^{-Qλ+1}` as an element.
pub fn endpoint_element(q_lambda: u64) -> Element {
    let k = q_lambda as i64;
    x0_power(k).multiply(&letter_element(Generator::X1, -1)).multiply(&x0_power(1 - k))
}

/// The word `x0^{Qλ} x1^{-1} x0^{-Qλ+1}`.
pub fn endpoint_word(q_lambda: u64) -> GroupWord {
    let k = q_lambda as i64;
    word(Alphabet::A, &[(Generator::X0, k), (Generator::X1, -1), (Generator::X0, 1 - k)])
}

/// `w4 = x0^{Qλ} x1^{-1} x0^{-Qλ+1}`; requires `Qλ - 2 > ℓ0(g3)`.
pub fn step_w4(g3: &Element, lambda: u64, constants: &WitnessConstants) -> Result<(GroupWord, Element), WitnessError> {
    let ql = constants.q.saturating_mul(lambda);
    let ell = g3.edge_depths().0;
    let bound = ql as i64 - 2;
    if bound <= ell as i64 {
        return Err(WitnessError::ConstantsTooSmall { ell, bound });
    }
    Ok((endpoint_word(ql), g3.multiply(&endpoint_element(ql))))
}

/// `w5` writes `g3⁻¹`: a geodesic when one is found within `bfs_cap` and is
/// no longer than `retrace`, else `retrace` (a known word for `g3⁻¹`), else
/// the constructive fallback.
pub fn step_w5(
    g3: &Element,
    g4: &Element,
    alphabet: Alphabet,
    bfs_cap: u32,
    retrace: Option<&GroupWord>,
) -> Result<(Synthesized, Element), WitnessError> {
    let target = g3.invert();
    let cap = retrace.map_or(bfs_cap, |r| bfs_cap.min(r.length().saturating_sub(1).min(u32::MAX as u64) as u32));
    let w5 = match (oracle::geodesic(&target, alphabet, cap), retrace) {
        (Some(word), _) => Synthesized { word, route: SynthesisRoute::Geodesic },
        (None, Some(r)) => {
            if r.eval() != target {
                return Err(SynthesisError::Failure.into());
            }
            Synthesized { word: r.clone(), route: SynthesisRoute::Retrace }
        }
        (None, None) => synthesize_word(&target, alphabet, bfs_cap)?,
    };
    Ok((w5, g4.multiply(&target)))
}

/// `λ`: the exact length when within `bfs_cap`, else `⌈C·N(g)⌉`; with a
/// word for `g` (a geodesic in the exact case).
pub fn lambda_for(g: &Element, constants: &WitnessConstants, alphabet: Alphabet, bfs_cap: u32) -> Result<(Lambda, GroupWord), WitnessError> {
    if let Some(w) = oracle::geodesic(g, alphabet, bfs_cap) {
        return Ok((Lambda { value: w.length(), source: LambdaSource::Exact }, w));
    }
    let value = (constants.big_c * Ratio::from_integer(g.num_leaves() as i64)).ceil().to_integer() as u64;
    let w = crate::synth::fallback_word(g, alphabet)?;
    Ok((Lambda { value, source: LambdaSource::Surrogate }, w))
}

/// Evidence and audit settings for certificate construction.
#[derive(Debug, Clone, Copy)]
pub struct WitnessOptions {
    pub bfs_cap: u32,
    pub trace: TraceOptions,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        Self { bfs_cap: 12, trace: TraceOptions::default() }
    }
}

/// All intermediate elements of one run.
#[derive(Debug, Clone)]
pub struct WitnessRun {
    pub lambda: Lambda,
    pub segments: [Segment; 5],
    /// `g, g1, …, g5`.
    pub elements: [Element; 6],
}

/// Runs `w1 … w5` without building evidence.
pub fn run_steps(g: &Element, constants: &WitnessConstants, alphabet: Alphabet, bfs_cap: u32) -> Result<WitnessRun, WitnessError> {
    guard(g)?;
    let class = g.classify();
    if !alphabet.generates(class) {
        return Err(WitnessError::NotInGroup { class, alphabet });
    }
    let (lambda, g_word) = lambda_for(g, constants, alphabet, bfs_cap)?;
    let (w1, g1) = step_w1(g)?;
    let (w2, g2) = step_w2(&g1, constants);
    let (w3, g3) = step_w3(&g1, &g2, alphabet, bfs_cap)?;
    let (w4, g4) = step_w4(&g3, lambda.value, constants)?;
    // g3 = g·w1·w2·w3, so g3⁻¹ = (w1 w2 w3)⁻¹ g⁻¹
    let widen = |w: GroupWord| GroupWord::new(alphabet, w.letters().to_vec()).expect("alphabet covers every part");
    let retrace = widen(g_word.concat(&w1).concat(&w2).concat(&w3.word).inverse());
    let (w5, g5) = step_w5(&g3, &g4, alphabet, bfs_cap, Some(&retrace))?;
    let segments = [
        Segment { label: SegmentLabel::W(1), word: widen(w1), route: None },
        Segment { label: SegmentLabel::W(2), word: widen(w2), route: None },
        Segment { label: SegmentLabel::W(3), word: widen(w3.word), route: Some(w3.route) },
        Segment { label: SegmentLabel::W(4), word: widen(w4), route: None },
        Segment { label: SegmentLabel::W(5), word: widen(w5.word), route: Some(w5.route) },
    ];
    Ok(WitnessRun { lambda, segments, elements: [g.clone(), g1, g2, g3, g4, g5] })
}

/// The certificate for the path from `g` to `x0^{Qλ} x1^{-1} x0^{-Qλ+1}`.
pub fn witness(g: &Element, constants: &WitnessConstants, alphabet: Alphabet, opts: &WitnessOptions) -> Result<PathCertificate, WitnessError> {
    let run = run_steps(g, constants, alphabet, opts.bfs_cap)?;
    let target = run.elements[5].clone();
    let segments = run.segments.to_vec();
    let t = trace(g, &segments, &opts.trace)?;
    if t.final_element != target {
        return Err(WitnessError::Endpoint);
    }
    Ok(PathCertificate {
        alphabet,
        base: g.clone(),
        lambda: run.lambda,
        end_lambda: None,
        segments,
        target,
        constants: *constants,
        stride: t.stride,
        evidence: t.evidence,
    })
}

/// The connector from `x0^{Qλa} x1^{-1} x0^{-Qλa+1}` to the same element
/// for `λb`: `p` itself when `λa ≤ λb`, otherwise the inverse of the
/// connector in the other direction.
pub fn connector(lambda_a: u64, lambda_b: u64, q: u64, alphabet: Alphabet) -> GroupWord {
    let (lo, hi) = (lambda_a.min(lambda_b) as i64, lambda_a.max(lambda_b) as i64);
    let q = q as i64;
    let p = word(alphabet, &[(Generator::X0, q * lo - 1), (Generator::X1, 1), (Generator::X0, q * (hi - lo)), (Generator::X1, -1), (Generator::X0, 1 - q * hi)]);
    if lambda_a <= lambda_b {
        p
    } else {
        p.inverse()
    }
}

/// Joins two witness certificates with the same constants and alphabet
/// into a path from the first base to the second.
pub fn join(first: &PathCertificate, second: &PathCertificate, trace_opts: &TraceOptions) -> Result<PathCertificate, WitnessError> {
    let (la, lb) = (first.lambda.value, second.lambda.value);
    let mut segments = first.segments.clone();
    segments.push(Segment { label: SegmentLabel::P, word: connector(la, lb, first.constants.q, first.alphabet), route: None });
    for s in second.segments.iter().rev() {
        let label = match s.label {
            SegmentLabel::W(i) => SegmentLabel::WInv(i),
            other => other,
        };
        segments.push(Segment { label, word: s.word.inverse(), route: s.route });
    }
    let t = trace(&first.base, &segments, trace_opts)?;
    if t.final_element != second.base {
        return Err(WitnessError::Endpoint);
    }
    Ok(PathCertificate {
        alphabet: first.alphabet.max(second.alphabet),
        base: first.base.clone(),
        lambda: first.lambda,
        end_lambda: Some(second.lambda),
        segments,
        target: second.base.clone(),
        constants: first.constants,
        stride: t.stride,
        evidence: t.evidence,
    })
}

/// A path from `g1` to `g2` through both witnesses and the connector.
pub fn connect(g1: &Element, g2: &Element, constants: &WitnessConstants, alphabet: Alphabet, opts: &WitnessOptions) -> Result<PathCertificate, WitnessError> {
    let a = witness(g1, constants, alphabet, opts)?;
    let b = witness(g2, constants, alphabet, opts)?;
    join(&a, &b, &opts.trace)
}
