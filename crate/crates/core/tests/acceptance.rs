//! Acceptance run. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any fails. Pass criterion numbers to run a subset:
//! `cargo test --release --test acceptance -- 7 9`.

use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thompson_core::certificate::{trace, Outcome, TraceOptions};
use thompson_core::element::pair_set;
use thompson_core::io::serialize_inline;
use thompson_core::generators::{x0_power, x_n_word};
use thompson_core::live::Tracer;
use thompson_core::oracle::{avoidant_distance_in, divergence_profile, BallIndex, Distance, DistanceOracle, ProfileOptions, ProfileTag, DEFAULT_NODE_CAP};
use thompson_core::witness::WitnessOptions;
use thompson_core::word::bw;
use thompson_core::{
    connect, standard_generator, verify, witness, x_n, Alphabet, Class, Element, Generator, GroupWord, PathCertificate,
    VerificationReport, VerifyMode, WitnessConstants,
};

mod common;

use common::{random_diagram, random_element, random_word};

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn canonical_forms() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut removed = 0usize;
    for trial in 0..100_000 {
        let leaves = rng.gen_range(1..=12);
        let base = rng.gen_range(1..=leaves);
        let monotone = rng.gen_bool(0.3);
        let mut d = random_diagram(&mut rng, base, monotone);
        for _ in base..leaves {
            let i = rng.gen_range(0..d.num_leaves());
            d.insert_dipole(i);
        }
        let reference = d.clone().reduce();
        removed += d.num_leaves() - reference.num_leaves();
        for _ in 0..5 {
            let r = d.clone().reduce_with(|k| rng.gen_range(0..k));
            ensure(r == reference, || format!("trial {trial}: two removal orders disagree"))?;
        }
    }
    Ok(format!("10^5 diagrams x 5 orders agree; {removed} dipoles removed in total"))
}

fn group_axioms() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let id = Element::identity();
    for trial in 0..10_000 {
        let [a, b, c] = [0, 1, 2].map(|_| {
            let len = rng.gen_range(0..=12);
            random_word(&mut rng, Alphabet::C, len).eval()
        });
        ensure(a.multiply(&b).multiply(&c) == a.multiply(&b.multiply(&c)), || format!("trial {trial}: associativity"))?;
        ensure(a.multiply(&id) == a && id.multiply(&a) == a, || format!("trial {trial}: identity"))?;
        ensure(a.multiply(&a.invert()) == id && a.invert().multiply(&a) == id, || format!("trial {trial}: inverse"))?;
    }
    Ok("10^4 triples over C".into())
}

/// A violated statement: its name and whether the orbit `g·x0^{±j}` had
/// dropped below four leaves by then.
struct Violation {
    part: String,
    below_four: bool,
}

/// Leaf-count and edge-depth statements for right multiplication by `x0^sign`.
fn x0_suite(g: &Element, sign: i64) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = g.num_leaves() as i64;
    let (l0, l1) = g.edge_depths();
    let (ell, near, side) = if sign > 0 { (l0 as i64, ["1", "01"], "1") } else { (l1 as i64, ["0", "10"], "0") };
    let depth = |e: &Element| if sign > 0 { e.edge_depths().0 as i64 } else { e.edge_depths().1 as i64 };
    let cond = near.iter().any(|w| g.range_strictly_extends(&bw(w)));
    let gx = g.multiply(&x0_power(sign));
    let m = gx.num_leaves() as i64;
    let tag = if sign > 0 { "x0" } else { "x0^-1" };
    let mut fail = |part: &str, below_four: bool| out.push(Violation { part: format!("{tag} {part}"), below_four });
    if !(n - 1..=n + 1).contains(&m) {
        fail("leaf range", false);
    }
    if ell == 1 {
        if !(m == n + 1 && depth(&gx) == 1) {
            fail("part (1)", false);
        }
    } else {
        if !((m == n || m == n - 1) && depth(&gx) == ell - 1) {
            fail("part (2)", false);
        }
        if cond && !(m == n && gx.range_strictly_extends(&bw(side))) {
            fail("part (3)", false);
        }
    }
    let mut acc = g.clone();
    let mut below_four = false;
    let (mut bound_ok, mut equality_ok) = (true, true);
    for i in 0..=20i64 {
        let ni = acc.num_leaves() as i64;
        below_four |= ni < 4;
        if bound_ok && ni < n + i - 2 * (ell - 1) {
            bound_ok = false;
            fail("power bound", below_four);
        }
        if equality_ok && cond && ni != n.max(n + i - (ell - 1)) {
            equality_ok = false;
            fail("power equality", below_four);
        }
        acc = acc.multiply(&x0_power(sign));
    }
    out
}

fn x0_lemmas() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut tested = 0;
    let mut classes = [0usize; 3];
    let mut tally: std::collections::BTreeMap<String, (usize, usize)> = Default::default();
    let mut example = None;
    while tested < 10_000 {
        let g = random_element(&mut rng);
        if g.num_leaves() < 4 {
            continue;
        }
        for v in x0_suite(&g, 1).into_iter().chain(x0_suite(&g, -1)) {
            let e = tally.entry(v.part).or_default();
            e.0 += 1;
            e.1 += v.below_four as usize;
            example.get_or_insert_with(|| serialize_inline(&g));
        }
        classes[g.classify() as usize] += 1;
        tested += 1;
    }
    let summary = format!("10^4 elements (F {}, T-only {}, V-only {}), i <= 20", classes[0], classes[1], classes[2]);
    if tally.is_empty() {
        return Ok(summary);
    }
    let parts: Vec<String> = tally.iter().map(|(p, (k, low))| format!("{p}: {k} ({low} after N < 4)")).collect();
    Err(format!("{summary}; violations {}; first at {}", parts.join(", "), example.unwrap()))
}

fn interval_copies() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..10_000 {
        let g = random_element(&mut rng);
        let (u, v) = g.pairs()[rng.gen_range(0..g.num_leaves())].clone();
        let leaves = rng.gen_range(1..=10);
        let h = random_diagram(&mut rng, leaves, true).reduce();
        let product = g.multiply(&h.copy_into_interval(&v).unwrap());
        let n = g.num_leaves() + h.num_leaves() - 1;
        ensure(product.num_leaves() == n, || format!("trial {trial}: N = {} not {n}", product.num_leaves()))?;
        let mut expected: HashSet<_> = g.pairs().iter().filter(|p| p.0 != u).cloned().collect();
        expected.extend(h.pairs().iter().map(|(w, z)| (u.concat(w), v.concat(z))));
        ensure(pair_set(&product) == expected, || format!("trial {trial}: branch sets differ"))?;
    }
    Ok("10^4 triples, N(h) <= 10".into())
}

fn generator_checks() -> Verdict {
    let x0 = standard_generator(Generator::X0);
    ensure(x0.copy_into_interval(&bw("1")).unwrap() == standard_generator(Generator::X1), || "(x0)_[1] != x1".into())?;
    for j in 0..=30 {
        ensure(x_n_word(j + 1, Alphabet::A).eval() == x_n(j + 1), || format!("x_{} differs from its conjugate word", j + 1))?;
        ensure(x_n(j).copy_into_interval(&bw("1")).unwrap() == x_n(j + 1), || format!("(x_{j})_[1] != x_{}", j + 1))?;
    }
    let conj = |j: i64| {
        let mut w = GroupWord::empty(Alphabet::A);
        w.push_power(Generator::X0, -j).ok();
        w.push_power(Generator::X1, 1).ok();
        w.push_power(Generator::X0, j).ok();
        w
    };
    for j in 1..=30 {
        ensure(conj(j).eval() == x_n(j as usize + 1), || format!("x0^-{j} x1 x0^{j} != x_{}", j + 1))?;
    }
    for r in 0..=50 {
        ensure(x_n(r).num_leaves() == r + 3, || format!("N(x_{r}) = {}", x_n(r).num_leaves()))?;
    }
    let pi0 = standard_generator(Generator::Pi0);
    ensure(pi0.multiply(&pi0).is_identity(), || "pi0^2 != 1".into())?;
    ensure(standard_generator(Generator::C1).classify() == Class::TOnly, || "c1 is not T-only".into())?;
    ensure(pi0.classify() == Class::VOnly, || "pi0 is not V-only".into())?;
    Ok("x_{j+1} for j <= 30, N(x_r) for r <= 50, classes of c1 and pi0".into())
}

fn ball_a8() -> BallIndex {
    BallIndex::enumerate(Alphabet::A, 8, DEFAULT_NODE_CAP).expect("ball_A(8) fits the node cap")
}

fn oracle_consistency() -> Verdict {
    let ball = ball_a8();
    let mut estimates = Vec::new();
    for r in [6, 7] {
        estimates.push(BallIndex::enumerate(Alphabet::A, r, DEFAULT_NODE_CAP).unwrap().estimate_constants().unwrap());
    }
    estimates.push(ball.estimate_constants().unwrap());
    let (c, big_c) = (estimates[2].c_hat, estimates[2].big_c_hat);
    for (g, d) in ball.iter().skip(1) {
        let n = Ratio::from_integer(g.num_leaves() as i64);
        let d = Ratio::from_integer(d as i64);
        ensure(c * n <= d && d <= big_c * n, || format!("c_hat N <= |g| <= C_hat N fails at |g| = {d}"))?;
    }
    for w in estimates.windows(2) {
        ensure(w[1].c_hat <= w[0].c_hat && w[1].big_c_hat >= w[0].big_c_hat, || "estimates do not widen with the radius".into())?;
    }
    let oracle = DistanceOracle::new(ball);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..10_000 {
        let len = rng.gen_range(0..=16);
        let w = random_word(&mut rng, Alphabet::A, len);
        match oracle.distance(&w.eval(), len as u32) {
            Distance::Exact(d) if d as usize <= len => {}
            other => return Err(format!("trial {trial}: |eval(w)| = {other} exceeds ||w|| = {len}")),
        }
    }
    let shown: Vec<String> = estimates.iter().map(|e| format!("r={}: c_hat={} C_hat={}", e.radius, e.c_hat, e.big_c_hat)).collect();
    Ok(format!("{} non-identity members of ball_A(8); {}; 10^4 words", oracle.ball().len() - 1, shown.join(", ")))
}

const SCALED_BFS_CAP: u32 = 8;

fn scaled_constants(ball: &BallIndex) -> WitnessConstants {
    let est = ball.estimate_constants().unwrap();
    WitnessConstants::scaled(est.c_hat, est.big_c_hat, 4, 8).unwrap()
}

fn scaled_options() -> WitnessOptions {
    WitnessOptions { bfs_cap: SCALED_BFS_CAP, ..WitnessOptions::default() }
}

fn require(report: &VerificationReport, names: &[&str]) -> Result<(), String> {
    for name in names {
        match report.get(name) {
            Some(c) if c.outcome == Outcome::Pass => {}
            Some(c) => return Err(format!("{name}: {:?} {}", c.outcome, c.detail)),
            None => return Err(format!("{name}: missing from the report")),
        }
    }
    ensure(report.passed(), || format!("report failed:\n{report}"))
}

fn scaled_witnesses() -> Verdict {
    let ball = BallIndex::enumerate(Alphabet::C, 4, DEFAULT_NODE_CAP).unwrap();
    let k = scaled_constants(&ball);
    let opts = scaled_options();
    let mut count = 0;
    let mut longest = 0;
    for (g, d) in ball.iter() {
        if g.num_leaves() < 4 {
            continue;
        }
        let cert = witness(&g, &k, Alphabet::C, &opts).map_err(|e| format!("|g| = {d}, N = {}: {e}", g.num_leaves()))?;
        ensure(cert.lambda.value == d as u64, || format!("lambda {} but |g| = {d}", cert.lambda.value))?;
        let report = verify(&cert, VerifyMode::Lemmas, SCALED_BFS_CAP);
        require(&report, &["endpoint", "target_form", "w3.fixes_interval", "w4.commutes", "w1.leaf_growth", "w4.prefixes"])
            .map_err(|e| format!("|g| = {d}, N = {}: {e}", g.num_leaves()))?;
        longest = longest.max(cert.length());
        count += 1;
    }
    Ok(format!("{count} elements of ball_C(4) with N >= 4 (of {}), M=4 Q=8, longest path {longest}", ball.len()))
}

const AVOID_CAP: u32 = 24;

fn exact_avoidance() -> Verdict {
    let ball = BallIndex::enumerate(Alphabet::A, 3, DEFAULT_NODE_CAP).unwrap();
    let sphere: Vec<Element> = ball.sphere(3).map(|i| ball.element(i)).collect();
    let mut worst = 0;
    for (i, a) in sphere.iter().enumerate() {
        for b in &sphere[i + 1..] {
            let d = avoidant_distance_in(a, b, &ball, 0, AVOID_CAP).map_err(|e| e.to_string())?;
            worst = worst.max(d.ok_or_else(|| format!("pair with no avoiding path of length <= {AVOID_CAP}"))?);
        }
    }
    let ball_c = BallIndex::enumerate(Alphabet::C, 4, DEFAULT_NODE_CAP).unwrap();
    let g = ball_c.iter().find(|(g, d)| g.num_leaves() >= 4 && *d == 4).map(|(g, _)| g).ok_or("no sample element")?;
    let cert = witness(&g, &scaled_constants(&ball_c), Alphabet::C, &scaled_options()).map_err(|e| e.to_string())?;
    let oracle = DistanceOracle::build(Alphabet::C, 5, DEFAULT_NODE_CAP).unwrap();
    let mut tracer = Tracer::new(&cert.base, 512);
    let mut nearest = oracle.distance(&cert.base, 10).lower_bound();
    for s in &cert.segments {
        for step in s.word.steps() {
            tracer.push(step).map_err(|e| e.to_string())?;
            let d = oracle.distance(&tracer.element(), 10).lower_bound();
            ensure(d > 0, || format!("prefix {} returns to the identity", tracer.steps()))?;
            nearest = nearest.min(d);
        }
    }
    ensure(tracer.element() == cert.target, || "traced endpoint differs".into())?;
    Ok(format!("{} sphere_A(3) pairs, longest avoiding path {worst}; {} prefixes of a ball_C(4) certificate, closest at {nearest}", sphere.len() * (sphere.len() - 1) / 2, tracer.steps() + 1))
}

/// Five elements of ball_A(8) with 4 <= N <= 6 and |g| <= 6, spread over
/// (N, |g|).
fn strict_sample(ball: &BallIndex) -> Vec<(Element, u32)> {
    let mut seen = HashSet::new();
    let mut picked = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pool: Vec<(Element, u32)> = ball.iter().filter(|(g, d)| (4..=6).contains(&g.num_leaves()) && *d <= 6).collect();
    pool.shuffle(&mut rng);
    for (g, d) in pool {
        if picked.len() < 5 && seen.insert((g.num_leaves(), d)) {
            picked.push((g, d));
        }
    }
    picked
}

fn strict_setup() -> (WitnessConstants, Vec<(Element, u32)>) {
    let ball = ball_a8();
    let est = ball.estimate_constants().unwrap();
    let k = WitnessConstants::strict(est.c_hat, est.big_c_hat).expect("strict constants fit");
    (k, strict_sample(&ball))
}

fn strict_run() -> Verdict {
    let (k, sample) = strict_setup();
    ensure(sample.len() == 5, || "fewer than five sample elements".into())?;
    let opts = WitnessOptions::default();
    let mut lines = Vec::new();
    for (g, d) in &sample {
        let cert = witness(g, &k, Alphabet::A, &opts).map_err(|e| e.to_string())?;
        ensure(cert.lambda.value == *d as u64, || format!("lambda {} but |g| = {d}", cert.lambda.value))?;
        let leaf = verify(&cert, VerifyMode::LeafBound, 12);
        require(&leaf, &["audit", "endpoint", "target_form", "constants", "length", "leafbound"])?;
        let lemmas = verify(&cert, VerifyMode::Lemmas, 12);
        require(&lemmas, &["w4.commutes"])?;
        let audits = trace(&cert.base, &cert.segments, &TraceOptions { stride: Some(cert.stride), ..TraceOptions::default() })
            .map_err(|e| format!("audit failure: {e}"))?
            .audits;
        ensure(audits.local > 0, || "no local audits ran".into())?;
        lines.push(format!("N={} |g|={} ||w||={} audits={}+{}", g.num_leaves(), d, cert.length(), audits.local, audits.full));
    }
    Ok(format!("M={} Q={} delta={} D={}; {}", k.m, k.q, k.delta, k.d, lines.join("; ")))
}

fn connectors() -> Verdict {
    let (k, sample) = strict_setup();
    let opts = WitnessOptions::default();
    let mut pairs = 0;
    for (i, (a, _)) in sample.iter().enumerate() {
        for (b, _) in &sample[i + 1..] {
            let cert: PathCertificate = connect(a, b, &k, Alphabet::A, &opts).map_err(|e| e.to_string())?;
            let report = verify(&cert, VerifyMode::Lemmas, 12);
            require(&report, &["connector.start", "connector.prefixes", "endpoint"])?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs, every connector prefix above Q*lambda1 leaves"))
}

fn divergence() -> Verdict {
    let rows = divergence_profile(Alphabet::A, 6, 40, &ProfileOptions::default()).map_err(|e| e.to_string())?;
    let mut shown = Vec::new();
    for r in &rows {
        ensure(r.tag != ProfileTag::LowerBound, || format!("div({}) is only a lower bound", r.n))?;
        let ratio = Ratio::new(r.div as i64, r.n as i64);
        ensure(ratio <= Ratio::from_integer(20), || format!("div({})/{} = {ratio} exceeds 20", r.n, r.n))?;
        shown.push(format!("{}:{}({})", r.n, ratio, r.tag.name()));
    }
    Ok(format!("div(n)/n = {}", shown.join(" ")))
}

type Criterion = (u32, &'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "canonical forms", canonical_forms),
        (2, "group axioms", group_axioms),
        (3, "x0 multiplication lemmas", x0_lemmas),
        (4, "interval copies", interval_copies),
        (5, "generator cross-checks", generator_checks),
        (6, "oracle consistency", oracle_consistency),
        (7, "scaled witnesses on ball_C(4)", scaled_witnesses),
        (8, "exact avoidance", exact_avoidance),
        (9, "strict witnesses", strict_run),
        (10, "connectors", connectors),
        (11, "divergence profile", divergence),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {id:>2} {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id:>2} {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
