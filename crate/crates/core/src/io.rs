//! Text formats.
//!
//! * Element: one branch pair `u -> v` per line, sorted by `u`, the empty
//!   word written `-`. Inline form (ball files): `u->v` pairs separated by
//!   spaces.
//! * Word: whitespace-separated `x0`, `x1`, `c1`, `pi0` with optional `^k`;
//!   the empty word is `1`.
//! * Ball: `alphabet`, `radius`, `count` header lines, then one
//!   `<inline element> <distance>` line per member, sorted by distance and
//!   then by text.
//! * Profile: CSV `n,div,exact_or_sampled`.
//! * Constants: `c=1/4,C=3,M=4,Q=8`, any subset.
//! * Certificate: see [`serialize_certificate`].
//!
//! Blank lines and lines starting with `#` are ignored everywhere except
//! inside certificate word lines.

use std::fmt::Write as _;

use num_rational::Ratio;

use crate::certificate::{Evidence, Lambda, LambdaSource, PathCertificate, Segment, SegmentLabel};
use crate::element::{DiagramError, Element, TreeDiagram};
use crate::generators::{Alphabet, Generator, GroupWord, Letter};
use crate::oracle::{BallFormatError, BallIndex, DivergenceRow, ProfileTag};
use crate::synth::SynthesisRoute;
use crate::witness::{endpoint_element, endpoint_word, WitnessConstants};
use crate::word::BinaryWord;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Format { line: usize, column: usize, message: String },
    #[error("branches do not form a complete prefix code: {0}")]
    PrefixViolation(DiagramError),
    #[error("leaf map is not a bijection: {0} appears twice")]
    NotABijection(BinaryWord),
    #[error("ball file: {0}")]
    Ball(#[from] BallFormatError),
}

fn format_error(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Format { line, column, message: message.into() }
}

impl From<DiagramError> for ParseError {
    fn from(e: DiagramError) -> Self {
        match e {
            DiagramError::NotABijection(w) => ParseError::NotABijection(w),
            other => ParseError::PrefixViolation(other),
        }
    }
}

/// Non-blank, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn column_of(line: &str, token: &str) -> usize {
    // tokens are subslices of `line`
    token.as_ptr() as usize - line.as_ptr() as usize + 1
}

fn parse_binary(raw: &str, token: &str, line: usize) -> Result<BinaryWord, ParseError> {
    token.parse().map_err(|_| format_error(line, column_of(raw, token), format!("expected a binary word or `-`, found {token:?}")))
}

fn parse_pair(raw: &str, line: usize) -> Result<(BinaryWord, BinaryWord), ParseError> {
    let Some(arrow) = raw.find("->") else {
        return Err(format_error(line, 1, "expected `<u> -> <v>`"));
    };
    let (u, v) = (raw[..arrow].trim(), raw[arrow + 2..].trim());
    if u.is_empty() {
        return Err(format_error(line, 1, "missing domain branch"));
    }
    if v.is_empty() {
        return Err(format_error(line, arrow + 3, "missing range branch"));
    }
    Ok((parse_binary(raw, u, line)?, parse_binary(raw, v, line)?))
}

/// A possibly unreduced diagram in the element format.
pub fn parse_diagram(text: &str) -> Result<TreeDiagram, ParseError> {
    let mut pairs = Vec::new();
    for (line, raw) in content_lines(text) {
        pairs.push(parse_pair(raw, line)?);
    }
    if pairs.is_empty() {
        return Err(format_error(1, 1, "no branch pairs"));
    }
    Ok(TreeDiagram::new(pairs)?)
}

/// The reduced element, and whether the input was already reduced.
pub fn parse_element(text: &str) -> Result<(Element, bool), ParseError> {
    let d = parse_diagram(text)?;
    let reduced = d.is_reduced();
    Ok((d.reduce(), reduced))
}

pub fn serialize_element(a: &Element) -> String {
    let mut out = String::new();
    for (u, v) in a.pairs() {
        writeln!(out, "{u} -> {v}").unwrap();
    }
    out
}

/// Single-line form: `u->v` pairs separated by spaces.
pub fn serialize_inline(a: &Element) -> String {
    a.pairs().iter().map(|(u, v)| format!("{u}->{v}")).collect::<Vec<_>>().join(" ")
}

fn parse_inline_tokens<'a>(raw: &str, tokens: impl Iterator<Item = &'a str>, line: usize) -> Result<Element, ParseError> {
    let mut pairs = Vec::new();
    for tok in tokens {
        let Some((u, v)) = tok.split_once("->") else {
            return Err(format_error(line, column_of(raw, tok), format!("expected `u->v`, found {tok:?}")));
        };
        pairs.push((parse_binary(raw, u, line)?, parse_binary(raw, v, line)?));
    }
    if pairs.is_empty() {
        return Err(format_error(line, 1, "no branch pairs"));
    }
    Ok(TreeDiagram::new(pairs)?.reduce())
}

pub fn parse_inline(text: &str) -> Result<Element, ParseError> {
    parse_inline_tokens(text, text.split_whitespace(), 1)
}

/// Largest absolute exponent accepted in a word.
pub const MAX_EXPONENT: u64 = 1 << 40;

fn parse_word_line(raw: &str, line: usize, alphabet: Option<Alphabet>) -> Result<GroupWord, ParseError> {
    let tokens: Vec<&str> = raw.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(format_error(line, 1, "empty word; write `1`"));
    }
    if tokens == ["1"] {
        return Ok(GroupWord::empty(alphabet.unwrap_or(Alphabet::A)));
    }
    let mut letters = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let col = column_of(raw, tok);
        let (name, exp) = match tok.split_once('^') {
            Some((n, e)) => {
                let e: i64 = e.parse().map_err(|_| format_error(line, col + n.len() + 1, format!("bad exponent {e:?}")))?;
                (n, e)
            }
            None => (tok, 1),
        };
        let base = Generator::from_name(name).ok_or_else(|| format_error(line, col, format!("unknown generator {name:?}")))?;
        if exp == 0 {
            return Err(format_error(line, col, "zero exponent"));
        }
        if exp.unsigned_abs() > MAX_EXPONENT {
            return Err(format_error(line, col, format!("exponent exceeds {MAX_EXPONENT} in absolute value")));
        }
        letters.push(Letter::new(base, exp));
    }
    let alphabet = match alphabet {
        Some(a) => a,
        None => Alphabet::covering(letters.iter().map(|l| l.base)),
    };
    GroupWord::new(alphabet, letters).map_err(|e| format_error(line, 1, e.to_string()))
}

/// Parses a word, keeping letters verbatim. With `alphabet = None` the
/// smallest alphabet containing every letter is used.
pub fn parse_word(text: &str, alphabet: Option<Alphabet>) -> Result<GroupWord, ParseError> {
    let joined: Vec<(usize, &str)> = content_lines(text).collect();
    match joined.as_slice() {
        [] => Err(format_error(1, 1, "empty word; write `1`")),
        [(line, raw)] => parse_word_line(raw, *line, alphabet),
        [(line, _), ..] => {
            // multi-line words are joined
            let all: String = joined.iter().map(|(_, l)| *l).collect::<Vec<_>>().join(" ");
            parse_word_line(&all, *line, alphabet)
        }
    }
}

pub fn serialize_word(w: &GroupWord) -> String {
    w.to_string()
}

pub fn serialize_ball(ball: &BallIndex) -> String {
    let mut lines: Vec<(u32, String)> = ball.iter().map(|(g, d)| (d, serialize_inline(&g))).collect();
    lines.sort();
    let mut out = format!("alphabet {}\nradius {}\ncount {}\n", ball.alphabet(), ball.radius(), lines.len());
    for (d, s) in lines {
        writeln!(out, "{s} {d}").unwrap();
    }
    out
}

fn header_value<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, key: &str) -> Result<(usize, &'a str), ParseError> {
    let (line, raw) = lines.next().ok_or_else(|| format_error(0, 1, format!("missing `{key}` line")))?;
    match raw.split_once(char::is_whitespace) {
        Some((k, v)) if k == key => Ok((line, v.trim())),
        _ => Err(format_error(line, 1, format!("expected `{key} <value>`"))),
    }
}

fn parse_number<T: std::str::FromStr>(s: &str, line: usize, column: usize) -> Result<T, ParseError> {
    s.parse().map_err(|_| format_error(line, column, format!("expected a number, found {s:?}")))
}

pub fn parse_ball(text: &str) -> Result<BallIndex, ParseError> {
    let mut lines = content_lines(text);
    let (line, a) = header_value(&mut lines, "alphabet")?;
    let alphabet = Alphabet::from_name(a).ok_or_else(|| format_error(line, 10, format!("unknown alphabet {a:?}")))?;
    let (line, r) = header_value(&mut lines, "radius")?;
    let radius: u32 = parse_number(r, line, 8)?;
    let (line, c) = header_value(&mut lines, "count")?;
    let count: usize = parse_number(c, line, 7)?;
    let mut entries = Vec::with_capacity(count);
    for (line, raw) in lines {
        let mut tokens: Vec<&str> = raw.split_whitespace().collect();
        let d = tokens.pop().expect("content lines are non-empty");
        let dist: u32 = parse_number(d, line, column_of(raw, d))?;
        entries.push((parse_inline_tokens(raw, tokens.into_iter(), line)?, dist));
    }
    if entries.len() != count {
        return Err(format_error(0, 1, format!("count says {count} but {} entries follow", entries.len())));
    }
    Ok(BallIndex::from_distances(alphabet, radius, entries)?)
}

pub fn serialize_profile(rows: &[DivergenceRow]) -> String {
    let mut out = String::from("n,div,exact_or_sampled\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.n, r.div, r.tag.name()).unwrap();
    }
    out
}

/// `(n, div, tag)` rows of a profile CSV.
pub fn parse_profile(text: &str) -> Result<Vec<(u32, u32, ProfileTag)>, ParseError> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "n,div,exact_or_sampled")) => {}
        Some((line, _)) => return Err(format_error(line, 1, "expected header `n,div,exact_or_sampled`")),
        None => return Err(format_error(1, 1, "empty profile")),
    }
    lines
        .map(|(line, raw)| {
            let fields: Vec<&str> = raw.split(',').collect();
            let [n, d, t] = fields[..] else {
                return Err(format_error(line, 1, "expected three fields"));
            };
            let tag = ProfileTag::from_name(t).ok_or_else(|| format_error(line, column_of(raw, t), format!("unknown tag {t:?}")))?;
            Ok((parse_number(n, line, 1)?, parse_number(d, line, column_of(raw, d))?, tag))
        })
        .collect()
}

/// Any subset of `c`, `C`, `M`, `Q`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConstantsOverrides {
    pub c: Option<Ratio<i64>>,
    pub big_c: Option<Ratio<i64>>,
    pub m: Option<u64>,
    pub q: Option<u64>,
}

fn parse_ratio(s: &str, line: usize, column: usize) -> Result<Ratio<i64>, ParseError> {
    let r = match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (i64, i64) = (parse_number(n, line, column)?, parse_number(d, line, column)?);
            if d == 0 {
                return Err(format_error(line, column, "zero denominator"));
            }
            Ratio::new(n, d)
        }
        None => Ratio::from_integer(parse_number(s, line, column)?),
    };
    Ok(r)
}

/// `c=1/4,C=3,M=4,Q=8`; keys are case-sensitive.
pub fn parse_constants(text: &str) -> Result<ConstantsOverrides, ParseError> {
    let raw = text.trim();
    let mut out = ConstantsOverrides::default();
    for field in raw.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        let col = column_of(raw, field);
        let Some((k, v)) = field.split_once('=') else {
            return Err(format_error(1, col, format!("expected key=value, found {field:?}")));
        };
        let vcol = col + k.len() + 1;
        match k.trim() {
            "c" => out.c = Some(parse_ratio(v.trim(), 1, vcol)?),
            "C" => out.big_c = Some(parse_ratio(v.trim(), 1, vcol)?),
            "M" => out.m = Some(parse_number(v.trim(), 1, vcol)?),
            "Q" => out.q = Some(parse_number(v.trim(), 1, vcol)?),
            other => return Err(format_error(1, col, format!("unknown constant {other:?}"))),
        }
    }
    Ok(out)
}

pub fn serialize_constants(k: &WitnessConstants) -> String {
    format!("c={},C={},M={},Q={},delta={},D={}", k.c, k.big_c, k.m, k.q, k.delta, k.d)
}

/// Largest `k` accepted in a `target word` line.
pub const MAX_TARGET_EXPONENT: u64 = 1 << 24;

/// Above this many branch symbols a witness target is written as its word.
const TARGET_ELEMENT_LIMIT: usize = 100_000;

/// Line-oriented certificate document:
///
/// ```text
/// certificate 1
/// alphabet A
/// constants c=1/4,C=3,M=4,Q=8,delta=1/128,D=152
/// strict false
/// lambda 2 exact
/// end-lambda 3 exact        (connections only)
/// stride 1
/// base
/// <element lines>
/// end
/// segment w1 -              (label, then route or `-`)
/// <word line>
/// ...
/// target element            (or `target word` and one word line)
/// <element lines>
/// end
/// evidence <count>
/// <prefix> <N> <distance or ->
/// end
/// ```
pub fn serialize_certificate(cert: &PathCertificate) -> String {
    let mut out = String::from("certificate 1\n");
    writeln!(out, "alphabet {}", cert.alphabet).unwrap();
    writeln!(out, "constants {}", serialize_constants(&cert.constants)).unwrap();
    writeln!(out, "strict {}", cert.constants.strict).unwrap();
    writeln!(out, "lambda {} {}", cert.lambda.value, cert.lambda.source.name()).unwrap();
    if let Some(e) = cert.end_lambda {
        writeln!(out, "end-lambda {} {}", e.value, e.source.name()).unwrap();
    }
    writeln!(out, "stride {}", cert.stride).unwrap();
    out.push_str("base\n");
    out.push_str(&serialize_element(&cert.base));
    out.push_str("end\n");
    for s in &cert.segments {
        writeln!(out, "segment {} {}", s.label.name(), s.route.map_or("-", |r| r.name())).unwrap();
        writeln!(out, "{}", s.word).unwrap();
    }
    let ql = cert.constants.q.saturating_mul(cert.lambda.value);
    let as_word = cert.target.total_branch_length() > TARGET_ELEMENT_LIMIT && !cert.is_connection() && ql <= MAX_TARGET_EXPONENT;
    if as_word && cert.target == endpoint_element(ql) {
        writeln!(out, "target word\n{}", endpoint_word(ql)).unwrap();
    } else {
        out.push_str("target element\n");
        out.push_str(&serialize_element(&cert.target));
        out.push_str("end\n");
    }
    writeln!(out, "evidence {}", cert.evidence.len()).unwrap();
    for e in &cert.evidence {
        match e.distance {
            Some(d) => writeln!(out, "{} {} {d}", e.prefix, e.leaves).unwrap(),
            None => writeln!(out, "{} {} -", e.prefix, e.leaves).unwrap(),
        }
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(content_lines(text));
        Self { inner: it.peekable(), last: 0 }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        let (line, raw) = self.inner.next().ok_or_else(|| format_error(self.last + 1, 1, format!("unexpected end of input, expected {what}")))?;
        self.last = line;
        Ok((line, raw))
    }

    fn keyed(&mut self, key: &str) -> Result<(usize, &'a str), ParseError> {
        let (line, raw) = self.next(key)?;
        match raw.split_once(char::is_whitespace) {
            Some((k, v)) if k == key => Ok((line, v.trim())),
            _ if raw == key => Ok((line, "")),
            _ => Err(format_error(line, 1, format!("expected `{key}`"))),
        }
    }

    fn peek_key(&mut self) -> Option<&'a str> {
        self.inner.peek().map(|(_, raw)| raw.split_whitespace().next().unwrap_or(""))
    }

    /// Element lines up to `end`.
    fn element_block(&mut self) -> Result<Element, ParseError> {
        let mut pairs = Vec::new();
        loop {
            let (line, raw) = self.next("`end`")?;
            if raw == "end" {
                break;
            }
            pairs.push(parse_pair(raw, line)?);
        }
        if pairs.is_empty() {
            return Err(format_error(self.last, 1, "element block is empty"));
        }
        Ok(TreeDiagram::new(pairs)?.reduce())
    }
}

fn parse_lambda(v: &str, line: usize) -> Result<Lambda, ParseError> {
    let (n, src) = v.split_once(char::is_whitespace).ok_or_else(|| format_error(line, 1, "expected `<value> <exact|surrogate>`"))?;
    let source = LambdaSource::from_name(src.trim()).ok_or_else(|| format_error(line, 1, format!("unknown provenance {src:?}")))?;
    Ok(Lambda { value: parse_number(n, line, 1)?, source })
}

fn parse_full_constants(v: &str, strict: bool, line: usize) -> Result<WitnessConstants, ParseError> {
    let mut fields = std::collections::HashMap::new();
    for f in v.split(',') {
        let (k, val) = f.split_once('=').ok_or_else(|| format_error(line, 1, format!("expected key=value, found {f:?}")))?;
        fields.insert(k.trim(), val.trim());
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| format_error(line, 1, format!("missing constant {k}")));
    let k = WitnessConstants {
        c: parse_ratio(get("c")?, line, 1)?,
        big_c: parse_ratio(get("C")?, line, 1)?,
        m: parse_number(get("M")?, line, 1)?,
        q: parse_number(get("Q")?, line, 1)?,
        delta: parse_ratio(get("delta")?, line, 1)?,
        d: parse_ratio(get("D")?, line, 1)?,
        strict,
    };
    if fields.len() != 6 {
        return Err(format_error(line, 1, "unexpected constant"));
    }
    for (name, r) in [("c", k.c), ("C", k.big_c), ("delta", k.delta), ("D", k.d)] {
        if *r.numer() <= 0 {
            return Err(format_error(line, 1, format!("constant {name} must be positive")));
        }
    }
    if k.m == 0 || k.q == 0 {
        return Err(format_error(line, 1, "M and Q must be positive"));
    }
    Ok(k)
}

pub fn parse_certificate(text: &str) -> Result<PathCertificate, ParseError> {
    let mut lines = Lines::new(text);
    let (line, v) = lines.keyed("certificate")?;
    if v != "1" {
        return Err(format_error(line, 13, format!("unsupported certificate version {v:?}")));
    }
    let (line, a) = lines.keyed("alphabet")?;
    let alphabet = Alphabet::from_name(a).ok_or_else(|| format_error(line, 10, format!("unknown alphabet {a:?}")))?;
    let (cline, cv) = lines.keyed("constants")?;
    let (line, s) = lines.keyed("strict")?;
    let strict = match s {
        "true" => true,
        "false" => false,
        _ => return Err(format_error(line, 8, "expected true or false")),
    };
    let constants = parse_full_constants(cv, strict, cline)?;
    let (line, l) = lines.keyed("lambda")?;
    let lambda = parse_lambda(l, line)?;
    let end_lambda = if lines.peek_key() == Some("end-lambda") {
        let (line, l) = lines.keyed("end-lambda")?;
        Some(parse_lambda(l, line)?)
    } else {
        None
    };
    let (line, st) = lines.keyed("stride")?;
    let stride: u64 = parse_number(st, line, 8)?;
    if stride == 0 {
        return Err(format_error(line, 8, "stride must be positive"));
    }
    lines.keyed("base")?;
    let base = lines.element_block()?;
    let mut segments = Vec::new();
    while lines.peek_key() == Some("segment") {
        let (line, v) = lines.keyed("segment")?;
        let mut parts = v.split_whitespace();
        let label_text = parts.next().unwrap_or("");
        let label = SegmentLabel::from_name(label_text).ok_or_else(|| format_error(line, 9, format!("unknown segment label {label_text:?}")))?;
        let route = match parts.next() {
            Some("-") => None,
            Some(r) => Some(SynthesisRoute::from_name(r).ok_or_else(|| format_error(line, 1, format!("unknown route {r:?}")))?),
            None => return Err(format_error(line, 1, "missing route")),
        };
        if parts.next().is_some() {
            return Err(format_error(line, 1, "trailing fields"));
        }
        let (wline, raw) = lines.next("a word line")?;
        segments.push(Segment { label, word: parse_word_line(raw, wline, Some(alphabet))?, route });
    }
    let (line, kind) = lines.keyed("target")?;
    let target = match kind {
        "element" => lines.element_block()?,
        "word" => {
            let (wline, raw) = lines.next("a word line")?;
            let w = parse_word_line(raw, wline, Some(alphabet))?;
            let ql = match w.letters() {
                [first, ..] if first.base == Generator::X0 && first.exponent > 0 => first.exponent as u64,
                _ => 0,
            };
            if ql == 0 || w.letters() != endpoint_word(ql).letters() {
                return Err(format_error(wline, 1, "a target word must have the form x0^k x1^-1 x0^(1-k)"));
            }
            if ql > MAX_TARGET_EXPONENT {
                return Err(format_error(wline, 1, format!("target exponent {ql} exceeds {MAX_TARGET_EXPONENT}")));
            }
            endpoint_element(ql)
        }
        _ => return Err(format_error(line, 8, "expected `element` or `word`")),
    };
    let (line, n) = lines.keyed("evidence")?;
    let count: usize = parse_number(n, line, 10)?;
    let mut evidence = Vec::with_capacity(count.min(1 << 20));
    loop {
        let (line, raw) = lines.next("`end`")?;
        if raw == "end" {
            break;
        }
        let f: Vec<&str> = raw.split_whitespace().collect();
        let [p, n, d] = f[..] else {
            return Err(format_error(line, 1, "expected `<prefix> <N> <distance or ->`"));
        };
        let distance = if d == "-" { None } else { Some(parse_number(d, line, column_of(raw, d))?) };
        evidence.push(Evidence { prefix: parse_number(p, line, 1)?, leaves: parse_number(n, line, column_of(raw, n))?, distance });
    }
    if evidence.len() != count {
        return Err(format_error(lines.last, 1, format!("evidence count says {count} but {} records follow", evidence.len())));
    }
    if let Some((line, _)) = lines.inner.next() {
        return Err(format_error(line, 1, "trailing content after the certificate"));
    }
    Ok(PathCertificate { alphabet, base, lambda, end_lambda, segments, target, constants, stride, evidence })
}
