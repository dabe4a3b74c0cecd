//! Finite binary words, stored run-length encoded.
//!
//! Branches of the diagrams met along long witness paths look like
//! `1^k 0` or `0^k 1` with `k` in the hundreds of thousands, so words are
//! kept as maximal runs of equal symbols rather than one byte per symbol.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

/// A finite word over `{0, 1}`. The empty word is a valid value and names
/// the root of a tree (the whole interval `[0, 1)`).
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BinaryWord {
    // Symbol of the first run; 0 when the word is empty.
    first: u8,
    // Maximal runs, alternating symbols starting at `first`. No zero entries.
    runs: SmallVec<[u32; 4]>,
    len: usize,
}

impl BinaryWord {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `bit` repeated `n` times.
    pub fn repeat(bit: u8, n: usize) -> Self {
        let mut w = Self::empty();
        w.push_run(bit, n);
        w
    }

    pub fn from_bits<I: IntoIterator<Item = u8>>(bits: I) -> Self {
        let mut w = Self::empty();
        for b in bits {
            w.push(b);
        }
        w
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of maximal runs; a rough measure of storage size.
    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    fn run_bit(&self, i: usize) -> u8 {
        self.first ^ (i as u8 & 1)
    }

    /// Iterates over `(symbol, run length)` pairs.
    pub fn runs(&self) -> impl Iterator<Item = (u8, usize)> + '_ {
        self.runs
            .iter()
            .enumerate()
            .map(move |(i, &r)| (self.run_bit(i), r as usize))
    }

    pub fn bits(&self) -> impl Iterator<Item = u8> + '_ {
        self.runs().flat_map(|(b, n)| std::iter::repeat_n(b, n))
    }

    pub fn first_bit(&self) -> Option<u8> {
        (!self.is_empty()).then_some(self.first)
    }

    pub fn last_bit(&self) -> Option<u8> {
        (!self.is_empty()).then(|| self.run_bit(self.runs.len() - 1))
    }

    /// Symbol at position `i`, if any.
    pub fn bit(&self, mut i: usize) -> Option<u8> {
        for (b, n) in self.runs() {
            if i < n {
                return Some(b);
            }
            i -= n;
        }
        None
    }

    pub fn push(&mut self, bit: u8) {
        self.push_run(bit, 1);
    }

    pub fn push_run(&mut self, bit: u8, n: usize) {
        debug_assert!(bit <= 1);
        if n == 0 {
            return;
        }
        let n32 = u32::try_from(n).expect("run longer than u32::MAX");
        match self.last_bit() {
            None => {
                self.first = bit;
                self.runs.push(n32);
            }
            Some(b) if b == bit => *self.runs.last_mut().unwrap() += n32,
            Some(_) => self.runs.push(n32),
        }
        self.len += n;
    }

    pub fn pop(&mut self) -> Option<u8> {
        let bit = self.last_bit()?;
        let last = self.runs.last_mut().unwrap();
        *last -= 1;
        if *last == 0 {
            self.runs.pop();
        }
        self.len -= 1;
        if self.len == 0 {
            self.first = 0;
        }
        Some(bit)
    }

    /// Keeps the first `n` symbols.
    pub fn truncate(&mut self, n: usize) {
        if n >= self.len {
            return;
        }
        let mut acc = 0usize;
        let mut keep = 0usize;
        for (i, &r) in self.runs.iter().enumerate() {
            let r = r as usize;
            if acc + r >= n {
                keep = i + 1;
                self.runs[i] = (n - acc) as u32;
                break;
            }
            acc += r;
        }
        self.runs.truncate(keep);
        if n == 0 {
            self.runs.clear();
            self.first = 0;
        }
        self.len = n;
    }

    pub fn child(&self, bit: u8) -> Self {
        let mut w = self.clone();
        w.push(bit);
        w
    }

    pub fn parent(&self) -> Option<Self> {
        let mut w = self.clone();
        w.pop().map(|_| w)
    }

    pub fn append(&mut self, other: &BinaryWord) {
        for (b, n) in other.runs() {
            self.push_run(b, n);
        }
    }

    pub fn concat(&self, other: &BinaryWord) -> Self {
        let mut w = self.clone();
        w.append(other);
        w
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &BinaryWord) -> usize {
        let mut acc = 0;
        for (i, (&a, &b)) in self.runs.iter().zip(other.runs.iter()).enumerate() {
            if self.run_bit(i) != other.run_bit(i) {
                return acc;
            }
            if a != b {
                return acc + a.min(b) as usize;
            }
            acc += a as usize;
        }
        acc
    }

    pub fn is_prefix_of(&self, other: &BinaryWord) -> bool {
        self.len <= other.len && self.common_prefix_len(other) == self.len
    }

    /// `Some(s)` when `self = prefix · s`.
    pub fn strip_prefix(&self, prefix: &BinaryWord) -> Option<BinaryWord> {
        if !prefix.is_prefix_of(self) {
            return None;
        }
        Some(self.suffix_from(prefix.len))
    }

    /// The word with its first `k` symbols removed.
    pub fn suffix_from(&self, mut k: usize) -> BinaryWord {
        let mut out = BinaryWord::empty();
        for (b, n) in self.runs() {
            if k >= n {
                k -= n;
                continue;
            }
            out.push_run(b, n - k);
            k = 0;
        }
        out
    }

    /// Prefix-comparable: one of the two is a prefix of the other.
    pub fn comparable(&self, other: &BinaryWord) -> bool {
        self.common_prefix_len(other) == self.len.min(other.len)
    }

    /// Is this word a string of `len()` copies of `bit`?
    pub fn is_constant(&self, bit: u8) -> bool {
        self.is_empty() || (self.runs.len() == 1 && self.first == bit)
    }
}

impl Ord for BinaryWord {
    /// Lexicographic order with a proper prefix sorting first. On a complete
    /// prefix code this is the left-to-right order of the leaves.
    fn cmp(&self, other: &Self) -> Ordering {
        let mut i = 0;
        loop {
            match (self.runs.get(i), other.runs.get(i)) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(&a), Some(&b)) => {
                    let (ba, bb) = (self.run_bit(i), other.run_bit(i));
                    if ba != bb {
                        return ba.cmp(&bb);
                    }
                    if a != b {
                        // The shorter run is followed by the opposite symbol
                        // (or by the end of its word).
                        let (short, short_is_self) = if a < b { (self, true) } else { (other, false) };
                        let ord = if i + 1 >= short.runs.len() {
                            Ordering::Less
                        } else {
                            // next symbol of the short word is !ba, the long word continues with ba
                            (1 - ba).cmp(&ba)
                        };
                        return if short_is_self { ord } else { ord.reverse() };
                    }
                }
            }
            i += 1;
        }
    }
}

impl PartialOrd for BinaryWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BinaryWord {
    /// The empty word prints as `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        let mut s = String::with_capacity(self.len);
        for b in self.bits() {
            s.push(if b == 0 { '0' } else { '1' });
        }
        f.write_str(&s)
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len > 64 {
            write!(f, "BinaryWord(")?;
            for (i, (b, n)) in self.runs().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{b}^{n}")?;
            }
            f.write_str(")")
        } else {
            write!(f, "BinaryWord({self})")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid binary word {0:?}: expected `-` or a string of 0 and 1")]
pub struct WordParseError(pub String);

impl FromStr for BinaryWord {
    type Err = WordParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "-" {
            return Ok(Self::empty());
        }
        if s.is_empty() {
            return Err(WordParseError(s.to_owned()));
        }
        let mut w = Self::empty();
        for c in s.chars() {
            match c {
                '0' => w.push(0),
                '1' => w.push(1),
                _ => return Err(WordParseError(s.to_owned())),
            }
        }
        Ok(w)
    }
}

/// Shorthand used throughout the tests: `bw("0110")`, `bw("-")`.
pub fn bw(s: &str) -> BinaryWord {
    s.parse().expect("valid binary word literal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn plain(w: &BinaryWord) -> Vec<u8> {
        w.bits().collect()
    }

    #[test]
    fn empty_word() {
        let e = BinaryWord::empty();
        assert!(e.is_empty());
        assert_eq!(e.to_string(), "-");
        assert_eq!(bw("-"), e);
        assert!(e.is_prefix_of(&bw("0101")));
        assert_eq!(e.parent(), None);
    }

    #[test]
    fn prefix_and_strip() {
        let w = bw("0110");
        assert!(bw("01").is_prefix_of(&w));
        assert!(!bw("00").is_prefix_of(&w));
        assert_eq!(w.strip_prefix(&bw("011")), Some(bw("0")));
        assert_eq!(w.strip_prefix(&bw("1")), None);
        assert_eq!(bw("0").concat(&bw("110")), w);
    }

    #[test]
    fn rejects_garbage() {
        assert!("".parse::<BinaryWord>().is_err());
        assert!("012".parse::<BinaryWord>().is_err());
    }

    #[test]
    fn long_runs_stay_compact() {
        let mut w = BinaryWord::repeat(1, 1_000_000);
        w.push(0);
        assert_eq!(w.run_count(), 2);
        assert_eq!(w.len(), 1_000_001);
        assert!(BinaryWord::repeat(1, 999_999).is_prefix_of(&w));
    }

    fn arb_bits() -> impl Strategy<Value = Vec<u8>> {
        prop::collection::vec(0u8..2, 0..12)
    }

    proptest! {
        #[test]
        fn order_matches_plain_lexicographic(a in arb_bits(), b in arb_bits()) {
            let (wa, wb) = (BinaryWord::from_bits(a.clone()), BinaryWord::from_bits(b.clone()));
            prop_assert_eq!(wa.cmp(&wb), a.cmp(&b));
            prop_assert_eq!(wa == wb, a == b);
            prop_assert_eq!(wa.is_prefix_of(&wb), b.starts_with(&a));
            let lcp = a.iter().zip(&b).take_while(|(x, y)| x == y).count();
            prop_assert_eq!(wa.common_prefix_len(&wb), lcp);
        }

        #[test]
        fn push_pop_truncate_agree_with_vec(a in arb_bits(), k in 0usize..14) {
            let mut w = BinaryWord::from_bits(a.clone());
            w.truncate(k);
            let mut v = a.clone();
            v.truncate(k);
            prop_assert_eq!(plain(&w), v.clone());
            prop_assert_eq!(w.clone(), BinaryWord::from_bits(v.clone()));
            let popped = w.pop();
            prop_assert_eq!(popped, v.pop());
            prop_assert_eq!(w, BinaryWord::from_bits(v));
        }

        #[test]
        fn display_parse_roundtrip(a in arb_bits()) {
            let w = BinaryWord::from_bits(a);
            prop_assert_eq!(w.to_string().parse::<BinaryWord>().unwrap(), w);
        }
    }
}
