//! The standard generating sets of F, T and V, group words over them, and
//! the infinite family `x_n`.

use std::fmt;
use std::sync::OnceLock;

use num_rational::Ratio;

use crate::element::{Class, Element};
use crate::word::{bw, BinaryWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    X0,
    X1,
    C1,
    Pi0,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::X0, Generator::X1, Generator::C1, Generator::Pi0];

    pub fn name(self) -> &'static str {
        match self {
            Generator::X0 => "x0",
            Generator::X1 => "x1",
            Generator::C1 => "c1",
            Generator::Pi0 => "pi0",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == s)
    }

    /// Order of the generator in the group, if finite.
    pub fn order(self) -> Option<i64> {
        match self {
            Generator::C1 => Some(2),
            Generator::Pi0 => Some(2),
            _ => None,
        }
    }
}

/// A = {x0, x1} generates F, B = A ∪ {c1} generates T, C = B ∪ {π0} generates V.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alphabet {
    A,
    B,
    C,
}

impl Alphabet {
    pub fn contains(self, g: Generator) -> bool {
        match g {
            Generator::X0 | Generator::X1 => true,
            Generator::C1 => self >= Alphabet::B,
            Generator::Pi0 => self == Alphabet::C,
        }
    }

    /// Smallest alphabet containing all of `gens`.
    pub fn covering(gens: impl IntoIterator<Item = Generator>) -> Alphabet {
        gens.into_iter()
            .map(|g| match g {
                Generator::X0 | Generator::X1 => Alphabet::A,
                Generator::C1 => Alphabet::B,
                Generator::Pi0 => Alphabet::C,
            })
            .max()
            .unwrap_or(Alphabet::A)
    }

    /// Can every element of class `c` be written over this alphabet?
    pub fn generates(self, c: Class) -> bool {
        match self {
            Alphabet::A => c == Class::F,
            Alphabet::B => c != Class::VOnly,
            Alphabet::C => true,
        }
    }

    /// The edge labels of the Cayley graph in the fixed tie-breaking order
    /// x0 < x0⁻¹ < x1 < x1⁻¹ < c1 < c1⁻¹ < π0. π0 is an involution and
    /// contributes a single label.
    pub fn steps(self) -> Vec<Step> {
        let mut out = vec![Step::new(Generator::X0, 1), Step::new(Generator::X0, -1), Step::new(Generator::X1, 1), Step::new(Generator::X1, -1)];
        if self >= Alphabet::B {
            out.push(Step::new(Generator::C1, 1));
            out.push(Step::new(Generator::C1, -1));
        }
        if self == Alphabet::C {
            out.push(Step::new(Generator::Pi0, 1));
        }
        out
    }

    pub fn name(self) -> &'static str {
        match self {
            Alphabet::A => "A",
            Alphabet::B => "B",
            Alphabet::C => "C",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "A" => Some(Alphabet::A),
            "B" => Some(Alphabet::B),
            "C" => Some(Alphabet::C),
            _ => None,
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single generator or inverse generator: one edge of the Cayley graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub base: Generator,
    pub sign: i8,
}

impl Step {
    pub fn new(base: Generator, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Self { base, sign }
    }

    pub fn inverse(self) -> Step {
        if self.base == Generator::Pi0 {
            self
        } else {
            Step::new(self.base, -self.sign)
        }
    }

    pub fn element(self) -> &'static Element {
        let (pos, neg) = generator_elements(self.base);
        if self.sign > 0 {
            pos
        } else {
            neg
        }
    }

    pub fn letter(self) -> Letter {
        Letter { base: self.base, exponent: i64::from(self.sign) }
    }
}

/// `base^exponent` with a nonzero exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub base: Generator,
    pub exponent: i64,
}

impl Letter {
    pub fn new(base: Generator, exponent: i64) -> Self {
        assert!(exponent != 0, "letters have nonzero exponents");
        Self { base, exponent }
    }

    pub fn inverse(self) -> Letter {
        Letter { base: self.base, exponent: -self.exponent }
    }

    pub fn len(self) -> u64 {
        self.exponent.unsigned_abs()
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// The group element `base^exponent`, built in closed form.
    pub fn element(self) -> Element {
        letter_element(self.base, self.exponent)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 1 {
            write!(f, "{}", self.base.name())
        } else {
            write!(f, "{}^{}", self.base.name(), self.exponent)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("letter {0} is not in alphabet {1}")]
    NotInAlphabet(Generator, Alphabet),
    #[error("zero exponent")]
    ZeroExponent,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A word over one of the alphabets A, B, C. `||w||` is [`GroupWord::length`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupWord {
    alphabet: Alphabet,
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn empty(alphabet: Alphabet) -> Self {
        Self { alphabet, letters: Vec::new() }
    }

    /// Keeps `letters` verbatim (no free reduction).
    pub fn new(alphabet: Alphabet, letters: Vec<Letter>) -> Result<Self, WordError> {
        for l in &letters {
            if l.exponent == 0 {
                return Err(WordError::ZeroExponent);
            }
            if !alphabet.contains(l.base) {
                return Err(WordError::NotInAlphabet(l.base, alphabet));
            }
        }
        Ok(Self { alphabet, letters })
    }

    pub fn from_steps(alphabet: Alphabet, steps: impl IntoIterator<Item = Step>) -> Result<Self, WordError> {
        let mut w = Self::empty(alphabet);
        for s in steps {
            w.push(s.letter())?;
        }
        Ok(w)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// Same letters, declared over a larger alphabet.
    pub fn widen(mut self, alphabet: Alphabet) -> Self {
        assert!(alphabet >= self.alphabet);
        self.alphabet = alphabet;
        self
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `||w||`: sum of absolute exponents.
    pub fn length(&self) -> u64 {
        self.letters.iter().map(|l| l.len()).sum()
    }

    /// Appends, merging with the last letter when the bases agree.
    pub fn push(&mut self, letter: Letter) -> Result<(), WordError> {
        if !self.alphabet.contains(letter.base) {
            return Err(WordError::NotInAlphabet(letter.base, self.alphabet));
        }
        if letter.exponent == 0 {
            return Ok(());
        }
        match self.letters.last_mut() {
            Some(last) if last.base == letter.base => {
                last.exponent += letter.exponent;
                if last.exponent == 0 {
                    self.letters.pop();
                }
            }
            _ => self.letters.push(letter),
        }
        Ok(())
    }

    pub fn push_power(&mut self, base: Generator, exponent: i64) -> Result<(), WordError> {
        if exponent == 0 {
            return Ok(());
        }
        self.push(Letter::new(base, exponent))
    }

    /// Concatenation with free cancellation at the seam.
    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut w = GroupWord::empty(self.alphabet.max(other.alphabet));
        for &l in self.letters.iter().chain(&other.letters) {
            w.push(l).expect("alphabet covers both words");
        }
        w
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord { alphabet: self.alphabet, letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    /// Unit steps, left to right: `x0^3` yields three `x0` steps.
    pub fn steps(&self) -> impl Iterator<Item = Step> + '_ {
        self.letters.iter().flat_map(|l| {
            let step = Step::new(l.base, if l.exponent > 0 { 1 } else { -1 });
            std::iter::repeat_n(step, l.len() as usize)
        })
    }

    /// Left-to-right product of the letters.
    pub fn eval(&self) -> Element {
        eval_word(self)
    }
}

impl fmt::Display for GroupWord {
    /// Whitespace-separated letters with `^k` exponents; the empty word is `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

fn el(pairs: &[(&str, &str)]) -> Element {
    Element::from_pairs(pairs.iter().map(|(u, v)| (bw(u), bw(v))).collect())
        .expect("generator tables are valid diagrams")
        .0
}

fn generator_elements(g: Generator) -> &'static (Element, Element) {
    static TABLE: OnceLock<[(Element, Element); 4]> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        Generator::ALL.map(|g| {
            let e = match g {
                Generator::X0 => el(&[("00", "0"), ("01", "10"), ("1", "11")]),
                Generator::X1 => el(&[("0", "0"), ("100", "10"), ("101", "110"), ("11", "111")]),
                Generator::C1 => el(&[("00", "10"), ("01", "11"), ("1", "0")]),
                Generator::Pi0 => el(&[("00", "01"), ("01", "00"), ("1", "1")]),
            };
            let inv = e.invert();
            (e, inv)
        })
    });
    &table[g as usize]
}

/// The fixed tree-pair diagram of a generator.
pub fn standard_generator(g: Generator) -> Element {
    generator_elements(g).0.clone()
}

/// `x0^k` for any integer `k`: the left vine of `k+2` leaves mapped in order
/// onto the right vine.
pub fn x0_power(k: i64) -> Element {
    if k == 0 {
        return Element::identity();
    }
    let n = k.unsigned_abs() as usize;
    let mut pairs = Vec::with_capacity(n + 2);
    // left vine 0^{n+1}, 0^n 1, ..., 01, 1 and right vine 0, 10, ..., 1^n 0, 1^{n+1}
    for i in 0..n + 2 {
        let dom = if i == 0 {
            BinaryWord::repeat(0, n + 1)
        } else {
            let mut w = BinaryWord::repeat(0, n + 1 - i);
            w.push(1);
            w
        };
        let ran = if i == n + 1 {
            BinaryWord::repeat(1, n + 1)
        } else {
            let mut w = BinaryWord::repeat(1, i);
            w.push(0);
            w
        };
        pairs.push((dom, ran));
    }
    let e = Element::from_reduced_unchecked(pairs);
    if k > 0 {
        e
    } else {
        e.invert()
    }
}

pub fn letter_element(base: Generator, exponent: i64) -> Element {
    match base {
        Generator::X0 => x0_power(exponent),
        Generator::X1 => x0_power(exponent).copy_into_interval(&bw("1")).expect("x0 powers lie in F"),
        Generator::C1 | Generator::Pi0 => {
            let order = base.order().unwrap();
            let e = exponent.rem_euclid(order);
            standard_generator(base).pow(e)
        }
    }
}

/// `x_n`: `x_0 = x0`, `x_1 = x1`, and `x_{j+1}` is the copy of `x_j` in `[1]`,
/// so `x_n` is the copy of `x0` in `[1^n]`.
pub fn x_n(n: usize) -> Element {
    standard_generator(Generator::X0)
        .copy_into_interval(&BinaryWord::repeat(1, n))
        .expect("x0 lies in F")
}

/// The word `x0^{-(n-1)} x1 x0^{n-1}` for `x_n` (n ≥ 1), or `x0` for n = 0.
pub fn x_n_word(n: usize, alphabet: Alphabet) -> GroupWord {
    let mut w = GroupWord::empty(alphabet);
    if n == 0 {
        w.push_power(Generator::X0, 1).unwrap();
    } else {
        let k = (n - 1) as i64;
        w.push_power(Generator::X0, -k).unwrap();
        w.push_power(Generator::X1, 1).unwrap();
        w.push_power(Generator::X0, k).unwrap();
    }
    w
}

/// Evaluates a word, multiplying letter by letter from the left.
pub fn eval_word(w: &GroupWord) -> Element {
    w.letters.iter().fold(Element::identity(), |acc, l| acc.multiply(&l.element()))
}

/// `c · N(a)`: a lower bound on word length for any valid constant `c`.
pub fn leaf_length_lower_bound(a: &Element, c: Ratio<i64>) -> Ratio<i64> {
    c * Ratio::from_integer(a.num_leaves() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Class;

    fn gen(g: Generator) -> Element {
        standard_generator(g)
    }

    fn word(alphabet: Alphabet, letters: &[(Generator, i64)]) -> GroupWord {
        GroupWord::new(alphabet, letters.iter().map(|&(b, e)| Letter::new(b, e)).collect()).unwrap()
    }

    #[test]
    fn x1_is_copy_of_x0() {
        assert_eq!(gen(Generator::X0).copy_into_interval(&bw("1")).unwrap(), gen(Generator::X1));
        assert_eq!(x_n(1), gen(Generator::X1));
        assert_eq!(x_n(0), gen(Generator::X0));
    }

    #[test]
    fn classes_of_generators() {
        assert_eq!(gen(Generator::X0).classify(), Class::F);
        assert_eq!(gen(Generator::X1).classify(), Class::F);
        assert_eq!(gen(Generator::C1).classify(), Class::TOnly);
        assert_eq!(gen(Generator::Pi0).classify(), Class::VOnly);
        assert_eq!(gen(Generator::Pi0).multiply(&gen(Generator::Pi0)), Element::identity());
        assert_eq!(gen(Generator::C1).pow(2), Element::identity());
        assert_eq!(gen(Generator::C1).num_leaves(), 2);
    }

    #[test]
    fn x_n_leaf_counts_and_recursion() {
        let mut prev = x_n(0);
        for r in 0..=50 {
            let xr = x_n(r);
            assert_eq!(xr.num_leaves(), r + 3);
            if r > 0 {
                assert_eq!(prev.copy_into_interval(&bw("1")).unwrap(), xr);
            }
            prev = xr;
        }
    }

    #[test]
    fn x_n_conjugation_words() {
        let a = Alphabet::A;
        assert_eq!(word(a, &[(Generator::X0, -1), (Generator::X1, 1), (Generator::X0, 1)]).eval(), x_n(2));
        for j in 0..=30 {
            assert_eq!(x_n_word(j + 1, a).eval(), x_n(j + 1), "j = {j}");
        }
    }

    #[test]
    fn eval_examples() {
        let a = Alphabet::A;
        assert_eq!(word(a, &[(Generator::X0, 1), (Generator::X0, -1)]).eval(), Element::identity());
        let x0 = gen(Generator::X0);
        assert_eq!(word(a, &[(Generator::X0, 1), (Generator::X0, 1)]).eval(), x0.multiply(&x0));
        assert_eq!(word(a, &[(Generator::X0, 5)]).eval(), x0.pow(5));
        assert_eq!(word(a, &[(Generator::X0, -4)]).eval(), x0.pow(-4));
        assert_eq!(word(a, &[(Generator::X1, -3)]).eval(), gen(Generator::X1).pow(-3));
        assert_eq!(word(Alphabet::B, &[(Generator::C1, 5)]).eval(), gen(Generator::C1));
        assert_eq!(GroupWord::empty(a).eval(), Element::identity());
    }

    #[test]
    fn copy_of_x0_into_left_half() {
        let w = word(Alphabet::A, &[(Generator::X0, 2), (Generator::X1, -1), (Generator::X0, -1)]);
        assert_eq!(gen(Generator::X0).copy_into_interval(&bw("0")).unwrap(), w.eval());
    }

    #[test]
    fn word_bookkeeping() {
        let w = word(Alphabet::A, &[(Generator::X0, 2), (Generator::X1, -1), (Generator::X0, -1)]);
        assert_eq!(w.length(), 4);
        assert_eq!(w.to_string(), "x0^2 x1^-1 x0^-1");
        assert_eq!(w.steps().count(), 4);
        assert_eq!(w.concat(&w.inverse()), GroupWord::empty(Alphabet::A));
        assert_eq!(GroupWord::empty(Alphabet::C).to_string(), "1");
        assert_eq!(
            GroupWord::new(Alphabet::A, vec![Letter::new(Generator::C1, 1)]),
            Err(WordError::NotInAlphabet(Generator::C1, Alphabet::A))
        );
    }

    #[test]
    fn lower_bound() {
        let c = Ratio::new(1, 4);
        assert_eq!(leaf_length_lower_bound(&Element::identity(), c), c);
        assert_eq!(leaf_length_lower_bound(&x_n(5), c), Ratio::from_integer(2));
        assert_eq!(leaf_length_lower_bound(&gen(Generator::X0), c), Ratio::new(3, 4));
    }

    #[test]
    fn words_land_in_their_groups() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for alphabet in [Alphabet::A, Alphabet::B] {
            let steps = alphabet.steps();
            for _ in 0..200 {
                let len = rng.gen_range(0..10);
                let w = GroupWord::from_steps(alphabet, (0..len).map(|_| steps[rng.gen_range(0..steps.len())])).unwrap();
                assert!(alphabet.generates(w.eval().classify()));
            }
        }
    }
}
