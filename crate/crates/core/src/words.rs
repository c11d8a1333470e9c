//! Alphabets, finite words and one-sided configurations.
//!
//! Letters are stored as indices into an [`Alphabet`]; the alphabet is only
//! needed to parse or render text. Infinite configurations are never
//! materialized: everything goes through [`Configuration::prefix`].

use std::fmt;
use std::ops::Deref;

use thiserror::Error;

/// Index of a letter in its alphabet.
pub type Letter = u8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("alphabet must contain at least one letter")]
    EmptyAlphabet,
    #[error("alphabet has more than 256 letters")]
    AlphabetTooLarge,
    #[error("letter {0:?} appears twice in the alphabet")]
    DuplicateLetter(char),
    #[error("letter {0:?} is not in the alphabet")]
    ForeignLetter(char),
    #[error("letter index {0} is not in the alphabet")]
    ForeignIndex(Letter),
    #[error("deletion position {index} out of range for a word of length {len}")]
    DeleteOutOfRange { index: usize, len: usize },
    #[error("periodic part must be nonempty")]
    EmptyPeriod,
    #[error("ramp block exponent {which}·n+{offset} is negative for some n ≥ 1")]
    NegativeBlock { which: i64, offset: i64 },
    #[error("ramp never produces a letter")]
    EmptyRamp,
    #[error("ramp needs an alphabet with at least two letters")]
    RampAlphabet,
    #[error("bad configuration {input:?}: {reason}")]
    Dsl { input: String, reason: String },
}

/// Ordered set of distinct symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: &str) -> Result<Self, WordError> {
        let symbols: Vec<char> = symbols.chars().collect();
        if symbols.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        if symbols.len() > 256 {
            return Err(WordError::AlphabetTooLarge);
        }
        for (i, c) in symbols.iter().enumerate() {
            if symbols[..i].contains(c) {
                return Err(WordError::DuplicateLetter(*c));
            }
        }
        Ok(Self { symbols })
    }

    /// The alphabet `{a, b}` used by most of the named examples.
    pub fn binary() -> Self {
        Self {
            symbols: vec!['a', 'b'],
        }
    }

    /// Sorted set of the symbols occurring in the given texts.
    pub fn inferred<'a>(texts: impl IntoIterator<Item = &'a str>) -> Result<Self, WordError> {
        let mut symbols: Vec<char> = texts.into_iter().flat_map(str::chars).collect();
        symbols.sort_unstable();
        symbols.dedup();
        Self::new(&symbols.into_iter().collect::<String>())
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn index_of(&self, c: char) -> Result<Letter, WordError> {
        self.symbols
            .iter()
            .position(|&s| s == c)
            .map(|i| i as Letter)
            .ok_or(WordError::ForeignLetter(c))
    }

    pub fn symbol(&self, letter: Letter) -> Result<char, WordError> {
        self.symbols
            .get(letter as usize)
            .copied()
            .ok_or(WordError::ForeignIndex(letter))
    }

    pub fn contains(&self, letter: Letter) -> bool {
        (letter as usize) < self.symbols.len()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        text.chars().map(|c| self.index_of(c)).collect()
    }

    /// Renders a word; indices outside the alphabet show as `?`.
    pub fn render(&self, word: &[Letter]) -> String {
        word.iter()
            .map(|&l| self.symbols.get(l as usize).copied().unwrap_or('?'))
            .collect()
    }

    /// All words of length `len`, in lexicographic order of indices.
    pub fn words_of_length(&self, len: usize) -> impl Iterator<Item = Word> + '_ {
        let k = self.size();
        let total = k.checked_pow(len as u32).unwrap_or(usize::MAX);
        (0..total).map(move |mut code| {
            let mut letters = vec![0; len];
            for slot in letters.iter_mut().rev() {
                *slot = (code % k) as Letter;
                code /= k;
            }
            Word(letters)
        })
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.symbols {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Finite word over an alphabet.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn extend_from(&mut self, other: &[Letter]) {
        self.0.extend_from_slice(other);
    }

    pub fn concat(&self, other: &[Letter]) -> Self {
        let mut out = self.0.clone();
        out.extend_from_slice(other);
        Self(out)
    }

    pub fn repeat(&self, times: usize) -> Self {
        Self(self.0.repeat(times))
    }

    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }

    /// Removes the letter at position `j`.
    pub fn delete_at(&self, j: usize) -> Result<Self, WordError> {
        if j >= self.0.len() {
            return Err(WordError::DeleteOutOfRange {
                index: j,
                len: self.0.len(),
            });
        }
        let mut out = self.0.clone();
        out.remove(j);
        Ok(Self(out))
    }
}

impl Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Self(letters)
    }
}

impl From<&[Letter]> for Word {
    fn from(letters: &[Letter]) -> Self {
        Self(letters.to_vec())
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Free-function form of [`Word::delete_at`].
pub fn delete_at(u: &Word, j: usize) -> Result<Word, WordError> {
    u.delete_at(j)
}

/// A one-sided infinite word, observable through its finite prefixes.
///
/// Implementations must be prefix-consistent: `prefix(n)` is a prefix of
/// `prefix(m)` whenever `n <= m`.
pub trait Configuration: Send + Sync {
    fn prefix(&self, n: usize) -> Word;

    /// `x_{[start, start+len)}`.
    fn window(&self, start: usize, len: usize) -> Word {
        let full = self.prefix(start + len);
        Word::from(&full[start..])
    }
}

impl<C: Configuration + ?Sized> Configuration for &C {
    fn prefix(&self, n: usize) -> Word {
        (**self).prefix(n)
    }
}

impl<C: Configuration + ?Sized> Configuration for Box<C> {
    fn prefix(&self, n: usize) -> Word {
        (**self).prefix(n)
    }
}

impl<C: Configuration + ?Sized> Configuration for std::sync::Arc<C> {
    fn prefix(&self, n: usize) -> Word {
        (**self).prefix(n)
    }
}

/// Concatenation over `n >= 1` of `low^{p·n+q} high^{r·n+s}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ramp {
    p: i64,
    q: i64,
    r: i64,
    s: i64,
    low: Letter,
    high: Letter,
}

impl Ramp {
    pub fn new(p: i64, q: i64, r: i64, s: i64) -> Result<Self, WordError> {
        Self::with_letters(p, q, r, s, 0, 1)
    }

    pub fn with_letters(p: i64, q: i64, r: i64, s: i64, low: Letter, high: Letter) -> Result<Self, WordError> {
        for (which, offset) in [(p, q), (r, s)] {
            if which < 0 || which + offset < 0 {
                return Err(WordError::NegativeBlock { which, offset });
            }
        }
        if p + r == 0 && q + s == 0 {
            return Err(WordError::EmptyRamp);
        }
        Ok(Self { p, q, r, s, low, high })
    }

    pub fn params(&self) -> (i64, i64, i64, i64) {
        (self.p, self.q, self.r, self.s)
    }

    /// Exponents of block `n` (1-based): `(p·n+q, r·n+s)`.
    pub fn block(&self, n: u64) -> (u64, u64) {
        let n = n as i64;
        ((self.p * n + self.q) as u64, (self.r * n + self.s) as u64)
    }

    /// Position where block `j + 1` starts, i.e. the total length of blocks `1..=j`.
    pub fn block_start(&self, j: u64) -> u64 {
        let j = j as i64;
        ((self.p + self.r) * j * (j + 1) / 2 + (self.q + self.s) * j) as u64
    }

    fn fill(&self, n: usize) -> Word {
        let mut out = Vec::with_capacity(n);
        let mut block = 1u64;
        while out.len() < n {
            let (zeros, ones) = self.block(block);
            let take = |count: u64, out: &mut Vec<Letter>, letter: Letter| {
                let room = (n - out.len()) as u64;
                out.extend(std::iter::repeat_n(letter, count.min(room) as usize));
            };
            take(zeros, &mut out, self.low);
            take(ones, &mut out, self.high);
            block += 1;
        }
        Word(out)
    }
}

/// The configurations expressible in the command-line DSL, plus shifts of them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConfigGenerator {
    /// `u^∞`.
    Periodic(Word),
    /// `u v^∞`.
    EventuallyPeriodic {
        prefix: Word,
        period: Word,
    },
    Ramp(Ramp),
    /// `u a^∞` for a single fill letter `a`.
    Explicit {
        prefix: Word,
        fill: Letter,
    },
    Shifted {
        inner: Box<ConfigGenerator>,
        by: usize,
    },
}

impl ConfigGenerator {
    pub fn periodic(period: Word) -> Result<Self, WordError> {
        if period.is_empty() {
            return Err(WordError::EmptyPeriod);
        }
        Ok(Self::Periodic(period))
    }

    pub fn eventually_periodic(prefix: Word, period: Word) -> Result<Self, WordError> {
        if period.is_empty() {
            return Err(WordError::EmptyPeriod);
        }
        Ok(Self::EventuallyPeriodic { prefix, period })
    }

    pub fn ramp(p: i64, q: i64, r: i64, s: i64) -> Result<Self, WordError> {
        Ramp::new(p, q, r, s).map(Self::Ramp)
    }

    pub fn explicit(prefix: Word, fill: Letter) -> Self {
        Self::Explicit { prefix, fill }
    }

    /// `σ^t(x)`.
    pub fn shift(&self, t: usize) -> Self {
        match self {
            _ if t == 0 => self.clone(),
            Self::Shifted { inner, by } => Self::Shifted {
                inner: inner.clone(),
                by: by + t,
            },
            _ => Self::Shifted {
                inner: Box::new(self.clone()),
                by: t,
            },
        }
    }

    /// Parses `periodic:<word>`, `evp:<prefix>|<period>`, `ramp:<p>,<q>,<r>,<s>`
    /// or `word:<prefix>!<fill>`.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self, WordError> {
        let bad = |reason: &str| WordError::Dsl {
            input: text.to_string(),
            reason: reason.to_string(),
        };
        let (kind, body) = text.split_once(':').ok_or_else(|| bad("expected <kind>:<arguments>"))?;
        match kind {
            "periodic" => Self::periodic(alphabet.parse_word(body)?),
            "evp" => {
                let (prefix, period) = body
                    .split_once('|')
                    .ok_or_else(|| bad("expected evp:<prefix>|<period>"))?;
                Self::eventually_periodic(alphabet.parse_word(prefix)?, alphabet.parse_word(period)?)
            }
            "ramp" => {
                let nums = body
                    .split(',')
                    .map(|n| n.trim().parse::<i64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| bad(&e.to_string()))?;
                let [p, q, r, s] = nums[..] else {
                    return Err(bad("ramp takes exactly four integers"));
                };
                if alphabet.size() < 2 {
                    return Err(WordError::RampAlphabet);
                }
                Ramp::new(p, q, r, s).map(Self::Ramp)
            }
            "word" => {
                let (prefix, fill) = body
                    .split_once('!')
                    .ok_or_else(|| bad("expected word:<prefix>!<fill-letter>"))?;
                let mut fill_chars = fill.chars();
                let (Some(c), None) = (fill_chars.next(), fill_chars.next()) else {
                    return Err(bad("fill must be a single letter"));
                };
                Ok(Self::explicit(alphabet.parse_word(prefix)?, alphabet.index_of(c)?))
            }
            _ => Err(bad("unknown kind; expected periodic, evp, ramp or word")),
        }
    }

    /// Inverse of [`ConfigGenerator::parse`] for unshifted generators.
    pub fn to_dsl(&self, alphabet: &Alphabet) -> String {
        match self {
            Self::Periodic(u) => format!("periodic:{}", alphabet.render(u)),
            Self::EventuallyPeriodic { prefix, period } => {
                format!("evp:{}|{}", alphabet.render(prefix), alphabet.render(period))
            }
            Self::Ramp(r) => {
                let (p, q, rr, s) = r.params();
                format!("ramp:{p},{q},{rr},{s}")
            }
            Self::Explicit { prefix, fill } => {
                format!("word:{}!{}", alphabet.render(prefix), alphabet.render(&[*fill]))
            }
            Self::Shifted { inner, by } => format!("shift{by}({})", inner.to_dsl(alphabet)),
        }
    }
}

impl Configuration for ConfigGenerator {
    fn prefix(&self, n: usize) -> Word {
        match self {
            Self::Periodic(u) => u.iter().copied().cycle().take(n).collect(),
            Self::EventuallyPeriodic { prefix, period } => prefix
                .iter()
                .copied()
                .chain(period.iter().copied().cycle())
                .take(n)
                .collect(),
            Self::Ramp(r) => r.fill(n),
            Self::Explicit { prefix, fill } => prefix.iter().copied().chain(std::iter::repeat(*fill)).take(n).collect(),
            Self::Shifted { inner, by } => {
                let full = inner.prefix(n + by);
                Word::from(&full[*by..])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::binary()
    }

    fn w(text: &str) -> Word {
        ab().parse_word(text).unwrap()
    }

    #[test]
    fn alphabet_rejects_duplicates_and_empty() {
        assert_eq!(Alphabet::new(""), Err(WordError::EmptyAlphabet));
        assert_eq!(Alphabet::new("aba"), Err(WordError::DuplicateLetter('a')));
        assert_eq!(ab().parse_word("abc"), Err(WordError::ForeignLetter('c')));
        assert_eq!(Alphabet::inferred(["ba", "ca"]).unwrap().to_string(), "abc");
    }

    #[test]
    fn periodic_prefix() {
        let x = ConfigGenerator::periodic(w("ab")).unwrap();
        assert_eq!(ab().render(&x.prefix(5)), "ababa");
        assert!(x.prefix(0).is_empty());
        assert_eq!(ConfigGenerator::periodic(Word::empty()), Err(WordError::EmptyPeriod));
    }

    #[test]
    fn ramp_prefix_matches_block_notation() {
        let x = ConfigGenerator::ramp(1, 0, 1, 0).unwrap();
        let digits = Alphabet::new("01").unwrap();
        assert_eq!(digits.render(&x.prefix(6)), "010011");
        assert_eq!(digits.render(&x.prefix(12)), "010011000111");
        // 0^{n+1} 1^{n-1}
        let y = ConfigGenerator::ramp(1, 1, 1, -1).unwrap();
        assert_eq!(digits.render(&y.prefix(12)), "000001000011");
    }

    #[test]
    fn ramp_block_starts() {
        let Ok(ConfigGenerator::Ramp(r)) = ConfigGenerator::ramp(1, 0, 1, 0) else {
            unreachable!()
        };
        for j in 0..20 {
            assert_eq!(r.block_start(j), j * (j + 1));
        }
    }

    #[test]
    fn ramp_rejects_negative_blocks() {
        assert!(matches!(
            ConfigGenerator::ramp(1, -2, 1, 0),
            Err(WordError::NegativeBlock { .. })
        ));
        assert!(matches!(
            ConfigGenerator::ramp(-1, 5, 1, 0),
            Err(WordError::NegativeBlock { .. })
        ));
        assert_eq!(ConfigGenerator::ramp(0, 0, 0, 0), Err(WordError::EmptyRamp));
        assert!(ConfigGenerator::ramp(0, 1, 0, 0).is_ok());
    }

    #[test]
    fn shifts() {
        let x = ConfigGenerator::periodic(w("ab")).unwrap();
        assert_eq!(ab().render(&x.shift(1).prefix(4)), "baba");
        assert_eq!(x.shift(0), x);
        let y = ConfigGenerator::eventually_periodic(w("b"), w("a")).unwrap();
        assert_eq!(ab().render(&y.shift(1).prefix(3)), "aaa");
        assert_eq!(x.shift(2).shift(3), x.shift(5));
    }

    #[test]
    fn delete_positions() {
        let abc = Alphabet::new("abc").unwrap();
        let u = abc.parse_word("abc").unwrap();
        assert_eq!(abc.render(&u.delete_at(1).unwrap()), "ac");
        assert!(delete_at(&w("a"), 0).unwrap().is_empty());
        assert_eq!(ab().render(&w("abba").delete_at(3).unwrap()), "abb");
        assert_eq!(
            w("ab").delete_at(2),
            Err(WordError::DeleteOutOfRange { index: 2, len: 2 })
        );
    }

    #[test]
    fn dsl_round_trip_and_errors() {
        let a = ab();
        for text in ["periodic:ab", "evp:b|a", "ramp:1,0,1,0", "word:abb!a"] {
            let g = ConfigGenerator::parse(text, &a).unwrap();
            assert_eq!(g.to_dsl(&a), text);
        }
        let word = ConfigGenerator::parse("word:abb!a", &a).unwrap();
        assert_eq!(a.render(&word.prefix(6)), "abbaaa");
        assert!(matches!(
            ConfigGenerator::parse("spiral:ab", &a),
            Err(WordError::Dsl { .. })
        ));
        assert!(matches!(
            ConfigGenerator::parse("ramp:1,2,3", &a),
            Err(WordError::Dsl { .. })
        ));
        assert!(matches!(
            ConfigGenerator::parse("word:ab!ab", &a),
            Err(WordError::Dsl { .. })
        ));
        assert_eq!(
            ConfigGenerator::parse("ramp:1,0,1,0", &Alphabet::new("a").unwrap()),
            Err(WordError::RampAlphabet)
        );
    }

    #[test]
    fn words_of_length_enumerates_lexicographically() {
        let all: Vec<String> = ab().words_of_length(2).map(|u| ab().render(&u)).collect();
        assert_eq!(all, ["aa", "ab", "ba", "bb"]);
        assert_eq!(ab().words_of_length(0).count(), 1);
    }
}
