//! Local rules, their extension to finite words, and dill maps on configurations.
//!
//! A [`RuleTable`] of diameter δ assigns a nonempty image word to every window
//! in `A^δ`. The dill map concatenates the images of all windows of a
//! configuration. Substitutions are tables with δ = 1; cellular automata are
//! tables whose images all have length 1.

use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::words::{Alphabet, Configuration, Letter, Word};

/// Upper limit on `|A|^δ` for dense tables.
pub const MAX_WINDOWS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("diameter must be at least 1")]
    ZeroDiameter,
    #[error("table with |A|^δ windows exceeds the limit of {MAX_WINDOWS}")]
    TooManyWindows,
    #[error("expected {expected} images, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("window {window} has an empty image")]
    EmptyImage { window: String },
    #[error("letter index {0} is not in the alphabet")]
    ForeignLetter(Letter),
    #[error("substitution must have diameter 1, got {0}")]
    NotSubstitution(usize),
    #[error("cellular automaton rule needs all images of length 1, got norms ({minf}, {maxf})")]
    NotCellularAutomaton { minf: usize, maxf: usize },
    #[error("rules are over different alphabets")]
    AlphabetMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct RuleParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing `alphabet:` header")]
    MissingAlphabet,
    #[error("missing `diameter:` header")]
    MissingDiameter,
    #[error("invalid alphabet: {0}")]
    BadAlphabet(String),
    #[error("invalid diameter {0:?}")]
    BadDiameter(String),
    #[error("expected `<window> -> <image>`, got {0:?}")]
    Malformed(String),
    #[error("window {window:?} has length {len}, expected {diameter}")]
    WindowLength {
        window: String,
        len: usize,
        diameter: usize,
    },
    #[error("letter {0:?} is not in the alphabet")]
    ForeignLetter(char),
    #[error("window {0:?} has an empty image")]
    EmptyImage(String),
    #[error("window {0:?} defined twice")]
    DuplicateWindow(String),
    #[error("missing image for window {0:?} (rule must be total)")]
    MissingWindow(String),
    #[error("{0}")]
    Table(RuleError),
}

/// Total local rule `A^δ → A^+`, stored densely by base-|A| window code.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleTable {
    alphabet: Alphabet,
    diameter: usize,
    images: Vec<Word>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Norms {
    pub minf: usize,
    pub maxf: usize,
    pub uniform: bool,
}

impl RuleTable {
    /// `images[code]` is the image of the window whose base-|A| code is
    /// `code`, most significant letter first.
    pub fn new(alphabet: Alphabet, diameter: usize, images: Vec<Word>) -> Result<Self, RuleError> {
        let expected = window_count(alphabet.size(), diameter)?;
        if images.len() != expected {
            return Err(RuleError::WrongCount {
                expected,
                got: images.len(),
            });
        }
        for (code, image) in images.iter().enumerate() {
            if image.is_empty() {
                let window = alphabet.render(&decode_window(code, alphabet.size(), diameter));
                return Err(RuleError::EmptyImage { window });
            }
            if let Some(&bad) = image.iter().find(|&&l| !alphabet.contains(l)) {
                return Err(RuleError::ForeignLetter(bad));
            }
        }
        Ok(Self {
            alphabet,
            diameter,
            images,
        })
    }

    /// Builds a table by evaluating `rule` on every window.
    pub fn from_fn(
        alphabet: Alphabet,
        diameter: usize,
        mut rule: impl FnMut(&[Letter]) -> Word,
    ) -> Result<Self, RuleError> {
        let count = window_count(alphabet.size(), diameter)?;
        let images = (0..count)
            .map(|code| rule(&decode_window(code, alphabet.size(), diameter)))
            .collect();
        Self::new(alphabet, diameter, images)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn window_count(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn window_code(&self, window: &[Letter]) -> usize {
        debug_assert_eq!(window.len(), self.diameter);
        let k = self.alphabet.size();
        window.iter().fold(0, |acc, &l| acc * k + l as usize)
    }

    pub fn window(&self, code: usize) -> Word {
        decode_window(code, self.alphabet.size(), self.diameter)
    }

    /// `f(window)`; `window` must have length δ.
    pub fn image(&self, window: &[Letter]) -> &Word {
        &self.images[self.window_code(window)]
    }

    pub fn norms(&self) -> Norms {
        let minf = self.images.iter().map(|w| w.len()).min().unwrap_or(0);
        let maxf = self.images.iter().map(|w| w.len()).max().unwrap_or(0);
        Norms {
            minf,
            maxf,
            uniform: minf == maxf,
        }
    }

    /// `f*(u)`, the concatenation of the images of all length-δ windows of `u`.
    pub fn apply_star(&self, u: &[Letter]) -> Result<Word, RuleError> {
        if let Some(&bad) = u.iter().find(|&&l| !self.alphabet.contains(l)) {
            return Err(RuleError::ForeignLetter(bad));
        }
        Ok(self.star(u))
    }

    /// [`RuleTable::apply_star`] for words already known to be over the alphabet.
    pub fn star(&self, u: &[Letter]) -> Word {
        let mut out = Word::empty();
        for window in u.windows(self.diameter) {
            out.extend_from(self.image(window));
        }
        out
    }

    /// `|f*(u)|` without building the word.
    pub fn star_len(&self, u: &[Letter]) -> usize {
        u.windows(self.diameter).map(|win| self.image(win).len()).sum()
    }

    /// First `n` letters of `F(x)`.
    pub fn image_prefix(&self, x: &dyn Configuration, n: usize) -> Word {
        if n == 0 {
            return Word::empty();
        }
        let minf = self.norms().minf;
        let input = x.prefix(n.div_ceil(minf) + self.diameter - 1);
        let mut out = Word::empty();
        for window in input.windows(self.diameter) {
            if out.len() >= n {
                break;
            }
            out.extend_from(self.image(window));
        }
        out.truncate(n);
        out
    }

    /// `F(x)` as a lazily evaluated configuration.
    pub fn apply<'a>(&'a self, x: &'a dyn Configuration) -> DillImage<'a> {
        DillImage { rule: self, source: x }
    }

    /// `s(x) = |f(x_{[0,δ)})|`, the shift of `F(x)` caused by shifting `x` once.
    pub fn shift_jump(&self, x: &dyn Configuration) -> usize {
        self.image(&x.prefix(self.diameter)).len()
    }

    /// Line-oriented text form accepted by [`RuleTable::parse`].
    pub fn to_rule_text(&self) -> String {
        let mut out = format!("alphabet: {}\ndiameter: {}\n", self.alphabet, self.diameter);
        for (code, image) in self.images.iter().enumerate() {
            out.push_str(&format!(
                "{} -> {}\n",
                self.alphabet.render(&self.window(code)),
                self.alphabet.render(image)
            ));
        }
        out
    }

    /// Hex SHA-256 of the canonical text form.
    pub fn digest(&self) -> String {
        Sha256::digest(self.to_rule_text().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn parse(text: &str) -> Result<Self, RuleParseError> {
        let err = |line: usize, kind: ParseErrorKind| RuleParseError { line, kind };
        let mut alphabet: Option<Alphabet> = None;
        let mut diameter: Option<usize> = None;
        let mut images: Vec<Option<Word>> = Vec::new();
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("alphabet:") {
                let a =
                    Alphabet::new(rest.trim()).map_err(|e| err(line_no, ParseErrorKind::BadAlphabet(e.to_string())))?;
                alphabet = Some(a);
                continue;
            }
            if let Some(rest) = line.strip_prefix("diameter:") {
                let d = rest
                    .trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&d| d >= 1)
                    .ok_or_else(|| err(line_no, ParseErrorKind::BadDiameter(rest.trim().to_string())))?;
                diameter = Some(d);
                continue;
            }
            let a = alphabet
                .as_ref()
                .ok_or_else(|| err(line_no, ParseErrorKind::MissingAlphabet))?;
            let d = diameter.ok_or_else(|| err(line_no, ParseErrorKind::MissingDiameter))?;
            if images.is_empty() {
                let count = window_count(a.size(), d).map_err(|e| err(line_no, ParseErrorKind::Table(e)))?;
                images = vec![None; count];
            }
            let (window_text, image_text) = line
                .split_once("->")
                .ok_or_else(|| err(line_no, ParseErrorKind::Malformed(line.to_string())))?;
            let (window_text, image_text) = (window_text.trim(), image_text.trim());
            let parse = |t: &str| {
                t.chars()
                    .map(|c| {
                        a.index_of(c)
                            .map_err(|_| err(line_no, ParseErrorKind::ForeignLetter(c)))
                    })
                    .collect::<Result<Word, _>>()
            };
            let window = parse(window_text)?;
            if window.len() != d {
                return Err(err(
                    line_no,
                    ParseErrorKind::WindowLength {
                        window: window_text.to_string(),
                        len: window.len(),
                        diameter: d,
                    },
                ));
            }
            let image = parse(image_text)?;
            if image.is_empty() {
                return Err(err(line_no, ParseErrorKind::EmptyImage(window_text.to_string())));
            }
            let k = a.size();
            let code = window.iter().fold(0, |acc, &l| acc * k + l as usize);
            if images[code].is_some() {
                return Err(err(line_no, ParseErrorKind::DuplicateWindow(window_text.to_string())));
            }
            images[code] = Some(image);
        }

        let end = last_line + 1;
        let alphabet = alphabet.ok_or_else(|| err(end, ParseErrorKind::MissingAlphabet))?;
        let diameter = diameter.ok_or_else(|| err(end, ParseErrorKind::MissingDiameter))?;
        if images.is_empty() {
            let count = window_count(alphabet.size(), diameter).map_err(|e| err(end, ParseErrorKind::Table(e)))?;
            images = vec![None; count];
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(code, image)| {
                image.ok_or_else(|| {
                    let window = alphabet.render(&decode_window(code, alphabet.size(), diameter));
                    err(end, ParseErrorKind::MissingWindow(window))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(alphabet, diameter, images).map_err(|e| err(end, ParseErrorKind::Table(e)))
    }
}

impl fmt::Display for RuleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_rule_text())
    }
}

fn window_count(alphabet_size: usize, diameter: usize) -> Result<usize, RuleError> {
    if diameter == 0 {
        return Err(RuleError::ZeroDiameter);
    }
    alphabet_size
        .checked_pow(diameter as u32)
        .filter(|&n| n <= MAX_WINDOWS)
        .ok_or(RuleError::TooManyWindows)
}

fn decode_window(mut code: usize, k: usize, diameter: usize) -> Word {
    let mut letters = vec![0; diameter];
    for slot in letters.iter_mut().rev() {
        *slot = (code % k) as Letter;
        code /= k;
    }
    Word::new(letters)
}

/// `F(x)` for a fixed rule and source configuration.
#[derive(Clone, Copy)]
pub struct DillImage<'a> {
    rule: &'a RuleTable,
    source: &'a dyn Configuration,
}

impl Configuration for DillImage<'_> {
    fn prefix(&self, n: usize) -> Word {
        self.rule.image_prefix(self.source, n)
    }
}

/// The local rule `w ↦ τ*(f(w))` of a substitution applied after a cellular automaton.
pub fn compose_sub_ca(tau: &RuleTable, f: &RuleTable) -> Result<RuleTable, RuleError> {
    if tau.diameter() != 1 {
        return Err(RuleError::NotSubstitution(tau.diameter()));
    }
    let Norms { minf, maxf, .. } = f.norms();
    if minf != 1 || maxf != 1 {
        return Err(RuleError::NotCellularAutomaton { minf, maxf });
    }
    if tau.alphabet() != f.alphabet() {
        return Err(RuleError::AlphabetMismatch);
    }
    RuleTable::new(
        f.alphabet().clone(),
        f.diameter(),
        f.images().iter().map(|image| tau.star(image)).collect(),
    )
}

/// Rules that appear as worked examples.
pub mod named {
    use super::*;

    fn binary(diameter: usize, images: &[&str]) -> RuleTable {
        let a = Alphabet::binary();
        let images = images.iter().map(|t| a.parse_word(t).unwrap()).collect();
        RuleTable::new(a, diameter, images).expect("named rule is valid")
    }

    /// `τ(a) = ab`, `τ(b) = a`.
    pub fn fibonacci() -> RuleTable {
        binary(1, &["ab", "a"])
    }

    /// `f(aa) = f(bb) = a`, `f(ab) = f(ba) = b`.
    pub fn xor() -> RuleTable {
        binary(2, &["a", "b", "b", "a"])
    }

    /// Diameter-2 rule `f(u₀u₁) = u₁` over any alphabet.
    pub fn shift(alphabet: Alphabet) -> RuleTable {
        RuleTable::from_fn(alphabet, 2, |w| Word::new(vec![w[1]])).expect("shift rule is valid")
    }

    /// `f(aa) = ab`, `f(ab) = a`, `f(ba) = bab`, `f(bb) = ba`: non-uniform,
    /// non-constant, but with all de Bruijn cycle means equal to 2.
    pub fn diamond_example() -> RuleTable {
        binary(2, &["ab", "a", "bab", "ba"])
    }

    /// `τ(0) = 0`, `τ(1) = 11` over `{0, 1}`.
    pub fn doubling_ones() -> RuleTable {
        let a = Alphabet::new("01").unwrap();
        let images = vec![a.parse_word("0").unwrap(), a.parse_word("11").unwrap()];
        RuleTable::new(a, 1, images).expect("named rule is valid")
    }

    /// Every window maps to `image`.
    pub fn constant(alphabet: Alphabet, diameter: usize, image: Word) -> Result<RuleTable, RuleError> {
        RuleTable::from_fn(alphabet, diameter, |_| image.clone())
    }

    pub fn identity_substitution(alphabet: Alphabet) -> RuleTable {
        RuleTable::from_fn(alphabet, 1, |w| Word::new(vec![w[0]])).expect("identity is valid")
    }
}
