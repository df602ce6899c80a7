//! Generators and free-group words over the alphabet of `P_n(RP^2)`, the
//! extra strand of `P_{n+1}(RP^2)` and the kernel generators `A_i`.
//!
//! Words are stored run-length encoded: a letter is a generator together
//! with a nonzero exponent. Parsing keeps the input as written; reduction is
//! a separate step ([`Word::free_reduce`]).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// A generator symbol. The strand count `n` is carried by the enclosing
/// [`Word`], so indices here are only meaningful together with it.
///
/// The derived order (all `B`, then all `rho`, then all `A`) is the order in
/// which generators are listed in a presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    /// `B_{i,j}` with `i < j`.
    B(u32, u32),
    /// `rho_k`.
    Rho(u32),
    /// `A_i`, the image of `B_{i,n+1}` in the quotient by `L`.
    A(u32),
}

impl Generator {
    /// Checks the index ranges for strand count `n`: `B(i,j)` needs
    /// `1 <= i < j <= n+1`, `Rho(k)` needs `1 <= k <= n+1`, `A(i)` needs
    /// `1 <= i <= n-1`.
    pub fn validate(self, n: u32) -> Result<(), WordError> {
        let ok = match self {
            Generator::B(i, j) => 1 <= i && i < j && j <= n + 1,
            Generator::Rho(k) => 1 <= k && k <= n + 1,
            Generator::A(i) => 1 <= i && i < n,
        };
        if ok {
            Ok(())
        } else {
            Err(WordError::IndexOutOfRange { symbol: self.to_string(), n })
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::B(i, j) => write!(f, "B[{i},{j}]"),
            Generator::Rho(k) => write!(f, "rho[{k}]"),
            Generator::A(i) => write!(f, "A[{i}]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: Generator,
    pub exp: i64,
}

impl Letter {
    pub fn new(gen: Generator, exp: i64) -> Self {
        Letter { gen, exp }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("generator {symbol} is out of range for n={n}")]
    IndexOutOfRange { symbol: String, n: u32 },
    #[error("words have different strand counts ({0} and {1})")]
    ContextMismatch(u32, u32),
}

/// A word in the free group on [`Generator`]s, in context `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    n: u32,
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity(n: u32) -> Self {
        Word { n, letters: Vec::new() }
    }

    /// Builds a word, validating every generator against `n`. Zero
    /// exponents are rejected; the letters are kept as given (not reduced).
    pub fn new(n: u32, letters: Vec<Letter>) -> Result<Self, WordError> {
        for l in &letters {
            l.gen.validate(n)?;
            if l.exp == 0 {
                return Err(WordError::Syntax { pos: 0, msg: format!("zero exponent on {}", l.gen) });
            }
        }
        Ok(Word { n, letters })
    }

    /// Builds a word from `(generator, exponent)` pairs without validation.
    /// Intended for code that constructs words from already-checked indices.
    pub fn from_pairs(n: u32, pairs: &[(Generator, i64)]) -> Self {
        let letters = pairs.iter().filter(|(_, e)| *e != 0).map(|&(g, e)| Letter::new(g, e)).collect();
        Word { n, letters }
    }

    pub fn generator(n: u32, gen: Generator) -> Self {
        Word { n, letters: vec![Letter::new(gen, 1)] }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of runs (stored letters).
    pub fn num_runs(&self) -> usize {
        self.letters.len()
    }

    /// Length as a product of generators and their inverses.
    pub fn len(&self) -> u64 {
        self.letters.iter().map(|l| l.exp.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Same word re-tagged with a different strand count.
    pub fn with_context(&self, n: u32) -> Result<Self, WordError> {
        Word::new(n, self.letters.clone())
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.iter().all(|l| l.exp != 0) && self.letters.windows(2).all(|w| w[0].gen != w[1].gen)
    }

    /// The unique freely reduced form.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for l in &self.letters {
            push_letter(&mut out, *l);
        }
        Word { n: self.n, letters: out }
    }

    pub fn inverse(&self) -> Word {
        let letters = self.letters.iter().rev().map(|l| Letter::new(l.gen, -l.exp)).collect();
        Word { n: self.n, letters }
    }

    /// Reduced product `self * other`.
    pub fn mul(&self, other: &Word) -> Word {
        debug_assert_eq!(self.n, other.n, "word context mismatch");
        let mut out = self.free_reduce().letters;
        for l in &other.letters {
            push_letter(&mut out, *l);
        }
        Word { n: self.n, letters: out }
    }

    /// Unreduced concatenation.
    pub fn concat(&self, other: &Word) -> Word {
        debug_assert_eq!(self.n, other.n, "word context mismatch");
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { n: self.n, letters }
    }

    /// Reduced product of several words.
    pub fn product<'a>(n: u32, words: impl IntoIterator<Item = &'a Word>) -> Word {
        words.into_iter().fold(Word::identity(n), |acc, w| acc.mul(w))
    }

    /// Reduced `self^e`.
    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.n);
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `self * other * self^-1`, reduced.
    pub fn conjugate(&self, other: &Word) -> Word {
        self.mul(other).mul(&self.inverse())
    }

    /// Replaces every occurrence of `target^e` by `replacement^e`; the
    /// result is freely reduced.
    pub fn substitute(&self, target: Generator, replacement: &Word) -> Word {
        self.map_generators(|g| if g == target { Some(replacement.clone()) } else { None })
    }

    /// Applies the free-group endomorphism sending each generator `g` to
    /// `image(g)` (or to itself when `image` returns `None`).
    pub fn map_generators(&self, mut image: impl FnMut(Generator) -> Option<Word>) -> Word {
        let mut out = Vec::new();
        for l in &self.letters {
            match image(l.gen) {
                None => push_letter(&mut out, *l),
                Some(w) => {
                    let piece = w.pow(l.exp);
                    for pl in piece.letters {
                        push_letter(&mut out, pl);
                    }
                }
            }
        }
        Word { n: self.n, letters: out }
    }

    /// Exponent sums per generator (zero entries omitted).
    pub fn abelianize(&self) -> BTreeMap<Generator, i64> {
        let mut sums = BTreeMap::new();
        for l in &self.letters {
            *sums.entry(l.gen).or_insert(0i64) += l.exp;
        }
        sums.retain(|_, e| *e != 0);
        sums
    }

    /// Exponent-sum vector indexed by `gens`. Generators of the word that
    /// are missing from `gens` are ignored.
    pub fn abelianize_over(&self, gens: &[Generator]) -> Vec<i64> {
        let sums = self.abelianize();
        gens.iter().map(|g| sums.get(g).copied().unwrap_or(0)).collect()
    }

    /// Expands runs into single letters with exponent `+1` or `-1`.
    pub fn unit_letters(&self) -> Vec<(Generator, i8)> {
        let mut out = Vec::with_capacity(self.len() as usize);
        for l in &self.letters {
            let s = if l.exp > 0 { 1 } else { -1 };
            for _ in 0..l.exp.unsigned_abs() {
                out.push((l.gen, s));
            }
        }
        out
    }

    /// Inverse of [`Word::unit_letters`] (runs are merged, so the result is
    /// reduced whenever the input sequence is).
    pub fn from_unit_letters(n: u32, units: &[(Generator, i8)]) -> Word {
        let mut out = Vec::new();
        for &(g, s) in units {
            push_letter(&mut out, Letter::new(g, s as i64));
        }
        Word { n, letters: out }
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.letters.iter().map(|l| l.gen)
    }
}

fn push_letter(out: &mut Vec<Letter>, l: Letter) {
    if l.exp == 0 {
        return;
    }
    if let Some(top) = out.last_mut() {
        if top.gen == l.gen {
            let e = top.exp.checked_add(l.exp).expect("word exponent overflow");
            if e == 0 {
                out.pop();
            } else {
                top.exp = e;
            }
            return;
        }
    }
    out.push(l);
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, l) in self.letters.iter().enumerate() {
            if idx > 0 {
                f.write_str(" . ")?;
            }
            write!(f, "{}", l.gen)?;
            if l.exp != 1 {
                write!(f, "^{}", l.exp)?;
            }
        }
        Ok(())
    }
}

/// Parses the word grammar
///
/// ```text
/// word := term ("." term)*
/// term := atom ("^" int)?
/// atom := "rho[" int "]" | "B[" int "," int "]" | "A[" int "]"
/// ```
///
/// Whitespace between tokens is ignored and the empty string is the
/// identity. The result is not reduced.
pub fn parse_word(text: &str, n: u32) -> Result<Word, WordError> {
    if text.trim() == "1" {
        return Ok(Word::identity(n));
    }
    let mut p = Parser::new(text);
    let mut letters = Vec::new();
    p.skip_ws();
    if p.at_end() {
        return Ok(Word::identity(n));
    }
    loop {
        let (gen, exp) = p.term()?;
        gen.validate(n)?;
        letters.push(Letter::new(gen, exp));
        p.skip_ws();
        if p.at_end() {
            break;
        }
        p.expect(".")?;
    }
    Ok(Word { n, letters })
}

/// Parses a comma-separated list of atoms, as used by the `gens:` line of
/// the presentation format.
pub fn parse_generator_list(text: &str, n: u32) -> Result<Vec<Generator>, WordError> {
    let mut p = Parser::new(text);
    let mut gens = Vec::new();
    p.skip_ws();
    if p.at_end() {
        return Ok(gens);
    }
    loop {
        let g = p.atom()?;
        g.validate(n)?;
        gens.push(g);
        p.skip_ws();
        if p.at_end() {
            break;
        }
        p.expect(",")?;
    }
    Ok(gens)
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    idx: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { chars: src.char_indices().collect(), idx: 0, _src: src }
    }

    fn at_end(&self) -> bool {
        self.idx >= self.chars.len()
    }

    fn pos(&self) -> usize {
        self.chars
            .get(self.idx)
            .map(|c| c.0)
            .unwrap_or_else(|| self.chars.last().map(|c| c.0 + c.1.len_utf8()).unwrap_or(0))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).map(|c| c.1)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.idx += 1;
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, WordError> {
        Err(WordError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, tok: &str) -> bool {
        let n = tok.chars().count();
        if self.idx + n > self.chars.len() {
            return false;
        }
        let matches = self.chars[self.idx..self.idx + n].iter().map(|c| c.1).eq(tok.chars());
        if matches {
            self.idx += n;
        }
        matches
    }

    fn expect(&mut self, tok: &str) -> Result<(), WordError> {
        self.skip_ws();
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn int(&mut self) -> Result<i64, WordError> {
        self.skip_ws();
        let start = self.pos();
        let mut s = String::new();
        if self.peek() == Some('-') {
            s.push('-');
            self.idx += 1;
        }
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            s.push(c);
            self.idx += 1;
        }
        if s.is_empty() || s == "-" {
            return Err(WordError::Syntax { pos: start, msg: "expected an integer".into() });
        }
        // Exponents are capped well inside i64 so that merging runs cannot overflow.
        match s.parse::<i64>() {
            Ok(v) if v.unsigned_abs() <= u32::MAX as u64 => Ok(v),
            _ => Err(WordError::Syntax { pos: start, msg: format!("integer `{s}` out of range") }),
        }
    }

    fn index(&mut self) -> Result<u32, WordError> {
        let start = self.pos();
        let v = self.int()?;
        u32::try_from(v).map_err(|_| WordError::Syntax { pos: start, msg: format!("index {v} must be nonnegative") })
    }

    fn atom(&mut self) -> Result<Generator, WordError> {
        self.skip_ws();
        if self.eat("rho") {
            self.expect("[")?;
            let k = self.index()?;
            self.expect("]")?;
            Ok(Generator::Rho(k))
        } else if self.eat("B") {
            self.expect("[")?;
            let i = self.index()?;
            self.expect(",")?;
            let j = self.index()?;
            self.expect("]")?;
            Ok(Generator::B(i, j))
        } else if self.eat("A") {
            self.expect("[")?;
            let i = self.index()?;
            self.expect("]")?;
            Ok(Generator::A(i))
        } else {
            self.err("expected `rho[`, `B[` or `A[`")
        }
    }

    fn term(&mut self) -> Result<(Generator, i64), WordError> {
        let gen = self.atom()?;
        self.skip_ws();
        let mut exp = 1;
        if self.eat("^") {
            let pos = self.pos();
            exp = self.int()?;
            if exp == 0 {
                return Err(WordError::Syntax { pos, msg: "exponent must be nonzero".into() });
            }
        }
        Ok((gen, exp))
    }
}
