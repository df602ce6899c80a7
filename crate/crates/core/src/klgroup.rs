//! Exact arithmetic in `K/L = Z^{n-1} x| Z` and in the Klein-bottle group.
//!
//! An element is kept in the normal form `rho_{n+1}^{m0} A_1^{v_1} ... A_{n-1}^{v_{n-1}}`,
//! and `rho_{n+1}` acts on the `A_i` by inversion, so
//! `(a, v) * (b, w) = (a + b, eps(b) v + w)`.
//!
//! Conjugation by the generators of `P_n(RP^2)` (lifted to `P_{n+1}(RP^2)/L`)
//! is an automorphism of `K/L`:
//!
//! * `B_{i,j}` acts trivially;
//! * `rho_i` (`i < n`) fixes every `A_j` and sends `rho_{n+1}^k` to `rho_{n+1}^k A_i^{delta(k)}`;
//! * `rho_n` fixes every `A_j` and sends `rho_{n+1}^k` to
//!   `rho_{n+1}^{-k} A_1^{-delta(k)} ... A_{n-1}^{-delta(k)}`.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::words::{Generator, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(x: &BigInt) -> Parity {
        if x.is_even() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn from_bit(odd: bool) -> Parity {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// `1` if even, `-1` if odd.
    pub fn eps(self) -> i64 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    /// `0` if even, `-1` if odd.
    pub fn delta(self) -> i64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => -1,
        }
    }
}

pub fn eps(x: &BigInt) -> i64 {
    Parity::of(x).eps()
}

pub fn delta(x: &BigInt) -> i64 {
    Parity::of(x).delta()
}

/// Exponent sign of a conjugating generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(exp: i64) -> Sign {
        if exp < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KlError {
    #[error("K/L elements have different strand counts ({0} and {1})")]
    ContextMismatch(u32, u32),
    #[error("K/L needs n >= 2, got {0}")]
    TooFewStrands(u32),
    #[error("{gen} is not a generator of P_{n}(RP^2)")]
    NotBaseGenerator { gen: Generator, n: u32 },
    #[error("{gen} is not in the kernel alphabet for n={n}")]
    ForeignSymbol { gen: Generator, n: u32 },
    #[error("word does not lie in K/L: its image in P_n(RP^2) is {0}")]
    NontrivialTail(String),
}

/// `rho_{n+1}^{m0} A_1^{v_1} ... A_{n-1}^{v_{n-1}}` in `K/L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KlElement {
    n: u32,
    pub m0: BigInt,
    pub v: Vec<BigInt>,
}

impl KlElement {
    pub fn identity(n: u32) -> Self {
        KlElement { n, m0: BigInt::zero(), v: vec![BigInt::zero(); (n as usize).saturating_sub(1)] }
    }

    /// Panics if `v` does not have length `n - 1`.
    pub fn new(n: u32, m0: impl Into<BigInt>, v: Vec<BigInt>) -> Self {
        assert_eq!(v.len() + 1, n as usize, "K/L vector must have length n-1");
        KlElement { n, m0: m0.into(), v }
    }

    pub fn from_i64(n: u32, m0: i64, v: &[i64]) -> Self {
        KlElement::new(n, m0, v.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// `rho_{n+1}^k`.
    pub fn rho(n: u32, k: i64) -> Self {
        let mut x = KlElement::identity(n);
        x.m0 = BigInt::from(k);
        x
    }

    /// `A_i^e`, `1 <= i <= n-1`.
    pub fn a(n: u32, i: u32, e: i64) -> Self {
        let mut x = KlElement::identity(n);
        x.v[(i - 1) as usize] = BigInt::from(e);
        x
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_identity(&self) -> bool {
        self.m0.is_zero() && self.v.iter().all(Zero::is_zero)
    }

    pub fn checked_mul(&self, other: &KlElement) -> Result<KlElement, KlError> {
        if self.n != other.n {
            return Err(KlError::ContextMismatch(self.n, other.n));
        }
        let e = eps(&other.m0);
        let v = self.v.iter().zip(&other.v).map(|(a, b)| a * e + b).collect();
        Ok(KlElement { n: self.n, m0: &self.m0 + &other.m0, v })
    }

    pub fn inverse(&self) -> KlElement {
        let e = eps(&self.m0);
        KlElement { n: self.n, m0: -&self.m0, v: self.v.iter().map(|x| -(x * e)).collect() }
    }

    pub fn pow(&self, k: i64) -> KlElement {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = KlElement::identity(self.n);
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// The element as a word `rho[n+1]^m0 . A[1]^v1 ...` in context `n`.
    pub fn to_word(&self) -> Word {
        let mut pairs = Vec::new();
        let small = |x: &BigInt| i64::try_from(x).expect("exponent does not fit in a word letter");
        pairs.push((Generator::Rho(self.n + 1), small(&self.m0)));
        for (idx, x) in self.v.iter().enumerate() {
            pairs.push((Generator::A(idx as u32 + 1), small(x)));
        }
        Word::from_pairs(self.n, &pairs)
    }
}

impl Mul for &KlElement {
    type Output = KlElement;

    fn mul(self, rhs: &KlElement) -> KlElement {
        self.checked_mul(rhs).expect("K/L context mismatch")
    }
}

impl fmt::Display for KlElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.m0.is_zero() {
            parts.push(power(&format!("rho[{}]", self.n + 1), &self.m0));
        }
        for (idx, x) in self.v.iter().enumerate() {
            if !x.is_zero() {
                parts.push(power(&format!("A[{}]", idx + 1), x));
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" . "))
        }
    }
}

fn power(base: &str, e: &BigInt) -> String {
    if e.is_one() {
        base.to_string()
    } else {
        format!("{base}^{e}")
    }
}

fn check_base_generator(gen: Generator, n: u32) -> Result<(), KlError> {
    let ok = match gen {
        Generator::B(i, j) => 1 <= i && i < j && j <= n,
        Generator::Rho(k) => 1 <= k && k <= n,
        Generator::A(_) => false,
    };
    if ok {
        Ok(())
    } else {
        Err(KlError::NotBaseGenerator { gen, n })
    }
}

/// Conjugation `x -> g^s x g^-s` by a generator `g` of `P_n(RP^2)`. Both
/// signs use their own closed formula; [`act_inverse_generic`] inverts the
/// `+1` action directly and must agree with the `-1` formula.
pub fn act(gen: Generator, sign: Sign, x: &KlElement) -> Result<KlElement, KlError> {
    let n = x.n;
    check_base_generator(gen, n)?;
    let s = sign.value();
    let mut out = x.clone();
    match gen {
        Generator::B(..) => {}
        Generator::Rho(k) if k < n => {
            let idx = (k - 1) as usize;
            out.v[idx] += delta(&x.m0) * s;
        }
        Generator::Rho(_) => {
            let shift = delta(&x.m0) * s;
            out.m0 = -&x.m0;
            for c in out.v.iter_mut() {
                *c -= shift;
            }
        }
        Generator::A(_) => unreachable!(),
    }
    Ok(out)
}

/// The inverse of the `+1` action, found by solving `act(g, +1, y) = x`
/// for `y` rather than by using the `-1` formula.
pub fn act_inverse_generic(gen: Generator, x: &KlElement) -> Result<KlElement, KlError> {
    let n = x.n;
    check_base_generator(gen, n)?;
    // act(g,+1,.) preserves |m0| and changes only v by a parity-determined shift,
    // so y has m0 = +-x.m0 and v = x.v minus the shift computed from y.m0.
    let y_m0 = match gen {
        Generator::Rho(k) if k == n => -&x.m0,
        _ => x.m0.clone(),
    };
    let probe = KlElement { n, m0: y_m0.clone(), v: vec![BigInt::zero(); x.v.len()] };
    let shifted = act(gen, Sign::Plus, &probe)?;
    let v = x.v.iter().zip(&shifted.v).map(|(a, b)| a - b).collect();
    Ok(KlElement { n, m0: y_m0, v })
}

/// Conjugation by a word `t_1 ... t_m` of `P_n(RP^2)`:
/// `x -> t_1 (... (t_m x t_m^-1) ...) t_1^-1`.
pub fn act_word(tail: &Word, x: &KlElement) -> Result<KlElement, KlError> {
    let mut out = x.clone();
    for l in tail.letters().iter().rev() {
        let sign = Sign::of(l.exp);
        for _ in 0..l.exp.unsigned_abs() {
            out = act(l.gen, sign, &out)?;
        }
    }
    Ok(out)
}

/// The value of a kernel letter of `P_{n+1}(RP^2)/L`, or `None` if `gen`
/// belongs to `P_n(RP^2)`. `B_{i,n+1}` (`i < n`) is `A_i`, and `B_{n,n+1}`
/// is eliminated through `B_{n,n+1} = A_{n-1}^-1 ... A_1^-1 rho_{n+1}^2`.
fn kernel_letter(gen: Generator, n: u32) -> Option<KlElement> {
    match gen {
        Generator::Rho(k) if k == n + 1 => Some(KlElement::rho(n, 1)),
        Generator::A(i) if 1 <= i && i < n => Some(KlElement::a(n, i, 1)),
        Generator::B(i, j) if j == n + 1 && 1 <= i && i < n => Some(KlElement::a(n, i, 1)),
        Generator::B(i, j) if j == n + 1 && i == n => Some(b_n_np1(n)),
        _ => None,
    }
}

/// `B_{n,n+1} = A_{n-1}^-1 ... A_1^-1 rho_{n+1}^2`.
pub fn b_n_np1(n: u32) -> KlElement {
    let mut x = KlElement::identity(n);
    for i in (1..n).rev() {
        x = &x * &KlElement::a(n, i, -1);
    }
    &x * &KlElement::rho(n, 2)
}

/// Evaluates a word over the kernel alphabet `{rho_{n+1}, A_i, B_{i,n+1}}`.
pub fn kl_from_word(w: &Word) -> Result<KlElement, KlError> {
    let n = w.n();
    if n < 2 {
        return Err(KlError::TooFewStrands(n));
    }
    let mut acc = KlElement::identity(n);
    for l in w.letters() {
        let x = kernel_letter(l.gen, n).ok_or(KlError::ForeignSymbol { gen: l.gen, n })?;
        acc = &acc * &x.pow(l.exp);
    }
    Ok(acc)
}

/// Evaluates a word of `P_{n+1}(RP^2)/L` mixing kernel letters and
/// generators of `P_n(RP^2)`. Kernel factors are pushed to the left through
/// the accumulated `P_n` part, which must freely reduce to the identity.
pub fn eval_in_quotient(w: &Word) -> Result<KlElement, KlError> {
    let n = w.n();
    if n < 2 {
        return Err(KlError::TooFewStrands(n));
    }
    let mut head = KlElement::identity(n);
    let mut tail = Word::identity(n);
    for l in w.letters() {
        match kernel_letter(l.gen, n) {
            Some(x) => {
                let moved = act_word(&tail, &x.pow(l.exp))?;
                head = &head * &moved;
            }
            None => {
                check_base_generator(l.gen, n)?;
                tail = tail.mul(&Word::from_pairs(n, &[(l.gen, l.exp)]));
            }
        }
    }
    if tail.is_identity() {
        Ok(head)
    } else {
        Err(KlError::NontrivialTail(tail.to_string()))
    }
}

/// `rho^a B^b` in the Klein-bottle group `<B, rho | rho^-1 B rho = B^-1>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KleinElement {
    pub a: BigInt,
    pub b: BigInt,
}

impl KleinElement {
    pub fn identity() -> Self {
        KleinElement { a: BigInt::zero(), b: BigInt::zero() }
    }

    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        KleinElement { a: a.into(), b: b.into() }
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn mul(&self, other: &KleinElement) -> KleinElement {
        KleinElement { a: &self.a + &other.a, b: &self.b * eps(&other.a) + &other.b }
    }

    pub fn inverse(&self) -> KleinElement {
        KleinElement { a: -&self.a, b: -(&self.b * eps(&self.a)) }
    }

    pub fn pow(&self, k: i64) -> KleinElement {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(KleinElement::identity(), |acc, _| acc.mul(&base))
    }
}

impl fmt::Display for KleinElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// Projects a word in the free group on `{b_gen, rho_gen}` onto the
/// Klein-bottle group. Any other symbol is an error.
pub fn klein_project(w: &Word, b_gen: Generator, rho_gen: Generator) -> Result<KleinElement, KlError> {
    let mut acc = KleinElement::identity();
    for l in w.letters() {
        let x = if l.gen == b_gen {
            KleinElement::new(0, 1)
        } else if l.gen == rho_gen {
            KleinElement::new(1, 0)
        } else {
            return Err(KlError::ForeignSymbol { gen: l.gen, n: w.n() });
        };
        acc = acc.mul(&x.pow(l.exp));
    }
    Ok(acc)
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, id: impl Into<String>, lhs: impl fmt::Display, rhs: impl fmt::Display, pass: bool) {
        self.checks.push(Check { id: id.into(), pass, lhs: lhs.to_string(), rhs: rhs.to_string() });
    }

    /// Records an equality check between two displayable values.
    pub fn check_eq<T: PartialEq + fmt::Display>(&mut self, id: impl Into<String>, lhs: &T, rhs: &T) {
        self.push(id, lhs, rhs, lhs == rhs);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "check {}: {} lhs={} rhs={}", c.id, if c.pass { "PASS" } else { "FAIL" }, c.lhs, c.rhs)?;
        }
        Ok(())
    }
}

fn parse_kernel(n: u32, pairs: &[(Generator, i64)]) -> Result<KlElement, KlError> {
    eval_in_quotient(&Word::from_pairs(n, pairs))
}

/// Evaluates the identities that hold in `P_{n+1}(RP^2)/L` as consequences of
/// its defining relations, each side computed independently.
pub fn verify_quotient_relations(n: u32) -> Result<Report, KlError> {
    use Generator::{Rho, A, B};
    if n < 3 {
        return Err(KlError::TooFewStrands(n));
    }
    let r = n + 1;
    let mut rep = Report::default();
    let a = |i: u32, e: i64| KlElement::a(n, i, e);
    let rho = |k: i64| KlElement::rho(n, k);

    for i in 1..n {
        for j in i + 1..n {
            let conj = act(Rho(j), Sign::Plus, &a(i, 1))?;
            let long = parse_kernel(
                n,
                &[
                    (Rho(r), -1),
                    (A(j), -1),
                    (Rho(r), 1),
                    (A(j), -1),
                    (A(i), 1),
                    (A(j), 1),
                    (Rho(r), -1),
                    (A(j), 1),
                    (Rho(r), 1),
                ],
            )?;
            rep.check_eq(format!("rhoj-Ai[i={i},j={j}]/conj"), &conj, &a(i, 1));
            rep.check_eq(format!("rhoj-Ai[i={i},j={j}]/word"), &long, &a(i, 1));
            let ai_aj = &a(i, 1) * &a(j, 1);
            rep.check_eq(format!("Ai-Aj-commute[i={i},j={j}]"), &ai_aj, &(&a(j, 1) * &a(i, 1)));
        }
    }
    for i in 1..n {
        let conj = &(&rho(1) * &a(i, 1)) * &rho(-1);
        let via_rho_i = parse_kernel(n, &[(A(i), 1), (Rho(i), -1), (A(i), -1), (Rho(i), 1), (A(i), -1)])?;
        rep.check_eq(format!("rho-Ai[i={i}]/conj"), &conj, &a(i, -1));
        rep.check_eq(format!("rho-Ai[i={i}]/word"), &via_rho_i, &a(i, -1));
        let back = act(Rho(i), Sign::Plus, &a(i, 1))?;
        rep.check_eq(format!("rhoi-Ai[i={i}]"), &back, &a(i, 1));
    }
    for i in 1..n {
        let conj = act(Rho(i), Sign::Plus, &rho(1))?;
        let w1 = parse_kernel(n, &[(Rho(r), -1), (A(i), -1), (Rho(r), 2)])?;
        let w2 = &a(i, 1) * &rho(1);
        let w3 = &rho(1) * &a(i, -1);
        rep.check_eq(format!("rhoi-rho[i={i}]/kernel-form"), &conj, &w1);
        rep.check_eq(format!("rhoi-rho[i={i}]/Ai-rho"), &conj, &w2);
        rep.check_eq(format!("rhoi-rho[i={i}]/rho-Ai^-1"), &conj, &w3);
        let sq = act(Rho(i), Sign::Plus, &rho(2))?;
        rep.check_eq(format!("rhoi-commutes-rho^2[i={i}]"), &sq, &rho(2));
    }
    {
        let conj = act(Rho(n), Sign::Plus, &rho(1))?;
        let via_b = parse_kernel(n, &[(Rho(r), -1), (B(n, r), -1), (Rho(r), 2)])?;
        let mut expanded = vec![(Rho(r), -1), (Rho(r), -2)];
        expanded.extend((1..n).map(|i| (A(i), 1)));
        expanded.push((Rho(r), 2));
        let expanded = parse_kernel(n, &expanded)?;
        let mut fin: Vec<(Generator, i64)> = (1..n).map(|i| (A(i), -1)).collect();
        fin.push((Rho(r), -1));
        let fin = parse_kernel(n, &fin)?;
        rep.check_eq("rhon-rho/B-form", &conj, &via_b);
        rep.check_eq("rhon-rho/expanded", &conj, &expanded);
        rep.check_eq("rhon-rho/final", &conj, &fin);
        let sq = act(Rho(n), Sign::Plus, &rho(2))?;
        rep.check_eq("rhon-rho^2", &sq, &rho(-2));
    }
    for i in 1..n {
        let conj = act(Rho(n), Sign::Plus, &a(i, 1))?;
        let long = parse_kernel(
            n,
            &[
                (Rho(r), -1),
                (B(n, r), -1),
                (Rho(r), 1),
                (B(n, r), -1),
                (A(i), 1),
                (B(n, r), 1),
                (Rho(r), -1),
                (B(n, r), 1),
                (Rho(r), 1),
            ],
        )?;
        rep.check_eq(format!("rhon-Ai[i={i}]/conj"), &conj, &a(i, 1));
        rep.check_eq(format!("rhon-Ai[i={i}]/word"), &long, &a(i, 1));
    }
    // The parity formulas, against repeated single-step conjugation.
    for k in -4i64..=4 {
        for i in 1..n {
            let conj_ai = &(&rho(k) * &a(i, 1)) * &rho(-k);
            rep.check_eq(format!("rho^k-Ai[i={i},k={k}]"), &conj_ai, &a(i, eps(&k.into())));

            let step = act(Rho(i), Sign::Plus, &rho(1))?.pow(k);
            let formula = &rho(k) * &a(i, delta(&k.into()));
            rep.check_eq(format!("rhoi-rho^k[i={i},k={k}]"), &step, &formula);
            let step_inv = act(Rho(i), Sign::Minus, &rho(1))?.pow(k);
            let formula_inv = &rho(k) * &a(i, -delta(&k.into()));
            rep.check_eq(format!("rhoi^-1-rho^k[i={i},k={k}]"), &step_inv, &formula_inv);
        }
        let d = delta(&k.into());
        let step = act(Rho(n), Sign::Plus, &rho(1))?.pow(k);
        let formula = (1..n).fold(rho(-k), |acc, i| &acc * &a(i, -d));
        rep.check_eq(format!("rhon-rho^k[k={k}]"), &step, &formula);
        let step_inv = act(Rho(n), Sign::Minus, &rho(1))?.pow(k);
        let formula_inv = (1..n).fold(rho(-k), |acc, i| &acc * &a(i, d));
        rep.check_eq(format!("rhon^-1-rho^k[k={k}]"), &step_inv, &formula_inv);
    }
    Ok(rep)
}

/// Substitution tables used by the injectivity argument for `K/L`: the
/// projection `pi_i` onto the strands `i`, `n`, `n+1`, and conjugation by
/// `rho_i`, `rho_n` on the free group `F_2(B_{i,n+1}, rho_{n+1})`.
pub struct KleinImages {
    n: u32,
    i: u32,
}

impl KleinImages {
    pub fn new(i: u32, n: u32) -> Result<Self, KlError> {
        if n < 3 {
            return Err(KlError::TooFewStrands(n));
        }
        if !(1 <= i && i < n) {
            return Err(KlError::ForeignSymbol { gen: Generator::B(i, n + 1), n });
        }
        Ok(KleinImages { n, i })
    }

    fn w(&self, pairs: &[(Generator, i64)]) -> Word {
        Word::from_pairs(self.n, pairs)
    }

    pub fn b(&self, l: u32) -> Generator {
        Generator::B(l, self.n + 1)
    }

    pub fn rho(&self) -> Generator {
        Generator::Rho(self.n + 1)
    }

    /// `c_{j,k} = [B_{j,n+1}, B_{k,n+1}]`.
    pub fn c(&self, j: u32, k: u32) -> Word {
        self.w(&[(self.b(j), 1), (self.b(k), 1), (self.b(j), -1), (self.b(k), -1)])
    }

    /// `d_j = B_{j,n+1} rho^-1 B_{j,n+1} rho`.
    pub fn d(&self, j: u32) -> Word {
        let (b, r) = (self.b(j), self.rho());
        self.w(&[(b, 1), (r, -1), (b, 1), (r, 1)])
    }

    /// `e_{j,k} = B_j rho^-1 B_k^-1 rho B_k^-1 B_j^-1 B_k rho^-1 B_k rho`.
    pub fn e(&self, j: u32, k: u32) -> Word {
        let (bj, bk, r) = (self.b(j), self.b(k), self.rho());
        self.w(&[(bj, 1), (r, -1), (bk, -1), (r, 1), (bk, -1), (bj, -1), (bk, 1), (r, -1), (bk, 1), (r, 1)])
    }

    /// `h_i = B_{i,n+1} rho^-1 B_{i,n+1} rho`.
    pub fn h(&self) -> Word {
        self.d(self.i)
    }

    /// `B_{n,n+1} = B_{i,n+1}^-1 rho^2` in the three-strand quotient.
    pub fn b_n_replacement(&self) -> Word {
        self.w(&[(self.b(self.i), -1), (self.rho(), 2)])
    }

    /// `pi_i`: kills `B_{l,n+1}` for `l` not in `{i, n}`, then eliminates
    /// `B_{n,n+1}`.
    pub fn project(&self, word: &Word) -> Word {
        let (n, i) = (self.n, self.i);
        let killed = word.map_generators(|g| match g {
            Generator::B(l, j) if j == n + 1 && l != i && l != n => Some(Word::identity(n)),
            _ => None,
        });
        killed.substitute(self.b(n), &self.b_n_replacement())
    }

    /// Conjugation by `rho_k` on `rho_{n+1}` and the `B_{l,n+1}`, as words
    /// of `P_{n+1}(RP^2)` (before projecting).
    pub fn conjugate_by_rho(&self, k: u32, word: &Word) -> Word {
        let n = self.n;
        let r = self.rho();
        let image = |g: Generator| -> Option<Word> {
            match g {
                Generator::Rho(x) if x == n + 1 => Some(self.w(&[(r, -1), (self.b(k), -1), (r, 2)])),
                Generator::B(l, j) if j == n + 1 => Some(if k < l {
                    self.w(&[(self.b(l), 1)])
                } else if k == l {
                    self.w(&[(r, -1), (self.b(l), -1), (r, 1)])
                } else {
                    let (bk, bl) = (self.b(k), self.b(l));
                    self.w(&[(r, -1), (bk, -1), (r, 1), (bk, -1), (bl, 1), (bk, 1), (r, -1), (bk, 1), (r, 1)])
                }),
                _ => None,
            }
        };
        word.map_generators(image)
    }
}

/// Replays the computations showing that the only generators of `L` that
/// survive `pi_i` are `d_i` and `e_{i,n}`, that `pi_i(e_{i,n})` is a product
/// of conjugates of `h_i^{+-1}`, and that `rho_i`, `rho_n` conjugate `h_i` into
/// conjugates of `h_i^{+-1}` inside `F_2(B_{i,n+1}, rho_{n+1})`.
pub fn verify_prop_klein_images(i: u32, n: u32) -> Result<Report, KlError> {
    let k = KleinImages::new(i, n)?;
    let mut rep = Report::default();
    let id = Word::identity(n);
    let tag = |s: &str| format!("{s}[i={i},n={n}]");

    for j in 1..n {
        for l in j + 1..n {
            rep.check_eq(tag(&format!("pi(c{j},{l})")), &k.project(&k.c(j, l)), &id);
        }
    }
    for j in (1..n).filter(|&j| j != i) {
        rep.check_eq(tag(&format!("pi(d{j})")), &k.project(&k.d(j)), &id);
    }
    for j in 1..=n {
        for l in j + 1..=n {
            if (j, l) != (i, n) {
                rep.check_eq(tag(&format!("pi(e{j},{l})")), &k.project(&k.e(j, l)), &id);
            }
        }
    }
    let h = k.h();
    rep.check_eq(tag("pi(d_i)=h"), &k.project(&k.d(i)), &h);

    let (b, r) = (k.b(i), k.rho());
    let w = |pairs: &[(Generator, i64)]| Word::from_pairs(n, pairs);
    let rb = w(&[(b, 1), (r, 1)]);
    let conj = |x: &Word, y: &Word| x.conjugate(y);
    let expected_e = Word::product(
        n,
        [&h, &conj(&rb.inverse(), &h.inverse()), &conj(&w(&[(r, -2)]), &h), &conj(&w(&[(r, -3)]), &h.inverse())],
    );
    rep.check_eq(tag("pi(e_i,n)"), &k.project(&k.e(i, n)), &expected_e);

    let rho_i_h = k.project(&k.conjugate_by_rho(i, &h));
    rep.check_eq(tag("rho_i h rho_i^-1"), &rho_i_h, &conj(&rb.inverse(), &h.inverse()));
    let rho_n_h = k.project(&k.conjugate_by_rho(n, &h));
    rep.check_eq(tag("rho_n h rho_n^-1"), &rho_n_h, &conj(&w(&[(r, -3)]), &h));

    let kh = klein_project(&h, b, r)?;
    rep.check_eq(tag("klein(h)"), &kh, &KleinElement::identity());
    Ok(rep)
}
