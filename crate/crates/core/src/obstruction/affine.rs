//! Integer affine expressions over the unknown section coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::klgroup::Parity;

use super::ObstructionError;

/// An unknown integer. `Alpha { i, k }` and `Beta { i, j, k }` are the
/// exponents of `A_k` (or of `rho_{n+1}` when `k = 0`) in the section images of
/// `rho_i` and `B_{i,j}`; `Slack` unknowns carry parity side conditions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Unknown {
    Alpha { i: u32, k: u32 },
    Beta { i: u32, j: u32, k: u32 },
    Slack(u32),
    Named(String),
}

impl Unknown {
    /// Whether the unknown is a `rho_{n+1}` exponent.
    pub fn is_m0(&self) -> bool {
        matches!(self, Unknown::Alpha { k: 0, .. } | Unknown::Beta { k: 0, .. })
    }
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unknown::Alpha { i, k } => write!(f, "alpha[{i},{k}]"),
            Unknown::Beta { i, j, k } => write!(f, "beta[{i},{j},{k}]"),
            Unknown::Slack(s) => write!(f, "s[{s}]"),
            Unknown::Named(name) => f.write_str(name),
        }
    }
}

/// `constant + sum coeff * unknown`, kept free of zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AffineExpr {
    constant: BigInt,
    terms: BTreeMap<Unknown, BigInt>,
}

impl AffineExpr {
    pub fn zero() -> Self {
        AffineExpr::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        AffineExpr { constant: c.into(), terms: BTreeMap::new() }
    }

    pub fn var(u: Unknown) -> Self {
        AffineExpr::term(u, 1)
    }

    pub fn term(u: Unknown, coeff: impl Into<BigInt>) -> Self {
        let mut e = AffineExpr::zero();
        e.add_term(u, coeff.into());
        e
    }

    pub fn constant_term(&self) -> &BigInt {
        &self.constant
    }

    pub fn terms(&self) -> &BTreeMap<Unknown, BigInt> {
        &self.terms
    }

    pub fn coeff(&self, u: &Unknown) -> BigInt {
        self.terms.get(u).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn unknowns(&self) -> impl Iterator<Item = &Unknown> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, u: Unknown, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(u) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn add_constant(&mut self, c: impl Into<BigInt>) {
        self.constant += c.into();
    }

    pub fn scale(&self, k: &BigInt) -> AffineExpr {
        if k.is_zero() {
            return AffineExpr::zero();
        }
        AffineExpr { constant: &self.constant * k, terms: self.terms.iter().map(|(u, c)| (u.clone(), c * k)).collect() }
    }

    /// Gcd of the coefficients (zero for a constant expression).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides through by the content when it divides the constant;
    /// otherwise returns the expression unchanged.
    pub fn normalized(&self) -> AffineExpr {
        let g = self.content();
        if g.is_zero() || g.is_one() || !self.constant.is_multiple_of(&g) {
            return self.clone();
        }
        AffineExpr {
            constant: &self.constant / &g,
            terms: self.terms.iter().map(|(u, c)| (u.clone(), c / &g)).collect(),
        }
    }

    /// Replaces `u` by `replacement`.
    pub fn substitute(&self, u: &Unknown, replacement: &AffineExpr) -> AffineExpr {
        match self.terms.get(u) {
            None => self.clone(),
            Some(c) => {
                let mut rest = self.clone();
                rest.terms.remove(u);
                rest + replacement.scale(c)
            }
        }
    }

    /// Evaluates with every unknown not in `values` taken as zero.
    pub fn eval(&self, values: &BTreeMap<Unknown, BigInt>) -> BigInt {
        let mut acc = self.constant.clone();
        for (u, c) in &self.terms {
            if let Some(x) = values.get(u) {
                acc += c * x;
            }
        }
        acc
    }

    /// Parity under an assignment of the unknowns' parities.
    pub fn parity(&self, parity: &ParityAssignment) -> Result<Parity, ObstructionError> {
        let mut odd = self.constant.is_odd();
        for (u, c) in &self.terms {
            if c.is_odd() {
                odd ^= parity.get(u)?.is_odd();
            }
        }
        Ok(Parity::from_bit(odd))
    }
}

impl Add for AffineExpr {
    type Output = AffineExpr;

    fn add(mut self, rhs: AffineExpr) -> AffineExpr {
        self += rhs;
        self
    }
}

impl AddAssign for AffineExpr {
    fn add_assign(&mut self, rhs: AffineExpr) {
        self.constant += rhs.constant;
        for (u, c) in rhs.terms {
            self.add_term(u, c);
        }
    }
}

impl Sub for AffineExpr {
    type Output = AffineExpr;

    fn sub(self, rhs: AffineExpr) -> AffineExpr {
        self + (-rhs)
    }
}

impl SubAssign for AffineExpr {
    fn sub_assign(&mut self, rhs: AffineExpr) {
        *self += -rhs;
    }
}

impl Neg for AffineExpr {
    type Output = AffineExpr;

    fn neg(self) -> AffineExpr {
        AffineExpr { constant: -self.constant, terms: self.terms.into_iter().map(|(u, c)| (u, -c)).collect() }
    }
}

impl Mul<i64> for AffineExpr {
    type Output = AffineExpr;

    fn mul(self, k: i64) -> AffineExpr {
        self.scale(&BigInt::from(k))
    }
}

impl fmt::Display for AffineExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (u, c) in &self.terms {
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag.is_one() {
                write!(f, "{u}")?;
            } else {
                write!(f, "{mag}*{u}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant.is_negative() {
            write!(f, " - {}", self.constant.abs())
        } else if self.constant.is_positive() {
            write!(f, " + {}", self.constant)
        } else {
            Ok(())
        }
    }
}

/// Parities of the `rho_{n+1}`-exponent unknowns.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParityAssignment {
    bits: BTreeMap<Unknown, Parity>,
}

impl ParityAssignment {
    pub fn new() -> Self {
        ParityAssignment::default()
    }

    pub fn set(&mut self, u: Unknown, p: Parity) {
        self.bits.insert(u, p);
    }

    pub fn get(&self, u: &Unknown) -> Result<Parity, ObstructionError> {
        self.bits.get(u).copied().ok_or_else(|| ObstructionError::MissingParity(u.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Unknown, &Parity)> {
        self.bits.iter()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl FromIterator<(Unknown, Parity)> for ParityAssignment {
    fn from_iter<T: IntoIterator<Item = (Unknown, Parity)>>(iter: T) -> Self {
        ParityAssignment { bits: iter.into_iter().collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(i: u32, k: u32) -> Unknown {
        Unknown::Alpha { i, k }
    }

    #[test]
    fn arithmetic_is_canonical() {
        let e = AffineExpr::var(a(1, 0)) + AffineExpr::constant(3) - AffineExpr::var(a(1, 0));
        assert_eq!(e, AffineExpr::constant(3));
        assert!(e.terms().is_empty());
        let f = AffineExpr::term(a(2, 1), 2) - AffineExpr::term(a(1, 0), 1) + AffineExpr::constant(-4);
        assert_eq!(f.to_string(), "-alpha[1,0] + 2*alpha[2,1] - 4");
        assert_eq!(f.clone() * 2 - f.clone() - f.clone(), AffineExpr::zero());
        assert_eq!(-(-f.clone()), f);
    }

    #[test]
    fn content_and_normalization() {
        let e = AffineExpr::term(a(1, 0), 2) + AffineExpr::term(a(2, 0), -4) + AffineExpr::constant(6);
        assert_eq!(e.content(), BigInt::from(2));
        assert_eq!(e.normalized().to_string(), "alpha[1,0] - 2*alpha[2,0] + 3");
        let g = AffineExpr::term(a(1, 0), 2) + AffineExpr::constant(1);
        assert_eq!(g.normalized(), g);
    }

    #[test]
    fn parity_and_eval() {
        let e = AffineExpr::term(a(1, 0), 3) + AffineExpr::term(a(2, 0), 2) + AffineExpr::constant(1);
        let p: ParityAssignment = [(a(1, 0), Parity::Odd), (a(2, 0), Parity::Odd)].into_iter().collect();
        assert_eq!(e.parity(&p).unwrap(), Parity::Even);
        let missing = AffineExpr::var(a(3, 0));
        assert!(matches!(missing.parity(&p), Err(ObstructionError::MissingParity(_))));
        let vals = BTreeMap::from([(a(1, 0), BigInt::from(5)), (a(2, 0), BigInt::from(-1))]);
        assert_eq!(e.eval(&vals), BigInt::from(14));
    }

    #[test]
    fn substitution() {
        let e = AffineExpr::term(a(1, 0), 2) + AffineExpr::var(a(2, 0));
        let r = AffineExpr::var(a(3, 0)) + AffineExpr::constant(1);
        assert_eq!(e.substitute(&a(1, 0), &r).to_string(), "alpha[2,0] + 2*alpha[3,0] + 2");
        assert_eq!(e.substitute(&a(5, 0), &r), e);
    }
}
