//! `K/L` elements whose exponents are affine expressions in the section
//! coefficients, and the images of words under a hypothetical section.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::klgroup::{KlElement, Sign};
use crate::words::{Generator, Word};

use super::affine::{AffineExpr, ParityAssignment, Unknown};
use super::ObstructionError;

/// `rho_{n+1}^{m0} A_1^{v_1} ... A_{n-1}^{v_{n-1}}` with symbolic exponents.
/// Products and actions need the parities of the `rho_{n+1}` exponents
/// involved, taken from a [`ParityAssignment`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicKl {
    n: u32,
    pub m0: AffineExpr,
    pub v: Vec<AffineExpr>,
}

impl SymbolicKl {
    pub fn identity(n: u32) -> Self {
        SymbolicKl { n, m0: AffineExpr::zero(), v: vec![AffineExpr::zero(); (n as usize).saturating_sub(1)] }
    }

    pub fn from_kl(x: &KlElement) -> Self {
        SymbolicKl {
            n: x.n(),
            m0: AffineExpr::constant(x.m0.clone()),
            v: x.v.iter().map(|c| AffineExpr::constant(c.clone())).collect(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn mul(&self, other: &SymbolicKl, parity: &ParityAssignment) -> Result<SymbolicKl, ObstructionError> {
        let e = other.m0.parity(parity)?.eps();
        let v = self.v.iter().zip(&other.v).map(|(a, b)| a.clone() * e + b.clone()).collect();
        Ok(SymbolicKl { n: self.n, m0: self.m0.clone() + other.m0.clone(), v })
    }

    pub fn inverse(&self, parity: &ParityAssignment) -> Result<SymbolicKl, ObstructionError> {
        let e = self.m0.parity(parity)?.eps();
        Ok(SymbolicKl { n: self.n, m0: -self.m0.clone(), v: self.v.iter().map(|a| a.clone() * -e).collect() })
    }

    /// Conjugation by `gen^sign`, `gen` a generator of `P_n(RP^2)`.
    pub fn act(&self, gen: Generator, sign: Sign, parity: &ParityAssignment) -> Result<SymbolicKl, ObstructionError> {
        let n = self.n;
        let mut out = self.clone();
        match gen {
            Generator::B(i, j) if 1 <= i && i < j && j <= n => {}
            Generator::Rho(k) if 1 <= k && k < n => {
                let d = self.m0.parity(parity)?.delta() * sign.value();
                out.v[(k - 1) as usize].add_constant(d);
            }
            Generator::Rho(k) if k == n => {
                let d = self.m0.parity(parity)?.delta() * sign.value();
                out.m0 = -self.m0.clone();
                for c in out.v.iter_mut() {
                    c.add_constant(-d);
                }
            }
            _ => return Err(ObstructionError::NotBaseGenerator { gen, n }),
        }
        Ok(out)
    }

    /// Conjugation by a word of `P_n(RP^2)`, innermost letter last.
    pub fn act_word(&self, tail: &Word, parity: &ParityAssignment) -> Result<SymbolicKl, ObstructionError> {
        let mut out = self.clone();
        for (g, e) in tail.unit_letters().into_iter().rev() {
            out = out.act(g, Sign::of(i64::from(e)), parity)?;
        }
        Ok(out)
    }

    /// Substitutes integer values (missing unknowns are zero).
    pub fn instantiate(&self, values: &BTreeMap<Unknown, BigInt>) -> KlElement {
        KlElement::new(self.n, self.m0.eval(values), self.v.iter().map(|c| c.eval(values)).collect())
    }
}

impl fmt::Display for SymbolicKl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.v.iter().map(ToString::to_string).collect();
        write!(f, "({}; {})", self.m0, v.join(", "))
    }
}

/// The unknown coefficients `alpha_{i,k}` (`1 <= i <= n`) and `beta_{i,j,k}`
/// (`1 <= i < j <= n`), `0 <= k <= n-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectionCoefficients {
    n: u32,
}

impl SectionCoefficients {
    pub fn new(n: u32) -> Result<Self, ObstructionError> {
        if n < 2 {
            return Err(ObstructionError::TooFewStrands(n));
        }
        Ok(SectionCoefficients { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alpha(i: u32, k: u32) -> Unknown {
        Unknown::Alpha { i, k }
    }

    pub fn beta(i: u32, j: u32, k: u32) -> Unknown {
        Unknown::Beta { i, j, k }
    }

    /// The unknown(s) describing the image of `gen`, indexed by `k`.
    fn unknown(&self, gen: Generator, k: u32) -> Result<Unknown, ObstructionError> {
        let n = self.n;
        match gen {
            Generator::Rho(i) if 1 <= i && i <= n => Ok(Unknown::Alpha { i, k }),
            Generator::B(i, j) if 1 <= i && i < j && j <= n => Ok(Unknown::Beta { i, j, k }),
            _ => Err(ObstructionError::NotBaseGenerator { gen, n }),
        }
    }

    /// The `rho_{n+1}` exponents `alpha_{i,0}`, then `beta_{i,j,0}`.
    pub fn m0_unknowns(&self) -> Vec<Unknown> {
        let n = self.n;
        let mut out: Vec<Unknown> = (1..=n).map(|i| Unknown::Alpha { i, k: 0 }).collect();
        for i in 1..=n {
            for j in i + 1..=n {
                out.push(Unknown::Beta { i, j, k: 0 });
            }
        }
        out
    }

    pub fn all_unknowns(&self) -> Vec<Unknown> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 1..=n {
            out.extend((0..n).map(|k| Unknown::Alpha { i, k }));
        }
        for i in 1..=n {
            for j in i + 1..=n {
                out.extend((0..n).map(|k| Unknown::Beta { i, j, k }));
            }
        }
        out
    }

    /// Head of the section image of `gen` (exponent `+1`).
    pub fn head(&self, gen: Generator) -> Result<SymbolicKl, ObstructionError> {
        let m0 = AffineExpr::var(self.unknown(gen, 0)?);
        let v = (1..self.n).map(|k| self.unknown(gen, k).map(AffineExpr::var)).collect::<Result<_, _>>()?;
        Ok(SymbolicKl { n: self.n, m0, v })
    }

    /// `rho_{n+1}`-exponent of the head of `gen`.
    pub fn head_m0(&self, gen: Generator) -> Result<AffineExpr, ObstructionError> {
        Ok(AffineExpr::var(self.unknown(gen, 0)?))
    }
}

/// `s(gen^sign) = head * gen^sign`. For the negative sign,
/// `s(g^-1) = (H g)^-1 = g^-1 H^-1 = act_{g^-1}(H^-1) g^-1`.
pub fn section_image(
    gen: Generator,
    sign: Sign,
    coeffs: &SectionCoefficients,
    parity: &ParityAssignment,
) -> Result<(SymbolicKl, Word), ObstructionError> {
    let n = coeffs.n();
    let head = coeffs.head(gen)?;
    let tail = Word::from_pairs(n, &[(gen, sign.value())]);
    match sign {
        Sign::Plus => Ok((head, tail)),
        Sign::Minus => Ok((head.inverse(parity)?.act(gen, Sign::Minus, parity)?, tail)),
    }
}

/// Image of a word of `P_n(RP^2)` under the section, in head/tail form:
/// `(H, T) * (H', t) = (H * act_T(H'), T t)`.
pub fn push_through(
    word: &Word,
    coeffs: &SectionCoefficients,
    parity: &ParityAssignment,
) -> Result<(SymbolicKl, Word), ObstructionError> {
    let n = coeffs.n();
    let mut head = SymbolicKl::identity(n);
    let mut tail = Word::identity(n);
    for (g, e) in word.unit_letters() {
        let (h, t) = section_image(g, Sign::of(i64::from(e)), coeffs, parity)?;
        let moved = h.act_word(&tail, parity)?;
        head = head.mul(&moved, parity)?;
        tail = tail.mul(&t);
    }
    Ok((head, tail))
}

/// The `rho_{n+1}` exponent of the head of `push_through`. It does not
/// depend on parities: only `rho_n` changes it, by negation.
pub fn push_through_m0(word: &Word, coeffs: &SectionCoefficients) -> Result<AffineExpr, ObstructionError> {
    let n = coeffs.n();
    let mut m0 = AffineExpr::zero();
    let mut flips = 0u64;
    for (g, e) in word.unit_letters() {
        let own = coeffs.head_m0(g)?;
        let image = match (e < 0, g == Generator::Rho(n)) {
            (false, _) | (true, true) => own,
            (true, false) => -own,
        };
        m0 += if flips.is_multiple_of(2) { image } else { -image };
        if g == Generator::Rho(n) {
            flips += 1;
        }
    }
    Ok(m0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::klgroup::Parity;
    use Generator::{Rho, B};

    fn all_parities(coeffs: &SectionCoefficients, odd: bool) -> ParityAssignment {
        coeffs.m0_unknowns().into_iter().map(|u| (u, Parity::from_bit(odd))).collect()
    }

    #[test]
    fn section_image_of_rho1() {
        let c = SectionCoefficients::new(3).unwrap();
        let p = all_parities(&c, false);
        let (h, t) = section_image(Rho(1), Sign::Plus, &c, &p).unwrap();
        assert_eq!(h.to_string(), "(alpha[1,0]; alpha[1,1], alpha[1,2])");
        assert_eq!(t, Word::from_pairs(3, &[(Rho(1), 1)]));
    }

    #[test]
    fn inverse_of_b_image_is_kl_inverse() {
        let c = SectionCoefficients::new(3).unwrap();
        for odd in [false, true] {
            let p = all_parities(&c, odd);
            let (h, _) = section_image(B(1, 2), Sign::Minus, &c, &p).unwrap();
            assert_eq!(h, c.head(B(1, 2)).unwrap().inverse(&p).unwrap());
        }
    }

    #[test]
    fn word_times_inverse_has_identity_head() {
        let c = SectionCoefficients::new(3).unwrap();
        let w = Word::from_pairs(3, &[(Rho(3), 1), (B(1, 2), -2), (Rho(1), 1)]);
        for odd in [false, true] {
            let p = all_parities(&c, odd);
            let (h, t) = push_through(&w.concat(&w.inverse()), &c, &p).unwrap();
            assert!(t.is_identity());
            assert_eq!(h, SymbolicKl::identity(3));
        }
    }

    #[test]
    fn single_generator_push_through_is_the_section_image() {
        let c = SectionCoefficients::new(4).unwrap();
        let p = all_parities(&c, true);
        for g in [Rho(2), Rho(4), B(2, 3)] {
            for s in [Sign::Plus, Sign::Minus] {
                let w = Word::from_pairs(4, &[(g, s.value())]);
                assert_eq!(push_through(&w, &c, &p).unwrap(), section_image(g, s, &c, &p).unwrap());
            }
        }
    }

    #[test]
    fn m0_path_agrees_with_full_head() {
        let c = SectionCoefficients::new(4).unwrap();
        let w = Word::from_pairs(4, &[(Rho(4), 2), (Rho(1), -1), (B(1, 4), 1), (Rho(4), -1), (Rho(2), 1)]);
        for odd in [false, true] {
            let p = all_parities(&c, odd);
            let (h, _) = push_through(&w, &c, &p).unwrap();
            assert_eq!(h.m0, push_through_m0(&w, &c).unwrap());
        }
    }

    #[test]
    fn foreign_generators_are_rejected() {
        let c = SectionCoefficients::new(3).unwrap();
        let p = all_parities(&c, false);
        assert!(matches!(section_image(Rho(4), Sign::Plus, &c, &p), Err(ObstructionError::NotBaseGenerator { .. })));
        assert!(SectionCoefficients::new(1).is_err());
    }
}
