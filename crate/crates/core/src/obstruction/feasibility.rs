//! Integer feasibility of a system of affine equations, with independently
//! checkable witnesses and infeasibility certificates.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::enumerate::{solve_integer_system, IntMatrix, IntegerSolution};

use super::affine::{AffineExpr, Unknown};
use super::constraints::{ConstraintSystem, Equation};

pub type Witness = BTreeMap<Unknown, BigInt>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateEntry {
    /// Position of the equation in the system it was derived from.
    pub index: usize,
    pub equation: Equation,
    pub multiplier: BigInt,
}

/// `sum multiplier * expr` has every coefficient divisible by `modulus`
/// but a constant that is not (a zero modulus asks for exact vanishing),
/// so no integer point satisfies the cited equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub entries: Vec<CertificateEntry>,
    pub modulus: BigInt,
}

impl Certificate {
    pub fn combination(&self) -> AffineExpr {
        self.entries.iter().fold(AffineExpr::zero(), |acc, e| acc + e.equation.expr.scale(&e.multiplier))
    }

    /// Re-checks the certificate from the cited equations alone.
    pub fn verify(&self) -> bool {
        let sum = self.combination();
        let divisible = |x: &BigInt| if self.modulus.is_zero() { x.is_zero() } else { x.is_multiple_of(&self.modulus) };
        sum.terms().values().all(divisible) && !divisible(sum.constant_term())
    }

    /// Whether the cited equations are exactly those at `index` in `sys`.
    pub fn matches(&self, sys: &ConstraintSystem) -> bool {
        self.entries.iter().all(|e| sys.equations.get(e.index) == Some(&e.equation))
    }

    pub fn cited(&self) -> impl Iterator<Item = &Equation> {
        self.entries.iter().map(|e| &e.equation)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.modulus.is_zero() {
            writeln!(f, "certificate (exact):")?;
        } else {
            writeln!(f, "certificate (mod {}):", self.modulus)?;
        }
        for e in &self.entries {
            writeln!(f, "  {} x [{}] {}", e.multiplier, e.index, e.equation)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Sat(Witness),
    Unsat(Certificate),
}

impl Feasibility {
    pub fn is_sat(&self) -> bool {
        matches!(self, Feasibility::Sat(_))
    }
}

pub fn verify_witness(sys: &ConstraintSystem, witness: &Witness) -> bool {
    sys.iter().all(|e| e.expr.eval(witness).is_zero())
}

fn certificate(sys: &ConstraintSystem, multipliers: BTreeMap<usize, BigInt>, modulus: BigInt) -> Certificate {
    let entries = multipliers
        .into_iter()
        .filter(|(_, m)| !m.is_zero())
        .map(|(index, multiplier)| CertificateEntry { index, equation: sys.equations[index].clone(), multiplier })
        .collect();
    let modulus = modulus.abs();
    Certificate { entries, modulus }
}

/// Decides whether the system has an integer solution.
pub fn decide_feasibility(sys: &ConstraintSystem) -> Feasibility {
    if let Some(cert) = single_equation_refutation(sys) {
        return Feasibility::Unsat(cert);
    }
    if let Some(cert) = refute_mod2(sys) {
        return Feasibility::Unsat(cert);
    }
    solve_exact(sys)
}

fn single_equation_refutation(sys: &ConstraintSystem) -> Option<Certificate> {
    sys.iter().enumerate().find_map(|(idx, e)| {
        let g = e.expr.content();
        let bad =
            if g.is_zero() { !e.expr.constant_term().is_zero() } else { !e.expr.constant_term().is_multiple_of(&g) };
        bad.then(|| certificate(sys, BTreeMap::from([(idx, BigInt::one())]), g))
    })
}

struct Columns {
    index: BTreeMap<Unknown, usize>,
    unknowns: Vec<Unknown>,
}

impl Columns {
    fn of(sys: &ConstraintSystem) -> Self {
        let unknowns: Vec<Unknown> = sys.unknowns().into_iter().collect();
        let index = unknowns.iter().enumerate().map(|(k, u)| (u.clone(), k)).collect();
        Columns { index, unknowns }
    }
}

/// Rows over GF(2): sorted odd-coefficient columns and the constant bit.
fn mod2_rows(sys: &ConstraintSystem, cols: &Columns) -> Vec<(Vec<u32>, bool)> {
    sys.iter()
        .map(|e| {
            let bits = e.expr.terms().iter().filter(|(_, c)| c.is_odd()).map(|(u, _)| cols.index[u] as u32).collect();
            (bits, e.expr.constant_term().is_odd())
        })
        .collect()
}

fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Incremental elimination over the rows in `subset`; returns the rows whose
/// sum is `0 = 1` as soon as one appears.
fn mod2_conflict(rows: &[(Vec<u32>, bool)], subset: &[u32]) -> Option<Vec<u32>> {
    let mut basis: HashMap<u32, (Vec<u32>, bool, Vec<u32>)> = HashMap::new();
    for &r in subset {
        let (mut bits, mut rhs) = rows[r as usize].clone();
        let mut combo = vec![r];
        while let Some(&lead) = bits.first() {
            match basis.get(&lead) {
                Some((b_bits, b_rhs, b_combo)) => {
                    bits = xor_sorted(&bits, b_bits);
                    rhs ^= *b_rhs;
                    combo = xor_sorted(&combo, b_combo);
                }
                None => break,
            }
        }
        match bits.first() {
            Some(&lead) => {
                basis.insert(lead, (bits, rhs, combo));
            }
            None if rhs => return Some(combo),
            None => {}
        }
    }
    None
}

/// A minimal set of equations whose sum reduces to `0 = 1` modulo 2.
pub fn refute_mod2(sys: &ConstraintSystem) -> Option<Certificate> {
    refute_mod2_among(sys, |_| true)
}

/// As [`refute_mod2`], using only the equations accepted by `keep`.
pub fn refute_mod2_among(sys: &ConstraintSystem, keep: impl Fn(&Equation) -> bool) -> Option<Certificate> {
    let cols = Columns::of(sys);
    let rows = mod2_rows(sys, &cols);
    let all: Vec<u32> = (0..rows.len() as u32).filter(|&r| keep(&sys.equations[r as usize])).collect();
    let mut set = mod2_conflict(&rows, &all)?;
    let mut k = 0;
    while k < set.len() {
        let trial: Vec<u32> = set.iter().copied().filter(|&r| r != set[k]).collect();
        match mod2_conflict(&rows, &trial) {
            Some(smaller) => set = smaller,
            None => k += 1,
        }
    }
    let multipliers = set.into_iter().map(|r| (r as usize, BigInt::one())).collect();
    Some(certificate(sys, multipliers, BigInt::from(2)))
}

type Sparse = BTreeMap<usize, BigInt>;

fn axpy(dst: &mut Sparse, k: &BigInt, src: &Sparse) {
    for (c, x) in src {
        let entry = dst.entry(*c).or_default();
        *entry += k * x;
        if entry.is_zero() {
            dst.remove(c);
        }
    }
}

#[derive(Clone)]
struct IntRow {
    terms: Sparse,
    constant: BigInt,
    combo: Sparse,
}

/// Exact integer solution: eliminate unknowns with unit coefficients, then
/// finish the remaining system with Smith normal form.
fn solve_exact(sys: &ConstraintSystem) -> Feasibility {
    let cols = Columns::of(sys);
    let mut rows: Vec<IntRow> = sys
        .iter()
        .enumerate()
        .map(|(idx, e)| IntRow {
            terms: e.expr.terms().iter().map(|(u, c)| (cols.index[u], c.clone())).collect(),
            constant: e.expr.constant_term().clone(),
            combo: BTreeMap::from([(idx, BigInt::one())]),
        })
        .collect();
    let mut solved: Vec<(usize, IntRow)> = Vec::new();

    loop {
        let pick = rows
            .iter()
            .enumerate()
            .find_map(|(r, row)| row.terms.iter().find(|(_, c)| c.abs().is_one()).map(|(&col, c)| (r, col, c.clone())));
        let Some((r, col, s)) = pick else { break };
        let pivot = rows.swap_remove(r);
        for row in rows.iter_mut() {
            if let Some(a) = row.terms.get(&col).cloned() {
                let k = -(&a * &s);
                axpy(&mut row.terms, &k, &pivot.terms);
                row.constant += &k * &pivot.constant;
                axpy(&mut row.combo, &k, &pivot.combo);
            }
        }
        solved.push((col, pivot));
    }

    for row in &rows {
        let g = row.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c));
        let bad = if g.is_zero() { !row.constant.is_zero() } else { !row.constant.is_multiple_of(&g) };
        if bad {
            return Feasibility::Unsat(certificate(sys, row.combo.clone(), g));
        }
    }

    let rows: Vec<IntRow> = rows.into_iter().filter(|r| !r.terms.is_empty()).collect();
    let dense_cols: Vec<usize> = {
        let mut c: Vec<usize> = rows.iter().flat_map(|r| r.terms.keys().copied()).collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let mut values: Vec<BigInt> = vec![BigInt::zero(); cols.unknowns.len()];
    if !rows.is_empty() {
        let position: HashMap<usize, usize> = dense_cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let mut a = IntMatrix::zeros(rows.len(), dense_cols.len());
        for (i, row) in rows.iter().enumerate() {
            for (c, x) in &row.terms {
                a[(i, position[c])] = x.clone();
            }
        }
        let b: Vec<BigInt> = rows.iter().map(|r| -r.constant.clone()).collect();
        match solve_integer_system(&a, &b) {
            IntegerSolution::Unsolvable { multipliers, modulus } => {
                let mut combo = Sparse::new();
                for (y, row) in multipliers.iter().zip(&rows) {
                    if !y.is_zero() {
                        axpy(&mut combo, y, &row.combo);
                    }
                }
                return Feasibility::Unsat(certificate(sys, combo, modulus));
            }
            IntegerSolution::Solvable { particular, .. } => {
                for (k, &c) in dense_cols.iter().enumerate() {
                    values[c] = particular[k].clone();
                }
            }
        }
    }
    for (col, row) in solved.iter().rev() {
        let s = &row.terms[col];
        let mut rest = row.constant.clone();
        for (c, x) in &row.terms {
            if c != col {
                rest += x * &values[*c];
            }
        }
        values[*col] = -(rest * s);
    }
    let witness: Witness = cols.unknowns.into_iter().zip(values).collect();
    debug_assert!(verify_witness(sys, &witness));
    Feasibility::Sat(witness)
}
