//! Finite verification backends: coset enumeration and integer Smith
//! normal form.

pub mod coset;
pub mod smith;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use coset::{todd_coxeter, CosetError, CosetTable, Enumeration, FiniteGroup};
pub use smith::{rank_mod2, smith_normal_form, solve_integer_system, IntMatrix, IntegerSolution, SmithForm};

use crate::presentation::Presentation;

/// Exponent-sum matrix: one row per relator, one column per generator.
pub fn relation_matrix(p: &Presentation) -> IntMatrix {
    let gens = p.generators();
    let rows: Vec<Vec<i64>> = p.relators().iter().map(|(w, _)| w.abelianize_over(gens)).collect();
    IntMatrix::from_rows(&rows, gens.len())
}

/// Invariant factors of the abelianization: each finite cyclic factor
/// `Z/d` (`d > 1`) as `d`, followed by one `0` per free `Z` summand.
pub fn abelianization(p: &Presentation) -> Vec<BigInt> {
    let m = relation_matrix(p);
    let snf = smith_normal_form(&m);
    let mut factors: Vec<BigInt> = snf.diagonal().into_iter().take(snf.rank).filter(|d| !d.is_one()).collect();
    factors.extend(std::iter::repeat_n(BigInt::zero(), m.cols() - snf.rank));
    factors
}
