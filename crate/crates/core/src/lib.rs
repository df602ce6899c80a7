//! Pure braid groups of the projective plane: words, presentations,
//! the quotient `K/L`, coset enumeration, a rewriting prover and the
//! splitting-obstruction decision procedure.

pub mod enumerate;
pub mod klgroup;
pub mod obstruction;
pub mod presentation;
pub mod rewrite;
pub mod words;
