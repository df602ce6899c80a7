//! Existence of a section of `P_{n+1}(RP^2)/L -> P_n(RP^2)`: the section
//! images are parametrised by unknown exponents, each relation yields linear
//! equations on them, and the resulting integer systems are decided branch by
//! branch over the parities of the `rho_{n+1}` exponents.

pub mod affine;
pub mod constraints;
pub mod feasibility;
pub mod symbolic;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::enumerate::{solve_integer_system, IntMatrix, IntegerSolution};
use crate::klgroup::{KlError, Parity};
use crate::presentation::{Family, PresentationError, RelationId};
use crate::words::Generator;

pub use affine::{AffineExpr, ParityAssignment, Unknown};
pub use constraints::{ConstraintBuilder, ConstraintSystem, Coordinate, Equation, Mode, Origin};
pub use feasibility::{
    decide_feasibility, refute_mod2, verify_witness, Certificate, CertificateEntry, Feasibility, Witness,
};
pub use symbolic::{push_through, push_through_m0, section_image, SectionCoefficients, SymbolicKl};

/// Largest `n` accepted by [`obstruct`] in full mode.
pub const MAX_N_FULL: u32 = 8;
/// Largest `n` accepted by [`obstruct`] with the reduced relation set.
pub const MAX_N_PAPER_SUBSET: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObstructionError {
    #[error("section analysis needs n >= 2, got {0}")]
    TooFewStrands(u32),
    #[error("n = {n} exceeds the {mode} limit of {max}")]
    TooLarge { n: u32, mode: Mode, max: u32 },
    #[error("{gen} is not a generator of P_{n}(RP^2)")]
    NotBaseGenerator { gen: Generator, n: u32 },
    #[error("no parity assigned to {0}")]
    MissingParity(Unknown),
    #[error("relation {0} does not lift to P_(n+1)(RP^2)/L")]
    InheritedRelator(String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Kl(#[from] KlError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// An integer solution exists: a section of the quotient map.
    Sat,
    /// Every branch is refuted.
    Unsat,
    /// The branch budget was exceeded before a decision.
    Undecided,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
            Verdict::Undecided => "UNDECIDED",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchReport {
    pub parity: ParityAssignment,
    pub equations: usize,
    pub outcome: Feasibility,
    /// The refutation uses an equation from a surface relation.
    pub cites_surface_parity: bool,
    /// The refutation sets the relation `rho_1 B_{2,3} = B_{2,3} rho_1`
    /// at `A_2` against another equation with an odd `beta[2,3,2]`.
    pub cites_beta232_clash: bool,
}

impl BranchReport {
    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.outcome {
            Feasibility::Unsat(c) => Some(c),
            Feasibility::Sat(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.outcome {
            Feasibility::Sat(w) => Some(w),
            Feasibility::Unsat(_) => None,
        }
    }

    /// Parity assignment as a bit string in the order of the unknowns.
    pub fn parity_bits(&self) -> String {
        self.parity.iter().map(|(_, p)| if p.is_odd() { '1' } else { '0' }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionReport {
    pub n: u32,
    pub mode: Mode,
    pub verdict: Verdict,
    pub m0_equations: usize,
    /// Refutation of the parity-free equations alone, when they already fail.
    pub m0_refutation: Option<Certificate>,
    /// Dimension over GF(2) of the admissible parity vectors.
    pub parity_rank: usize,
    pub branches: Vec<BranchReport>,
    /// In full mode: whether dropping family (a) leaves the verdict unchanged.
    pub family_a_redundant: Option<bool>,
    pub note: Option<String>,
}

impl ObstructionReport {
    pub fn sat_branch(&self) -> Option<&BranchReport> {
        self.branches.iter().find(|b| b.outcome.is_sat())
    }
}

impl fmt::Display for ObstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}, mode = {}: {}", self.n, self.mode, self.verdict)?;
        writeln!(
            f,
            "m0 equations: {}, parity rank: {}, branches: {}",
            self.m0_equations,
            self.parity_rank,
            self.branches.len()
        )?;
        if let Some(c) = &self.m0_refutation {
            write!(f, "m0 system refuted by {c}")?;
        }
        for (k, b) in self.branches.iter().enumerate() {
            let label = if b.outcome.is_sat() { "SAT" } else { "UNSAT" };
            write!(f, "branch {k} parity {}: {label} ({} equations)", b.parity_bits(), b.equations)?;
            if b.cites_surface_parity {
                f.write_str(" [surface parity]")?;
            }
            if b.cites_beta232_clash {
                f.write_str(" [beta[2,3,2] clash]")?;
            }
            writeln!(f)?;
        }
        if let Some(r) = self.family_a_redundant {
            writeln!(f, "family (a) redundant: {r}")?;
        }
        if let Some(note) = &self.note {
            writeln!(f, "note: {note}")?;
        }
        Ok(())
    }
}

/// Decides whether `P_{n+1}(RP^2)/L -> P_n(RP^2)` admits a section, using
/// the relations selected by `mode`.
pub fn obstruct(n: u32, mode: Mode) -> Result<ObstructionReport, ObstructionError> {
    if n < 2 {
        return Err(ObstructionError::TooFewStrands(n));
    }
    let max = match mode {
        Mode::Full => MAX_N_FULL,
        Mode::PaperSubset => MAX_N_PAPER_SUBSET,
    };
    if n > max {
        return Err(ObstructionError::TooLarge { n, mode, max });
    }
    let builder = ConstraintBuilder::new(n, mode)?;
    let mut report = analyse(&builder)?;
    if mode == Mode::Full && report.verdict != Verdict::Undecided {
        let reduced = analyse(&builder.without_family(Family::ArtinA))?;
        report.family_a_redundant = Some(reduced.verdict == report.verdict);
    }
    Ok(report)
}

/// Runs the branch analysis for an already prepared relation set.
pub fn analyse(builder: &ConstraintBuilder) -> Result<ObstructionReport, ObstructionError> {
    let n = builder.n();
    let m0 = builder.m0_system()?;
    let unknowns = builder.coefficients().m0_unknowns();
    let mut report = ObstructionReport {
        n,
        mode: builder.mode(),
        verdict: Verdict::Unsat,
        m0_equations: m0.len(),
        m0_refutation: None,
        parity_rank: 0,
        branches: Vec::new(),
        family_a_redundant: None,
        note: None,
    };

    let (base, basis) = match m0_parities(&m0, &unknowns) {
        Ok(p) => p,
        Err(cert) => {
            report.m0_refutation = Some(cert);
            return Ok(report);
        }
    };
    report.parity_rank = basis.len();
    if basis.len() > n as usize {
        report.verdict = Verdict::Undecided;
        report.note = Some(format!("{} parity branches exceed the budget of 2^{n}", 1u128 << basis.len().min(127)));
        return Ok(report);
    }

    let assignments: Vec<ParityAssignment> = (0..1u64 << basis.len())
        .map(|mask| {
            let mut bits = base.clone();
            for (k, v) in basis.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    bits.iter_mut().zip(v).for_each(|(b, x)| *b ^= *x);
                }
            }
            unknowns.iter().cloned().zip(bits.into_iter().map(Parity::from_bit)).collect()
        })
        .collect();

    let branches: Result<Vec<BranchReport>, ObstructionError> =
        assignments.into_par_iter().map(|parity| run_branch(builder, parity)).collect();
    report.branches = branches?;
    if report.branches.iter().any(|b| b.outcome.is_sat()) {
        report.verdict = Verdict::Sat;
    }
    Ok(report)
}

/// Parity vectors compatible with the `rho_{n+1}`-exponent equations, as an
/// affine subspace `base + span(basis)` of GF(2)^unknowns.
#[allow(clippy::type_complexity)]
fn m0_parities(m0: &ConstraintSystem, unknowns: &[Unknown]) -> Result<(Vec<bool>, Vec<Vec<bool>>), Certificate> {
    let position: HashMap<&Unknown, usize> = unknowns.iter().enumerate().map(|(k, u)| (u, k)).collect();
    let mut a = IntMatrix::zeros(m0.len(), unknowns.len());
    let mut b = Vec::with_capacity(m0.len());
    for (i, eq) in m0.iter().enumerate() {
        for (u, c) in eq.expr.terms() {
            a[(i, position[u])] = c.clone();
        }
        b.push(-eq.expr.constant_term().clone());
    }
    let (particular, kernel) = match solve_integer_system(&a, &b) {
        IntegerSolution::Solvable { particular, kernel } => (particular, kernel),
        IntegerSolution::Unsolvable { multipliers, modulus } => {
            let entries = multipliers
                .into_iter()
                .enumerate()
                .filter(|(_, y)| !y.is_zero())
                .map(|(index, multiplier)| CertificateEntry {
                    index,
                    equation: m0.equations[index].clone(),
                    multiplier,
                })
                .collect();
            return Err(Certificate { entries, modulus: modulus.abs() });
        }
    };
    let base: Vec<bool> = particular.iter().map(BigInt::is_odd).collect();
    let mut basis: Vec<Vec<bool>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for v in kernel {
        let mut bits: Vec<bool> = v.iter().map(BigInt::is_odd).collect();
        for (row, &p) in basis.iter().zip(&pivots) {
            if bits[p] {
                bits.iter_mut().zip(row).for_each(|(x, y)| *x ^= *y);
            }
        }
        if let Some(p) = bits.iter().position(|&x| x) {
            for (row, _) in basis.iter_mut().zip(&pivots).filter(|(r, _)| r[p]) {
                row.iter_mut().zip(&bits).for_each(|(x, y)| *x ^= *y);
            }
            basis.push(bits);
            pivots.push(p);
        }
    }
    Ok((base, basis))
}

fn run_branch(builder: &ConstraintBuilder, parity: ParityAssignment) -> Result<BranchReport, ObstructionError> {
    let sys = builder.system(&parity)?;
    let mut outcome = decide_feasibility(&sys);
    if matches!(&outcome, Feasibility::Unsat(c) if !cites_surface(c)) {
        if let Some(c) = beta232_refutation(&sys) {
            outcome = Feasibility::Unsat(c);
        }
    }
    let (cites_surface_parity, cites_beta232_clash) = match &outcome {
        Feasibility::Unsat(c) => (cites_surface(c), cites_beta232(c)),
        Feasibility::Sat(_) => (false, false),
    };
    Ok(BranchReport { parity, equations: sys.len(), outcome, cites_surface_parity, cites_beta232_clash })
}

fn commutes_rho1_b23() -> Origin {
    Origin::Relation { id: RelationId::RhoB { k: 1, i: 2, j: 3 }, coordinate: Coordinate::A(2) }
}

/// A refutation through `beta[2,3,2]`: the commutation of `rho_1` with
/// `B_{2,3}` forces it even while another relation forces it odd.
fn beta232_refutation(sys: &ConstraintSystem) -> Option<Certificate> {
    let commute = commutes_rho1_b23();
    let beta = Unknown::Beta { i: 2, j: 3, k: 2 };
    let cert = feasibility::refute_mod2_among(sys, |e| {
        e.origin == commute || e.expr.coeff(&beta).is_odd() || matches!(e.origin, Origin::Parity(_))
    })?;
    cites_beta232(&cert).then_some(cert)
}

fn cites_surface(c: &Certificate) -> bool {
    c.cited().any(|e| matches!(e.origin.relation(), Some(RelationId::Surface { .. })))
}

fn cites_beta232(c: &Certificate) -> bool {
    let commute = commutes_rho1_b23();
    let beta = Unknown::Beta { i: 2, j: 3, k: 2 };
    c.cited().any(|e| e.origin == commute) && c.cited().any(|e| e.origin != commute && e.expr.coeff(&beta).is_odd())
}

/// Re-derives the system of a branch and checks its recorded outcome.
pub fn verify_branch(builder: &ConstraintBuilder, branch: &BranchReport) -> Result<bool, ObstructionError> {
    let sys = builder.system(&branch.parity)?;
    Ok(match &branch.outcome {
        Feasibility::Sat(w) => verify_witness(&sys, w),
        Feasibility::Unsat(c) => c.matches(&sys) && c.verify(),
    })
}

/// Checks a whole report against freshly derived systems.
pub fn verify_report(report: &ObstructionReport) -> Result<bool, ObstructionError> {
    let builder = ConstraintBuilder::new(report.n, report.mode)?;
    if let Some(c) = &report.m0_refutation {
        return Ok(report.verdict == Verdict::Unsat && c.matches(&builder.m0_system()?) && c.verify());
    }
    for b in &report.branches {
        if !verify_branch(&builder, b)? {
            return Ok(false);
        }
    }
    let any_sat = report.branches.iter().any(|b| b.outcome.is_sat());
    Ok(match report.verdict {
        Verdict::Sat => any_sat,
        Verdict::Unsat => !any_sat && report.branches.len() == 1usize << report.parity_rank,
        Verdict::Undecided => true,
    })
}
