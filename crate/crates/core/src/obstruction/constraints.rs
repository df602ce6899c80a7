//! Equations on the section coefficients obtained by comparing the heads of
//! the two sides of each relation of `P_n(RP^2)` in `P_{n+1}(RP^2)/L`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::klgroup::{self, KlElement, Parity};
use crate::presentation::{self, Family, Relation, RelationId, SupplementaryKind};
use crate::words::{Generator, Word};

use super::affine::{AffineExpr, ParityAssignment, Unknown};
use super::symbolic::{push_through, push_through_m0, SectionCoefficients, SymbolicKl};
use super::ObstructionError;

/// Which relations of `P_n(RP^2)` are turned into equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Every relation of the presentation plus the supplementary relations.
    Full,
    /// Families (b), (c), the relations `rho_j rho_i rho_j^-1 = rho_i B_{i,j}^-1`
    /// and the commutation of `rho_1` with `B_{2,3}`.
    PaperSubset,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::PaperSubset => "paper-subset",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A coordinate of `K/L`: the `rho_{n+1}` exponent or the exponent of `A_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coordinate {
    M0,
    A(u32),
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coordinate::M0 => f.write_str("m0"),
            Coordinate::A(k) => write!(f, "A[{k}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Origin {
    Relation {
        id: RelationId,
        coordinate: Coordinate,
    },
    /// `u = p + 2 s` for the assigned parity `p` of `u`.
    Parity(Unknown),
    Given(String),
}

impl Origin {
    pub fn relation(&self) -> Option<RelationId> {
        match self {
            Origin::Relation { id, .. } => Some(*id),
            _ => None,
        }
    }

    pub fn coordinate(&self) -> Option<Coordinate> {
        match self {
            Origin::Relation { coordinate, .. } => Some(*coordinate),
            _ => None,
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Relation { id, coordinate } => write!(f, "{id} @ {coordinate}"),
            Origin::Parity(u) => write!(f, "parity {u}"),
            Origin::Given(label) => f.write_str(label),
        }
    }
}

/// `expr = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub expr: AffineExpr,
    pub origin: Origin,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} = 0", self.origin, self.expr)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintSystem {
    pub equations: Vec<Equation>,
    next_slack: u32,
}

impl ConstraintSystem {
    pub fn new() -> Self {
        ConstraintSystem::default()
    }

    /// Adds `expr = 0`, divided by the content of its coefficients when that
    /// divides the constant. Trivial equations `0 = 0` are dropped.
    pub fn push(&mut self, expr: AffineExpr, origin: Origin) {
        if expr.is_zero() {
            return;
        }
        self.equations.push(Equation { expr: expr.normalized(), origin });
    }

    /// Adds `u = p + 2 s` with a fresh slack unknown `s`.
    pub fn push_parity(&mut self, u: Unknown, p: Parity) {
        let s = Unknown::Slack(self.next_slack);
        self.next_slack += 1;
        let expr = AffineExpr::var(u.clone()) - AffineExpr::constant(i64::from(p.is_odd())) - AffineExpr::term(s, 2);
        self.equations.push(Equation { expr, origin: Origin::Parity(u) });
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn unknowns(&self) -> BTreeSet<Unknown> {
        self.equations.iter().flat_map(|e| e.expr.unknowns().cloned()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Equation> {
        self.equations.iter()
    }
}

impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            writeln!(f, "{eq}")?;
        }
        Ok(())
    }
}

/// A relation of `P_n(RP^2)` prepared for head comparison. `absorb` is the
/// `K/L` factor `k` with `rhs = rho_i^2 k` in `P_{n+1}(RP^2)/L` for the
/// surface relations; it is moved left through `rho_i^2` into the head.
#[derive(Debug, Clone)]
pub struct PreparedRelation {
    pub relation: Relation,
    absorb: Option<KlElement>,
}

/// Relations used by `mode`, each checked to lift to `P_{n+1}(RP^2)/L`.
#[derive(Debug, Clone)]
pub struct ConstraintBuilder {
    coeffs: SectionCoefficients,
    mode: Mode,
    relations: Vec<PreparedRelation>,
}

fn relations_for(n: u32, mode: Mode) -> Result<Vec<Relation>, ObstructionError> {
    let base = presentation::relations(n)?;
    let supplementary = presentation::supplementary_relations(n);
    Ok(match mode {
        Mode::Full => base.into_iter().chain(supplementary).collect(),
        Mode::PaperSubset => {
            let keep = |r: &Relation| {
                matches!(
                    r.id,
                    RelationId::RhoRho { .. }
                        | RelationId::Surface { .. }
                        | RelationId::RhoB { k: 1, i: 2, j: 3 }
                        | RelationId::Supplementary { kind: SupplementaryKind::III, .. }
                )
            };
            base.into_iter().chain(supplementary).filter(keep).collect()
        }
    })
}

fn lift(w: &Word, n: u32) -> Word {
    Word::from_pairs(n, &w.letters().iter().map(|l| (l.gen, l.exp)).collect::<Vec<_>>())
}

impl ConstraintBuilder {
    pub fn new(n: u32, mode: Mode) -> Result<Self, ObstructionError> {
        let coeffs = SectionCoefficients::new(n)?;
        let up = presentation::relations(n + 1)?;
        let up_relators: HashSet<(Word, Family)> = up.iter().map(|r| (r.relator(), r.family())).collect();
        let up_supplementary: HashSet<Word> =
            presentation::supplementary_relations(n + 1).iter().map(Relation::relator).collect();

        let mut relations = Vec::new();
        for relation in relations_for(n, mode)? {
            let lifted = lift(&relation.relator(), n + 1);
            let absorb = match relation.id {
                RelationId::Surface { i } => Some(surface_absorb(n, i, &relation, &up)?),
                RelationId::Supplementary { .. } => {
                    if !up_supplementary.contains(&lifted) {
                        return Err(ObstructionError::InheritedRelator(relation.id.to_string()));
                    }
                    None
                }
                _ => {
                    if !up_relators.contains(&(lifted, relation.family())) {
                        return Err(ObstructionError::InheritedRelator(relation.id.to_string()));
                    }
                    None
                }
            };
            relations.push(PreparedRelation { relation, absorb });
        }
        Ok(ConstraintBuilder { coeffs, mode, relations })
    }

    pub fn n(&self) -> u32 {
        self.coeffs.n()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn coefficients(&self) -> &SectionCoefficients {
        &self.coeffs
    }

    pub fn relations(&self) -> impl Iterator<Item = &PreparedRelation> {
        self.relations.iter()
    }

    /// The same builder with the relations of `family` left out.
    pub fn without_family(&self, family: Family) -> ConstraintBuilder {
        let relations = self.relations.iter().filter(|p| p.relation.family() != family).cloned().collect();
        ConstraintBuilder { coeffs: self.coeffs, mode: self.mode, relations }
    }

    /// Heads of the two sides of a relation, after moving the surface
    /// correction into the right-hand head.
    pub fn heads(
        &self,
        prepared: &PreparedRelation,
        parity: &ParityAssignment,
    ) -> Result<(SymbolicKl, SymbolicKl), ObstructionError> {
        let (lh, lt) = push_through(&prepared.relation.lhs, &self.coeffs, parity)?;
        let (mut rh, _) = push_through(&prepared.relation.rhs, &self.coeffs, parity)?;
        if let Some(k) = &prepared.absorb {
            let square = lt.clone();
            let moved = klgroup::act_word(&square, k)?;
            rh = rh.mul(&SymbolicKl::from_kl(&moved), parity)?;
        }
        Ok((lh, rh))
    }

    /// The parity-free `rho_{n+1}`-exponent equations.
    pub fn m0_system(&self) -> Result<ConstraintSystem, ObstructionError> {
        let mut sys = ConstraintSystem::new();
        for prepared in &self.relations {
            let l = push_through_m0(&prepared.relation.lhs, &self.coeffs)?;
            let mut r = push_through_m0(&prepared.relation.rhs, &self.coeffs)?;
            if let Some(k) = &prepared.absorb {
                let square = prepared.relation.lhs.clone();
                r.add_constant(klgroup::act_word(&square, k)?.m0);
            }
            sys.push(l - r, Origin::Relation { id: prepared.relation.id, coordinate: Coordinate::M0 });
        }
        Ok(sys)
    }

    /// The `A_k`-coordinate equations under a parity assignment of the
    /// `rho_{n+1}` exponents.
    pub fn v_system(&self, parity: &ParityAssignment) -> Result<ConstraintSystem, ObstructionError> {
        let mut sys = ConstraintSystem::new();
        for prepared in &self.relations {
            let (l, r) = self.heads(prepared, parity)?;
            for (k, (a, b)) in l.v.into_iter().zip(r.v).enumerate() {
                let coordinate = Coordinate::A(k as u32 + 1);
                sys.push(a - b, Origin::Relation { id: prepared.relation.id, coordinate });
            }
        }
        Ok(sys)
    }

    /// The full system of one parity branch: `rho_{n+1}`-exponent equations,
    /// `A_k` equations and one parity equation per assigned unknown.
    pub fn system(&self, parity: &ParityAssignment) -> Result<ConstraintSystem, ObstructionError> {
        let mut sys = self.m0_system()?;
        sys.equations.extend(self.v_system(parity)?.equations);
        for (u, p) in parity.iter() {
            sys.push_parity(u.clone(), *p);
        }
        Ok(sys)
    }
}

/// `B_{1,i} ... B_{i,n} = rho_i^2 A_i^-1` for `i < n`, and
/// `B_{1,n} ... B_{n-1,n} = rho_n^2 rho_{n+1}^-2 A_1 ... A_{n-1}`, read off
/// from the surface relation of `P_{n+1}(RP^2)`.
fn surface_absorb(n: u32, i: u32, relation: &Relation, up: &[Relation]) -> Result<KlElement, ObstructionError> {
    let err = || ObstructionError::InheritedRelator(relation.id.to_string());
    let upper = up.iter().find(|r| r.id == RelationId::Surface { i }).ok_or_else(err)?;
    let expected_rhs = lift(&relation.rhs, n + 1).mul(&Word::from_pairs(n + 1, &[(Generator::B(i, n + 1), 1)]));
    let expected_lhs = lift(&relation.lhs, n + 1);
    if upper.rhs != expected_rhs || upper.lhs != expected_lhs {
        return Err(err());
    }
    // rhs = rho_i^2 B_{i,n+1}^-1, with B_{i,n+1} evaluated in K/L.
    let b = klgroup::kl_from_word(&Word::from_pairs(n, &[(Generator::B(i, n + 1), 1)]))?;
    Ok(b.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn alpha(i: u32, k: u32) -> Unknown {
        Unknown::Alpha { i, k }
    }

    fn beta(i: u32, j: u32, k: u32) -> Unknown {
        Unknown::Beta { i, j, k }
    }

    fn find(sys: &ConstraintSystem, id: RelationId, c: Coordinate) -> &Equation {
        sys.iter()
            .find(|e| e.origin == Origin::Relation { id, coordinate: c })
            .unwrap_or_else(|| panic!("no equation for {id} @ {c}"))
    }

    fn same_up_to_sign(e: &AffineExpr, f: &AffineExpr) -> bool {
        e == f || *e == -f.clone()
    }

    #[test]
    fn surface_absorb_values() {
        let up = presentation::relations(4).unwrap();
        let rels = presentation::relations(3).unwrap();
        let c1 = rels.iter().find(|r| r.id == RelationId::Surface { i: 1 }).unwrap();
        assert_eq!(surface_absorb(3, 1, c1, &up).unwrap(), KlElement::a(3, 1, -1));
        let c3 = rels.iter().find(|r| r.id == RelationId::Surface { i: 3 }).unwrap();
        let k = surface_absorb(3, 3, c3, &up).unwrap();
        let expected = &(&KlElement::rho(3, -2) * &KlElement::a(3, 1, 1)) * &KlElement::a(3, 2, 1);
        assert_eq!(k, expected);
    }

    #[test]
    fn m0_equations_n3() {
        let b = ConstraintBuilder::new(3, Mode::Full).unwrap();
        let sys = b.m0_system().unwrap();
        let iii = |i, j| RelationId::Supplementary { kind: SupplementaryKind::III, i, j };
        let e = find(&sys, iii(1, 2), Coordinate::M0);
        assert!(same_up_to_sign(&e.expr, &AffineExpr::var(beta(1, 2, 0))));
        let e = find(&sys, iii(1, 3), Coordinate::M0);
        let expect = AffineExpr::var(beta(1, 3, 0)) - AffineExpr::term(alpha(1, 0), 2);
        assert!(same_up_to_sign(&e.expr, &expect), "{e}");
        let e = find(&sys, RelationId::Surface { i: 3 }, Coordinate::M0);
        let expect = AffineExpr::var(beta(1, 3, 0)) + AffineExpr::var(beta(2, 3, 0)) - AffineExpr::constant(2);
        assert!(same_up_to_sign(&e.expr, &expect), "{e}");
        for eq in sys.iter() {
            assert!(eq.expr.unknowns().all(Unknown::is_m0));
        }
    }

    #[test]
    fn builder_asserts_inheritance() {
        for n in 2..=5 {
            for mode in [Mode::Full, Mode::PaperSubset] {
                ConstraintBuilder::new(n, mode).unwrap();
            }
        }
    }

    #[test]
    fn paper_subset_relation_set() {
        let b = ConstraintBuilder::new(4, Mode::PaperSubset).unwrap();
        let ids: Vec<RelationId> = b.relations().map(|p| p.relation.id).collect();
        assert!(ids.contains(&RelationId::RhoB { k: 1, i: 2, j: 3 }));
        assert!(ids.iter().all(|id| !matches!(id, RelationId::Artin { .. })));
        assert_eq!(ids.iter().filter(|id| matches!(id, RelationId::Surface { .. })).count(), 4);
        assert_eq!(ids.len(), 6 + 4 + 6 + 1);
    }

    #[test]
    fn parity_equations_use_fresh_slacks() {
        let mut sys = ConstraintSystem::new();
        sys.push_parity(alpha(1, 0), Parity::Odd);
        sys.push_parity(alpha(2, 0), Parity::Even);
        assert_eq!(sys.equations[0].expr.to_string(), "alpha[1,0] - 2*s[0] - 1");
        assert_eq!(sys.equations[1].expr.to_string(), "alpha[2,0] - 2*s[1]");
        let vals = [(alpha(1, 0), 7), (Unknown::Slack(0), 3)].into_iter().map(|(u, x)| (u, BigInt::from(x))).collect();
        assert_eq!(sys.equations[0].expr.eval(&vals), BigInt::from(0));
    }
}
