//! Hand-derived consequences of individual relations at n = 3, checked
//! against the generated constraint systems with a standalone GF(2)
//! elimination.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use pnrp2_core::obstruction::{
    obstruct, AffineExpr, ConstraintBuilder, Mode, Origin, ParityAssignment, Unknown, Verdict,
};
use pnrp2_core::presentation::RelationId;

/// A GF(2) row: the unknowns with odd coefficient and the constant bit.
#[derive(Clone, Debug, PartialEq)]
struct Row {
    vars: BTreeSet<Unknown>,
    constant: bool,
}

impl Row {
    fn of(expr: &AffineExpr) -> Row {
        let vars = expr.terms().iter().filter(|(_, c)| c.is_odd()).map(|(u, _)| u.clone()).collect();
        Row { vars, constant: expr.constant_term().is_odd() }
    }

    fn add(&mut self, other: &Row) {
        self.vars = self.vars.symmetric_difference(&other.vars).cloned().collect();
        self.constant ^= other.constant;
    }
}

/// A GF(2) row space in reduced echelon form: each basis row contains its
/// own pivot and no other pivot.
#[derive(Default)]
struct Span {
    basis: Vec<(Unknown, Row)>,
    inconsistent: bool,
}

impl Span {
    fn reduce(&self, mut r: Row) -> Row {
        for (pivot, b) in &self.basis {
            if r.vars.contains(pivot) {
                r.add(b);
            }
        }
        r
    }

    fn insert(&mut self, r: Row) {
        let r = self.reduce(r);
        match r.vars.iter().next().cloned() {
            Some(pivot) => {
                for (_, b) in &mut self.basis {
                    if b.vars.contains(&pivot) {
                        b.add(&r);
                    }
                }
                self.basis.push((pivot, r));
            }
            None => self.inconsistent |= r.constant,
        }
    }

    fn inconsistent(&self) -> bool {
        self.inconsistent
    }

    fn contains(&self, r: &Row) -> bool {
        let r = self.reduce(r.clone());
        r.vars.is_empty() && !r.constant
    }
}

fn alpha(i: u32, k: u32) -> Unknown {
    Unknown::Alpha { i, k }
}

fn beta(i: u32, j: u32, k: u32) -> Unknown {
    Unknown::Beta { i, j, k }
}

fn target(vars: &[Unknown], constant: bool) -> Row {
    let mut r = Row { vars: BTreeSet::new(), constant };
    for u in vars {
        r.add(&Row { vars: BTreeSet::from([u.clone()]), constant: false });
    }
    r
}

fn delta(parity: &ParityAssignment, u: &Unknown) -> bool {
    parity.get(u).unwrap().is_odd()
}

fn span_of(builder: &ConstraintBuilder, parity: &ParityAssignment, keep: impl Fn(RelationId) -> bool) -> Span {
    let mut span = Span::default();
    for eq in builder.system(parity).unwrap().iter() {
        let wanted = match &eq.origin {
            Origin::Relation { id, .. } => keep(*id),
            Origin::Parity(_) => true,
            Origin::Given(_) => false,
        };
        if wanted {
            span.insert(Row::of(&eq.expr));
        }
    }
    span
}

fn branches(n: u32, mode: Mode) -> Vec<ParityAssignment> {
    let report = obstruct(n, mode).unwrap();
    assert!(!report.branches.is_empty());
    report.branches.into_iter().map(|b| b.parity).collect()
}

#[test]
fn conjugating_rho_i_by_rho_j_fixes_beta_parities() {
    let n = 3;
    let builder = ConstraintBuilder::new(n, Mode::PaperSubset).unwrap();
    for parity in branches(n, Mode::PaperSubset) {
        let d = |i| delta(&parity, &alpha(i, 0));
        let span = span_of(&builder, &parity, |id| id == RelationId::RhoRho { i: 1, j: 2 });
        assert!(!span.inconsistent());
        assert!(span.contains(&target(&[beta(1, 2, 0)], false)));
        assert!(span.contains(&target(&[beta(1, 2, 1)], d(2))));
        assert!(span.contains(&target(&[beta(1, 2, 2)], d(1))));

        for i in 1..n {
            let span = span_of(&builder, &parity, |id| id == RelationId::RhoRho { i, j: n });
            assert!(!span.inconsistent());
            assert!(span.contains(&target(&[beta(i, n, 0)], false)));
            for k in 1..n {
                let expected = if k == i { d(i) ^ d(n) } else { d(i) };
                assert!(span.contains(&target(&[beta(i, n, k)], expected)), "beta[{i},{n},{k}]");
            }
        }
    }
}

#[test]
fn surface_relations_give_the_rho_squared_congruences() {
    let n = 3;
    let builder = ConstraintBuilder::new(n, Mode::PaperSubset).unwrap();
    for parity in branches(n, Mode::PaperSubset) {
        for i in 1..n {
            let span = span_of(&builder, &parity, |id| id == RelationId::Surface { i });
            let mut vars: Vec<Unknown> = (1..i).map(|j| beta(j, i, i)).collect();
            vars.extend((i + 1..=n).map(|j| beta(i, j, i)));
            let d = delta(&parity, &alpha(i, 0));
            assert!(span.contains(&target(&vars, !d)), "i={i}");
        }
    }
}

#[test]
fn every_branch_breaks_the_delta_sum_rule() {
    let n = 3;
    let builder = ConstraintBuilder::new(n, Mode::PaperSubset).unwrap();
    for parity in branches(n, Mode::PaperSubset) {
        let d: Vec<bool> = (1..=n).map(|i| delta(&parity, &alpha(i, 0))).collect();
        let total = d.iter().fold(false, |a, &b| a ^ b);
        let rule_holds = (0..(n - 1) as usize).all(|i| d[i] == !total);
        assert!(!rule_holds, "{d:?}");
        assert!(d[0] ^ d[1], "exactly one of alpha[1,0], alpha[2,0] is odd");
        let span =
            span_of(&builder, &parity, |id| matches!(id, RelationId::RhoRho { .. } | RelationId::Surface { .. }));
        assert!(span.inconsistent(), "{d:?}");
    }
}

/// Every integer point of a box solving the m0 equations also satisfies
/// the three hand-derived integer identities, and such points exist.
#[test]
fn m0_equations_force_the_integer_identities() {
    let builder = ConstraintBuilder::new(3, Mode::PaperSubset).unwrap();
    let system = builder.m0_system().unwrap();
    let unknowns: Vec<Unknown> = system.unknowns().into_iter().collect();
    assert_eq!(unknowns, vec![alpha(1, 0), alpha(2, 0), beta(1, 2, 0), beta(1, 3, 0), beta(2, 3, 0)]);
    let mut values: BTreeMap<Unknown, BigInt> = unknowns.iter().map(|u| (u.clone(), BigInt::from(-3))).collect();
    let v = |values: &BTreeMap<Unknown, BigInt>, u: Unknown| values[&u].clone();
    let mut solutions = 0;
    'outer: loop {
        if system.iter().all(|e| e.expr.eval(&values).is_zero()) {
            solutions += 1;
            assert!(v(&values, beta(1, 2, 0)).is_zero());
            for i in 1..=2 {
                assert_eq!(v(&values, beta(i, 3, 0)), v(&values, alpha(i, 0)) * 2);
            }
            assert_eq!(v(&values, alpha(1, 0)) + v(&values, alpha(2, 0)), BigInt::from(1));
        }
        for u in &unknowns {
            let x = values.get_mut(u).unwrap();
            if *x < BigInt::from(3) {
                *x += 1;
                continue 'outer;
            }
            *x = BigInt::from(-3);
        }
        break;
    }
    assert!(solutions > 0);
}

#[test]
fn reduced_relation_set_obstruction_carries_over_to_the_full_set() {
    for n in 3..=4 {
        assert_eq!(obstruct(n, Mode::PaperSubset).unwrap().verdict, Verdict::Unsat);
        assert_eq!(obstruct(n, Mode::Full).unwrap().verdict, Verdict::Unsat);
    }
}
