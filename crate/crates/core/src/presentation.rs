//! The presentation of the pure braid group `P_n(RP^2)`.
//!
//! Generators are `B_{i,j}` (`1 <= i < j <= n`) and `rho_k` (`1 <= k <= n`).
//! Relations come in four families:
//!
//! * (a) Artin relations `B_{r,s} B_{i,j} B_{r,s}^-1 = ...` among the `B`s;
//! * (b) `rho_i rho_j rho_i^-1 = rho_j^-1 B_{i,j}^-1 rho_j^2` for `i < j`;
//! * (c) surface relations `rho_i^2 = B_{1,i} ... B_{i-1,i} B_{i,i+1} ... B_{i,n}`;
//! * (d) `rho_k B_{i,j} rho_k^-1 = ...` for `k != j`.
//!
//! Each relation `lhs = rhs` is stored as the reduced relator `lhs rhs^-1`.
//! The four supplementary identities (I)-(IV) are consequences of (b) and
//! (d); they are exposed separately as targets for the rewrite prover.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::words::{parse_generator_list, parse_word, Generator, Word, WordError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    ArtinA,
    RhoRhoB,
    SurfaceC,
    RhoBD,
    Supplementary,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::ArtinA => "a",
            Family::RhoRhoB => "b",
            Family::SurfaceC => "c",
            Family::RhoBD => "d",
            Family::Supplementary => "s",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Family> {
        Some(match tag {
            "a" => Family::ArtinA,
            "b" => Family::RhoRhoB,
            "c" => Family::SurfaceC,
            "d" => Family::RhoBD,
            "s" => Family::Supplementary,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SupplementaryKind {
    I,
    II,
    III,
    IV,
}

impl SupplementaryKind {
    pub const ALL: [SupplementaryKind; 4] =
        [SupplementaryKind::I, SupplementaryKind::II, SupplementaryKind::III, SupplementaryKind::IV];

    pub fn label(self) -> &'static str {
        match self {
            SupplementaryKind::I => "(I)",
            SupplementaryKind::II => "(II)",
            SupplementaryKind::III => "(III)",
            SupplementaryKind::IV => "(IV)",
        }
    }
}

/// Identifies one instance of a relation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationId {
    /// Conjugation of `B_{i,j}` by `B_{r,s}`.
    Artin {
        r: u32,
        s: u32,
        i: u32,
        j: u32,
    },
    RhoRho {
        i: u32,
        j: u32,
    },
    Surface {
        i: u32,
    },
    /// Conjugation of `B_{i,j}` by `rho_k`.
    RhoB {
        k: u32,
        i: u32,
        j: u32,
    },
    Supplementary {
        kind: SupplementaryKind,
        i: u32,
        j: u32,
    },
}

impl RelationId {
    pub fn family(self) -> Family {
        match self {
            RelationId::Artin { .. } => Family::ArtinA,
            RelationId::RhoRho { .. } => Family::RhoRhoB,
            RelationId::Surface { .. } => Family::SurfaceC,
            RelationId::RhoB { .. } => Family::RhoBD,
            RelationId::Supplementary { .. } => Family::Supplementary,
        }
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RelationId::Artin { r, s, i, j } => write!(f, "a[{r},{s};{i},{j}]"),
            RelationId::RhoRho { i, j } => write!(f, "b[{i},{j}]"),
            RelationId::Surface { i } => write!(f, "c[{i}]"),
            RelationId::RhoB { k, i, j } => write!(f, "d[{k};{i},{j}]"),
            RelationId::Supplementary { kind, i, j } => write!(f, "{}[{i},{j}]", kind.label()),
        }
    }
}

/// A relation `lhs = rhs` of `P_n(RP^2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub id: RelationId,
    pub lhs: Word,
    pub rhs: Word,
}

impl Relation {
    pub fn family(&self) -> Family {
        self.id.family()
    }

    /// The reduced relator `lhs * rhs^-1`.
    pub fn relator(&self) -> Word {
        self.lhs.mul(&self.rhs.inverse())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("strand count must be at least {min}, got {n}")]
    StrandCount { n: u32, min: u32 },
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Word { line: usize, source: WordError },
    #[error("relator {0} is empty or not freely reduced")]
    BadRelator(String),
    #[error("relator {relator} uses {gen}, which is not a generator")]
    UnknownGenerator { relator: String, gen: String },
}

/// A finite presentation with family-tagged relators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    n: u32,
    generators: Vec<Generator>,
    relators: Vec<(Word, Family)>,
}

impl Presentation {
    /// Builds a presentation after checking that every relator is nonempty,
    /// freely reduced and written in the listed generators.
    pub fn new(n: u32, generators: Vec<Generator>, relators: Vec<(Word, Family)>) -> Result<Self, PresentationError> {
        let gens: HashSet<Generator> = generators.iter().copied().collect();
        for (w, _) in &relators {
            if w.is_empty() || !w.is_reduced() {
                return Err(PresentationError::BadRelator(w.to_string()));
            }
            if let Some(g) = w.generators().find(|g| !gens.contains(g)) {
                return Err(PresentationError::UnknownGenerator { relator: w.to_string(), gen: g.to_string() });
            }
        }
        Ok(Presentation { n, generators, relators })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relators(&self) -> &[(Word, Family)] {
        &self.relators
    }

    pub fn relators_of(&self, family: Family) -> impl Iterator<Item = &Word> + '_ {
        self.relators.iter().filter(move |(_, f)| *f == family).map(|(w, _)| w)
    }
}

/// Generators of `P_n(RP^2)`: all `B_{i,j}` in lexicographic order, then
/// `rho_1 .. rho_n`.
pub fn generators(n: u32) -> Vec<Generator> {
    let mut gens = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            gens.push(Generator::B(i, j));
        }
    }
    gens.extend((1..=n).map(Generator::Rho));
    gens
}

fn word(n: u32, pairs: &[(Generator, i64)]) -> Word {
    Word::from_pairs(n, pairs)
}

use Generator::{Rho, B};

/// Right-hand side of the Artin relation for `B_{r,s} B_{i,j} B_{r,s}^-1`,
/// or `None` when the index configuration is not one of the four cases.
fn artin_rhs(n: u32, r: u32, s: u32, i: u32, j: u32) -> Option<Word> {
    if (i < r && r < s && s < j) || (r < s && s < i && i < j) {
        Some(word(n, &[(B(i, j), 1)]))
    } else if r < i && i == s && s < j {
        Some(word(n, &[(B(i, j), -1), (B(r, j), -1), (B(i, j), 1), (B(r, j), 1), (B(i, j), 1)]))
    } else if i == r && r < s && s < j {
        Some(word(n, &[(B(s, j), -1), (B(i, j), 1), (B(s, j), 1)]))
    } else if r < i && i < s && s < j {
        Some(word(
            n,
            &[
                (B(s, j), -1),
                (B(r, j), -1),
                (B(s, j), 1),
                (B(r, j), 1),
                (B(i, j), 1),
                (B(r, j), -1),
                (B(s, j), -1),
                (B(r, j), 1),
                (B(s, j), 1),
            ],
        ))
    } else {
        None
    }
}

/// Right-hand side of `rho_k B_{i,j} rho_k^-1 = ...` (requires `k != j`).
fn rho_b_rhs(n: u32, k: u32, i: u32, j: u32) -> Word {
    debug_assert!(k != j);
    if j < k || k < i {
        word(n, &[(B(i, j), 1)])
    } else if k == i {
        word(n, &[(Rho(j), -1), (B(i, j), -1), (Rho(j), 1)])
    } else {
        word(
            n,
            &[
                (Rho(j), -1),
                (B(k, j), -1),
                (Rho(j), 1),
                (B(k, j), -1),
                (B(i, j), 1),
                (B(k, j), 1),
                (Rho(j), -1),
                (B(k, j), 1),
                (Rho(j), 1),
            ],
        )
    }
}

/// `B_{1,i} ... B_{i-1,i} B_{i,i+1} ... B_{i,n}`; empty when `n = 1`.
pub fn surface_product(n: u32, i: u32) -> Word {
    let mut pairs: Vec<(Generator, i64)> = (1..i).map(|a| (B(a, i), 1)).collect();
    pairs.extend((i + 1..=n).map(|b| (B(i, b), 1)));
    word(n, &pairs)
}

/// All relations of families (a)-(d), in that order.
pub fn relations(n: u32) -> Result<Vec<Relation>, PresentationError> {
    if n < 1 {
        return Err(PresentationError::StrandCount { n, min: 1 });
    }
    let pairs: Vec<(u32, u32)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();

    for &(r, s) in &pairs {
        for &(i, j) in &pairs {
            if let Some(rhs) = artin_rhs(n, r, s, i, j) {
                let lhs = word(n, &[(B(r, s), 1), (B(i, j), 1), (B(r, s), -1)]);
                out.push(Relation { id: RelationId::Artin { r, s, i, j }, lhs, rhs });
            }
        }
    }
    for &(i, j) in &pairs {
        out.push(Relation {
            id: RelationId::RhoRho { i, j },
            lhs: word(n, &[(Rho(i), 1), (Rho(j), 1), (Rho(i), -1)]),
            rhs: word(n, &[(Rho(j), -1), (B(i, j), -1), (Rho(j), 2)]),
        });
    }
    for i in 1..=n {
        out.push(Relation { id: RelationId::Surface { i }, lhs: word(n, &[(Rho(i), 2)]), rhs: surface_product(n, i) });
    }
    for &(i, j) in &pairs {
        for k in (1..=n).filter(|&k| k != j) {
            out.push(Relation {
                id: RelationId::RhoB { k, i, j },
                lhs: word(n, &[(Rho(k), 1), (B(i, j), 1), (Rho(k), -1)]),
                rhs: rho_b_rhs(n, k, i, j),
            });
        }
    }
    Ok(out)
}

/// Supplementary identities (I)-(IV) for every `1 <= i < j <= n`, grouped by
/// index pair.
pub fn supplementary_relations(n: u32) -> Vec<Relation> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            for kind in SupplementaryKind::ALL {
                let (lhs, rhs) = match kind {
                    SupplementaryKind::I => {
                        (word(n, &[(Rho(i), -1), (Rho(j), 1), (Rho(i), 1)]), word(n, &[(B(i, j), -1), (Rho(j), 1)]))
                    }
                    SupplementaryKind::II => (
                        word(n, &[(Rho(j), 1), (B(i, j), 1), (Rho(j), -1)]),
                        word(n, &[(B(i, j), 1), (Rho(i), -1), (B(i, j), -1), (Rho(i), 1), (B(i, j), -1)]),
                    ),
                    SupplementaryKind::III => {
                        (word(n, &[(Rho(j), 1), (Rho(i), 1), (Rho(j), -1)]), word(n, &[(Rho(i), 1), (B(i, j), -1)]))
                    }
                    SupplementaryKind::IV => (
                        word(n, &[(Rho(j), -1), (Rho(i), 1), (Rho(j), 1)]),
                        word(n, &[(Rho(i), 2), (B(i, j), -1), (Rho(i), -1)]),
                    ),
                };
                out.push(Relation { id: RelationId::Supplementary { kind, i, j }, lhs, rhs });
            }
        }
    }
    out
}

/// The presentation of `P_n(RP^2)`; duplicated relators are kept once.
pub fn build_pn_rp2(n: u32) -> Result<Presentation, PresentationError> {
    let mut seen = HashSet::new();
    let mut relators = Vec::new();
    for rel in relations(n)? {
        let r = rel.relator();
        if seen.insert(r.clone()) {
            relators.push((r, rel.family()));
        }
    }
    Presentation::new(n, generators(n), relators)
}

/// Serializes a presentation:
///
/// ```text
/// pn_rp2 n=<n>
/// gens: <atom>, <atom>, ...
/// rel <family>: <word>
/// ```
pub fn export_presentation(p: &Presentation) -> String {
    let mut out = format!("pn_rp2 n={}\n", p.n);
    let gens: Vec<String> = p.generators.iter().map(|g| g.to_string()).collect();
    out.push_str(&format!("gens: {}\n", gens.join(", ")));
    for (w, fam) in &p.relators {
        out.push_str(&format!("rel {}: {}\n", fam.tag(), w));
    }
    out
}

pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    let mut lines = text.lines().enumerate();
    let fmt_err = |line: usize, msg: &str| PresentationError::Format { line, msg: msg.to_string() };

    let (_, header) = lines.next().ok_or_else(|| fmt_err(1, "missing header"))?;
    let n: u32 = header
        .strip_prefix("pn_rp2 n=")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| fmt_err(1, "expected `pn_rp2 n=<int>`"))?;

    let (_, gens_line) = lines.next().ok_or_else(|| fmt_err(2, "missing generator line"))?;
    let gens_text = gens_line.strip_prefix("gens:").ok_or_else(|| fmt_err(2, "expected `gens:`"))?;
    let generators =
        parse_generator_list(gens_text, n).map_err(|source| PresentationError::Word { line: 2, source })?;

    let mut relators = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rest = line.strip_prefix("rel ").ok_or_else(|| fmt_err(lineno, "expected `rel <family>: <word>`"))?;
        let (tag, body) = rest.split_once(':').ok_or_else(|| fmt_err(lineno, "missing `:`"))?;
        let family = Family::from_tag(tag.trim()).ok_or_else(|| fmt_err(lineno, "unknown family tag"))?;
        let w = parse_word(body, n).map_err(|source| PresentationError::Word { line: lineno, source })?;
        relators.push((w, family));
    }
    Presentation::new(n, generators, relators)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(p: &Presentation, f: Family) -> usize {
        p.relators_of(f).count()
    }

    /// Brute-force count of index configurations hitting one of the four
    /// Artin cases, written independently of `artin_rhs`.
    fn artin_case_count(n: u32) -> usize {
        let mut c = 0;
        for r in 1..=n {
            for s in r + 1..=n {
                for i in 1..=n {
                    for j in i + 1..=n {
                        let cases =
                            [i < r && s < j, s < i, r < i && i == s && s < j, i == r && s < j, r < i && i < s && s < j];
                        if cases.iter().any(|&b| b) {
                            c += 1;
                        }
                    }
                }
            }
        }
        c
    }

    #[test]
    fn n1_is_z2() {
        let p = build_pn_rp2(1).unwrap();
        assert_eq!(p.generators(), &[Rho(1)]);
        assert_eq!(p.relators().len(), 1);
        assert_eq!(p.relators()[0].0, word(1, &[(Rho(1), 2)]));
        assert_eq!(p.relators()[0].1, Family::SurfaceC);
    }

    #[test]
    fn n2_relators() {
        let p = build_pn_rp2(2).unwrap();
        assert_eq!(p.generators(), &[B(1, 2), Rho(1), Rho(2)]);
        assert_eq!(count(&p, Family::ArtinA), 0);
        assert_eq!(count(&p, Family::RhoRhoB), 1);
        assert_eq!(count(&p, Family::SurfaceC), 2);
        assert_eq!(count(&p, Family::RhoBD), 1);
        let surface: Vec<&Word> = p.relators_of(Family::SurfaceC).collect();
        assert_eq!(*surface[0], word(2, &[(Rho(1), 2), (B(1, 2), -1)]));
        assert_eq!(*surface[1], word(2, &[(Rho(2), 2), (B(1, 2), -1)]));
        let d: Vec<&Word> = p.relators_of(Family::RhoBD).collect();
        assert_eq!(*d[0], word(2, &[(Rho(1), 1), (B(1, 2), 1), (Rho(1), -1), (Rho(2), -1), (B(1, 2), 1), (Rho(2), 1)]));
    }

    #[test]
    fn n3_family_sizes() {
        let p = build_pn_rp2(3).unwrap();
        assert_eq!(count(&p, Family::RhoRhoB), 3);
        assert_eq!(count(&p, Family::SurfaceC), 3);
        assert_eq!(count(&p, Family::RhoBD), 6);
        assert_eq!(count(&p, Family::ArtinA), artin_case_count(3));
        assert_eq!(artin_case_count(3), 2);
        assert_eq!(p.generators().len(), 3 + 3);
    }

    #[test]
    fn artin_counts_match_brute_force() {
        for n in 1..=7 {
            let p = build_pn_rp2(n).unwrap();
            assert_eq!(count(&p, Family::ArtinA), artin_case_count(n), "n={n}");
            let g = n * (n - 1) / 2 + n;
            assert_eq!(p.generators().len() as u32, g);
        }
    }

    #[test]
    fn family_b_relator_orientation() {
        let p = build_pn_rp2(2).unwrap();
        let b = p.relators_of(Family::RhoRhoB).next().unwrap();
        assert_eq!(*b, word(2, &[(Rho(1), 1), (Rho(2), 1), (Rho(1), -1), (Rho(2), -2), (B(1, 2), 1), (Rho(2), 1)]));
    }

    #[test]
    fn rejects_zero_strands() {
        assert!(matches!(build_pn_rp2(0), Err(PresentationError::StrandCount { .. })));
    }

    #[test]
    fn supplementary_counts_and_labels() {
        assert_eq!(supplementary_relations(2).len(), 4);
        assert_eq!(supplementary_relations(3).len(), 12);
        let iii = supplementary_relations(2)
            .into_iter()
            .find(|r| matches!(r.id, RelationId::Supplementary { kind: SupplementaryKind::III, i: 1, j: 2 }))
            .unwrap();
        assert_eq!(iii.lhs, word(2, &[(Rho(2), 1), (Rho(1), 1), (Rho(2), -1)]));
        assert_eq!(iii.rhs, word(2, &[(Rho(1), 1), (B(1, 2), -1)]));
        assert_eq!(SupplementaryKind::III.label(), "(III)");
    }

    #[test]
    fn export_format() {
        let text = export_presentation(&build_pn_rp2(1).unwrap());
        assert_eq!(text, "pn_rp2 n=1\ngens: rho[1]\nrel c: rho[1]^2\n");
        let text2 = export_presentation(&build_pn_rp2(2).unwrap());
        let tags: Vec<&str> = text2.lines().skip(2).map(|l| &l[4..5]).collect();
        assert_eq!(tags, vec!["b", "c", "c", "d"]);
        assert!(text2.starts_with("pn_rp2 n=2\ngens: B[1,2], rho[1], rho[2]\n"));
    }

    #[test]
    fn export_parse_round_trip() {
        for n in 1..=5 {
            let p = build_pn_rp2(n).unwrap();
            assert_eq!(parse_presentation(&export_presentation(&p)).unwrap(), p);
        }
    }

    #[test]
    fn parse_rejects_foreign_generator() {
        let text = "pn_rp2 n=2\ngens: B[1,2], rho[1]\nrel c: rho[2]^2\n";
        assert!(matches!(parse_presentation(text), Err(PresentationError::UnknownGenerator { .. })));
        assert!(matches!(parse_presentation("nope"), Err(PresentationError::Format { line: 1, .. })));
    }

    #[test]
    fn inherited_relators() {
        for n in 2..=6 {
            let small = build_pn_rp2(n).unwrap();
            let big = build_pn_rp2(n + 1).unwrap();
            let big_set: HashSet<Word> = big.relators().iter().map(|(w, _)| w.with_context(n + 1).unwrap()).collect();
            for (w, fam) in small.relators() {
                let lifted = w.with_context(n + 1).unwrap();
                let present = big_set.contains(&lifted);
                if *fam == Family::SurfaceC {
                    assert!(!present, "surface relator {w} leaked into n={}", n + 1);
                } else {
                    assert!(present, "relator {w} missing from n={}", n + 1);
                }
            }
        }
    }
}
