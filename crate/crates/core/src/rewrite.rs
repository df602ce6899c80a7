//! Bounded rewriting: shows two words equal modulo the relators of a
//! presentation by bidirectional breadth-first search, returning a trace
//! that can be replayed step by step.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::presentation::Presentation;
use crate::words::{Generator, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("{gen} is not a generator of the presentation")]
    ForeignGenerator { gen: Generator },
    #[error("words live in different contexts (n={0} and n={1})")]
    ContextMismatch(u32, u32),
    #[error("search bounds must be positive")]
    ZeroBound,
    #[error("no rule R{0}")]
    UnknownRule(usize),
    #[error("rule R{rule} does not match at position {pos}")]
    NoMatch { rule: usize, pos: usize },
}

/// `lhs` may be replaced by `rhs` inside any word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub id: usize,
    pub lhs: Word,
    pub rhs: Word,
    /// Index of the relator the rule was read off from.
    pub relator: usize,
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}: {} -> {}", self.id, show(&self.lhs), show(&self.rhs))
    }
}

fn show(w: &Word) -> String {
    if w.is_identity() {
        "1".to_string()
    } else {
        w.to_string()
    }
}

type Code = u16;

/// Letters are coded as `2 * generator index + (1 if inverted)`.
#[derive(Debug, Clone)]
struct Alphabet {
    n: u32,
    generators: Vec<Generator>,
    index: HashMap<Generator, Code>,
}

impl Alphabet {
    fn new(n: u32, generators: &[Generator]) -> Self {
        let index = generators.iter().enumerate().map(|(k, g)| (*g, k as Code)).collect();
        Alphabet { n, generators: generators.to_vec(), index }
    }

    fn encode(&self, w: &Word) -> Result<Vec<Code>, RewriteError> {
        w.unit_letters()
            .into_iter()
            .map(|(gen, s)| {
                let k = self.index.get(&gen).ok_or(RewriteError::ForeignGenerator { gen })?;
                Ok(2 * k + Code::from(s < 0))
            })
            .collect()
    }

    fn decode(&self, code: &[Code]) -> Word {
        let units: Vec<(Generator, i8)> =
            code.iter().map(|c| (self.generators[(c / 2) as usize], if c % 2 == 0 { 1 } else { -1 })).collect();
        Word::from_unit_letters(self.n, &units)
    }
}

fn inv(c: Code) -> Code {
    c ^ 1
}

fn reduce(code: &[Code]) -> Vec<Code> {
    let mut out: Vec<Code> = Vec::with_capacity(code.len());
    for &c in code {
        if out.last() == Some(&inv(c)) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}

fn invert(code: &[Code]) -> Vec<Code> {
    code.iter().rev().map(|&c| inv(c)).collect()
}

fn cyclically_reduce(code: &[Code]) -> Vec<Code> {
    let mut w = reduce(code);
    while w.len() >= 2 && w[0] == inv(w[w.len() - 1]) {
        w.pop();
        w.remove(0);
    }
    w
}

/// The rules of a presentation together with the lookup tables used by the
/// search.
#[derive(Debug, Clone)]
pub struct RuleSet {
    alphabet: Alphabet,
    rules: Vec<RewriteRule>,
    coded: Vec<(Vec<Code>, Vec<Code>)>,
    by_first: HashMap<Code, Vec<usize>>,
    reverse: Vec<Option<usize>>,
}

impl RuleSet {
    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&RewriteRule> {
        self.rules.get(id)
    }

    /// Applies rule `id` at letter position `pos` and freely reduces.
    pub fn apply(&self, word: &Word, id: usize, pos: usize) -> Result<Word, RewriteError> {
        let (lhs, rhs) = self.coded.get(id).ok_or(RewriteError::UnknownRule(id))?;
        let w = self.alphabet.encode(word)?;
        if pos > w.len() || !w[pos..].starts_with(lhs) {
            return Err(RewriteError::NoMatch { rule: id, pos });
        }
        Ok(self.alphabet.decode(&splice(&w, pos, lhs.len(), rhs)))
    }

    /// Every word reachable in one step, with the rule and position used.
    fn successors(&self, w: &[Code]) -> Vec<(Vec<Code>, usize, usize)> {
        let mut out = Vec::new();
        for pos in 0..w.len() {
            for &id in self.by_first.get(&w[pos]).map(Vec::as_slice).unwrap_or(&[]) {
                let (lhs, rhs) = &self.coded[id];
                if w[pos..].starts_with(lhs) {
                    out.push((splice(w, pos, lhs.len(), rhs), id, pos));
                }
            }
        }
        out
    }

    /// Words `x` with `x -> w` in one step that undoes exactly: rule `id`
    /// applied to `w` at `pos` without cancellation, so the reverse rule
    /// applied to `x` at `pos` gives back `w`.
    fn predecessors(&self, w: &[Code]) -> Vec<(Vec<Code>, usize, usize)> {
        let mut out = Vec::new();
        for pos in 0..w.len() {
            for &id in self.by_first.get(&w[pos]).map(Vec::as_slice).unwrap_or(&[]) {
                let (lhs, rhs) = &self.coded[id];
                let Some(back) = self.reverse[id] else { continue };
                if !w[pos..].starts_with(lhs) {
                    continue;
                }
                let end = pos + lhs.len();
                let joins_left = pos > 0 && w[pos - 1] == inv(rhs[0]);
                let joins_right = end < w.len() && w[end] == inv(rhs[rhs.len() - 1]);
                if joins_left || joins_right {
                    continue;
                }
                let mut x = Vec::with_capacity(w.len() - lhs.len() + rhs.len());
                x.extend_from_slice(&w[..pos]);
                x.extend_from_slice(rhs);
                x.extend_from_slice(&w[end..]);
                out.push((x, back, pos));
            }
        }
        out
    }
}

fn splice(w: &[Code], pos: usize, len: usize, rhs: &[Code]) -> Vec<Code> {
    let mut out = Vec::with_capacity(w.len() - len + rhs.len());
    out.extend_from_slice(&w[..pos]);
    out.extend_from_slice(rhs);
    out.extend_from_slice(&w[pos + len..]);
    reduce(&out)
}

/// For each relator, every cyclic rotation of it and of its inverse, split
/// at every position `u | v` into the rule `u -> v^-1`; duplicates are
/// dropped, keeping the first occurrence.
pub fn rules_from_presentation(p: &Presentation) -> RuleSet {
    let alphabet = Alphabet::new(p.n(), p.generators());
    let mut seen: HashMap<(Vec<Code>, Vec<Code>), usize> = HashMap::new();
    let mut rules = Vec::new();
    let mut coded = Vec::new();
    for (r, (relator, _)) in p.relators().iter().enumerate() {
        let base = cyclically_reduce(&alphabet.encode(relator).expect("relators use the listed generators"));
        for orientation in [base.clone(), invert(&base)] {
            for shift in 0..orientation.len() {
                let rot: Vec<Code> = orientation[shift..].iter().chain(&orientation[..shift]).copied().collect();
                for split in 1..=rot.len() {
                    let lhs = rot[..split].to_vec();
                    let rhs = invert(&rot[split..]);
                    if seen.contains_key(&(lhs.clone(), rhs.clone())) {
                        continue;
                    }
                    let id = rules.len();
                    seen.insert((lhs.clone(), rhs.clone()), id);
                    rules.push(RewriteRule { id, lhs: alphabet.decode(&lhs), rhs: alphabet.decode(&rhs), relator: r });
                    coded.push((lhs, rhs));
                }
            }
        }
    }
    let mut by_first: HashMap<Code, Vec<usize>> = HashMap::new();
    for (id, (lhs, _)) in coded.iter().enumerate() {
        by_first.entry(lhs[0]).or_default().push(id);
    }
    let reverse = coded.iter().map(|(l, r)| seen.get(&(r.clone(), l.clone())).copied()).collect();
    RuleSet { alphabet, rules, coded, by_first, reverse }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub rule: usize,
    pub pos: usize,
    /// The word after the step.
    pub word: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTrace {
    pub start: Word,
    pub steps: Vec<ProofStep>,
    pub end: Word,
}

impl ProofTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Applies the steps to `start`, checking every recorded intermediate
    /// word, and returns the final word.
    pub fn replay(&self, rules: &RuleSet) -> Result<Word, RewriteError> {
        let mut w = self.start.clone();
        for step in &self.steps {
            w = rules.apply(&w, step.rule, step.pos)?;
            if w != step.word {
                return Err(RewriteError::NoMatch { rule: step.rule, pos: step.pos });
            }
        }
        Ok(w)
    }

    pub fn verify(&self, rules: &RuleSet) -> bool {
        self.start.is_reduced()
            && self.steps.iter().all(|s| s.word.is_reduced())
            && self.replay(rules).is_ok_and(|w| w == self.end)
    }

    /// One line per step: `apply <rule-id> at <pos>: <word>`.
    pub fn export(&self) -> String {
        self.steps.iter().map(|s| format!("apply R{} at {}: {}\n", s.rule, s.pos, show(&s.word))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_depth: usize,
    pub max_frontier: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_depth: 10, max_frontier: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofOutcome {
    Found(ProofTrace),
    /// The search ended without meeting; this does not show the words differ.
    NotFound {
        depth: usize,
    },
    /// A frontier outgrew `max_frontier`.
    ResourceExceeded {
        depth: usize,
        frontier: usize,
    },
}

impl ProofOutcome {
    pub fn trace(&self) -> Option<&ProofTrace> {
        match self {
            ProofOutcome::Found(t) => Some(t),
            _ => None,
        }
    }
}

/// How a visited word was reached: from `parent` by rule `rule` at `pos`
/// (forward side), or as a word that rule `rule` at `pos` turns into
/// `parent` (backward side).
type Links = HashMap<Vec<Code>, Option<(Vec<Code>, usize, usize)>>;

/// Searches for a chain of rule applications from `lhs` to `rhs`, growing
/// the smaller frontier first. Frontiers are expanded in lexicographic
/// order, so the result does not depend on thread scheduling.
pub fn prove_identity(
    lhs: &Word,
    rhs: &Word,
    rules: &RuleSet,
    limits: SearchLimits,
) -> Result<ProofOutcome, RewriteError> {
    if lhs.n() != rhs.n() {
        return Err(RewriteError::ContextMismatch(lhs.n(), rhs.n()));
    }
    if limits.max_depth == 0 || limits.max_frontier == 0 {
        return Err(RewriteError::ZeroBound);
    }
    let start = reduce(&rules.alphabet.encode(lhs)?);
    let goal = reduce(&rules.alphabet.encode(rhs)?);

    let mut fwd: Links = HashMap::from([(start.clone(), None)]);
    let mut bwd: Links = HashMap::from([(goal.clone(), None)]);
    let mut fwd_frontier = vec![start.clone()];
    let mut bwd_frontier = vec![goal.clone()];
    let mut depth = 0;
    let mut meet = (start == goal).then(|| start.clone());

    while meet.is_none() {
        if depth >= limits.max_depth || fwd_frontier.is_empty() || bwd_frontier.is_empty() {
            return Ok(ProofOutcome::NotFound { depth });
        }
        let forward = fwd_frontier.len() <= bwd_frontier.len();
        let (frontier, links, other) =
            if forward { (&mut fwd_frontier, &mut fwd, &bwd) } else { (&mut bwd_frontier, &mut bwd, &fwd) };
        let expanded: Vec<Vec<(Vec<Code>, usize, usize)>> =
            frontier.par_iter().map(|w| if forward { rules.successors(w) } else { rules.predecessors(w) }).collect();
        let mut next = Vec::new();
        let mut next_seen = HashSet::new();
        for (parent, children) in frontier.iter().zip(expanded) {
            for (child, rule, pos) in children {
                if links.contains_key(&child) {
                    continue;
                }
                links.insert(child.clone(), Some((parent.clone(), rule, pos)));
                if meet.is_none() && other.contains_key(&child) {
                    meet = Some(child.clone());
                }
                if next_seen.insert(child.clone()) {
                    next.push(child);
                }
            }
        }
        depth += 1;
        if meet.is_none() && next.len() > limits.max_frontier {
            return Ok(ProofOutcome::ResourceExceeded { depth, frontier: next.len() });
        }
        next.sort_unstable();
        *frontier = next;
    }

    let meet = meet.expect("loop exits on a meeting point");
    let mut steps = Vec::new();
    let mut cur = meet.clone();
    while let Some(Some((parent, rule, pos))) = fwd.get(&cur) {
        steps.push(ProofStep { rule: *rule, pos: *pos, word: rules.alphabet.decode(&cur) });
        cur = parent.clone();
    }
    steps.reverse();
    let mut cur = meet;
    while let Some(Some((next, rule, pos))) = bwd.get(&cur) {
        steps.push(ProofStep { rule: *rule, pos: *pos, word: rules.alphabet.decode(next) });
        cur = next.clone();
    }
    Ok(ProofOutcome::Found(ProofTrace {
        start: rules.alphabet.decode(&start),
        steps,
        end: rules.alphabet.decode(&goal),
    }))
}
