//! Todd-Coxeter enumeration of the cosets of the trivial subgroup (HLT
//! strategy with immediate coincidence processing).

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::presentation::Presentation;
use crate::words::Generator;

const UNDEFINED: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CosetError {
    #[error("max_cosets must be at least 1")]
    ZeroLimit,
    #[error("relator uses {0}, which is not a generator of the presentation")]
    UnknownGenerator(Generator),
}

/// Column `2g` is generator `g`, column `2g + 1` its inverse.
fn inverse_column(x: usize) -> usize {
    x ^ 1
}

/// Live coset table together with the forwarding array used to process
/// coincidences.
#[derive(Debug, Clone)]
pub struct CosetTable {
    columns: usize,
    table: Vec<Vec<usize>>,
    forward: Vec<usize>,
    live: usize,
    max_cosets: usize,
    queue: Vec<usize>,
}

struct Overflow;

impl CosetTable {
    fn new(generators: usize, max_cosets: usize) -> Self {
        let columns = 2 * generators;
        CosetTable {
            columns,
            table: vec![vec![UNDEFINED; columns]],
            forward: vec![0],
            live: 1,
            max_cosets,
            queue: Vec::new(),
        }
    }

    fn is_live(&self, c: usize) -> bool {
        self.forward[c] == c
    }

    pub fn live_cosets(&self) -> usize {
        self.live
    }

    pub fn defined_cosets(&self) -> usize {
        self.table.len()
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut root = c;
        while self.forward[root] != root {
            root = self.forward[root];
        }
        let mut x = c;
        while self.forward[x] != root {
            let next = self.forward[x];
            self.forward[x] = root;
            x = next;
        }
        root
    }

    fn define(&mut self, c: usize, x: usize) -> Result<(), Overflow> {
        if self.live >= self.max_cosets {
            return Err(Overflow);
        }
        let d = self.table.len();
        self.table.push(vec![UNDEFINED; self.columns]);
        self.forward.push(d);
        self.live += 1;
        self.table[c][x] = d;
        self.table[d][inverse_column(x)] = c;
        Ok(())
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> Result<(), Overflow> {
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0isize, w.len() as isize - 1);
        loop {
            while i <= j && self.table[f][w[i as usize]] != UNDEFINED {
                f = self.table[f][w[i as usize]];
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i && self.table[b][inverse_column(w[j as usize])] != UNDEFINED {
                b = self.table[b][inverse_column(w[j as usize])];
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            } else if i == j {
                let x = w[i as usize];
                self.table[f][x] = b;
                self.table[b][inverse_column(x)] = f;
                return Ok(());
            }
            self.define(f, w[i as usize])?;
        }
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, drop) = (a.min(b), a.max(b));
        self.forward[drop] = keep;
        self.live -= 1;
        self.queue.push(drop);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.queue.clear();
        self.merge(a, b);
        let mut idx = 0;
        while idx < self.queue.len() {
            let gamma = self.queue[idx];
            idx += 1;
            for x in 0..self.columns {
                let delta = self.table[gamma][x];
                if delta == UNDEFINED {
                    continue;
                }
                let xi = inverse_column(x);
                if self.table[delta][xi] == gamma {
                    self.table[delta][xi] = UNDEFINED;
                }
                let mu = self.rep(gamma);
                let nu = self.rep(delta);
                if self.table[mu][x] != UNDEFINED {
                    let t = self.table[mu][x];
                    self.merge(nu, t);
                } else if self.table[nu][xi] != UNDEFINED {
                    let t = self.table[nu][xi];
                    self.merge(mu, t);
                } else {
                    self.table[mu][x] = nu;
                    self.table[nu][xi] = mu;
                }
            }
        }
    }
}

/// A finite group realized as the regular permutation action on cosets of
/// the trivial subgroup. Coset 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    generators: Vec<Generator>,
    action: Vec<Vec<usize>>,
    representatives: Vec<Vec<usize>>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.action.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// `coset * generator` (column `2g`) and `coset * generator^-1` (column `2g+1`).
    pub fn action(&self) -> &[Vec<usize>] {
        &self.action
    }

    /// Shortest-first word (as table columns) reaching each element from the identity.
    pub fn representative(&self, element: usize) -> &[usize] {
        &self.representatives[element]
    }

    fn trace(&self, start: usize, columns: &[usize]) -> usize {
        columns.iter().fold(start, |c, &x| self.action[c][x])
    }

    /// `table[a][b]` is the product `a * b`.
    pub fn multiplication_table(&self) -> Vec<Vec<usize>> {
        (0..self.order())
            .map(|a| (0..self.order()).map(|b| self.trace(a, &self.representatives[b])).collect())
            .collect()
    }

    pub fn element_orders(&self) -> Vec<usize> {
        (0..self.order())
            .map(|a| {
                let rep = &self.representatives[a];
                let mut x = self.trace(0, rep);
                let mut k = 1;
                while x != 0 {
                    x = self.trace(x, rep);
                    k += 1;
                }
                k
            })
            .collect()
    }

    /// Number of elements of each order.
    pub fn order_census(&self) -> BTreeMap<usize, usize> {
        let mut census = BTreeMap::new();
        for k in self.element_orders() {
            *census.entry(k).or_insert(0) += 1;
        }
        census
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enumeration {
    Complete(FiniteGroup),
    /// The table needed more than `max_cosets` live cosets.
    Overflow {
        max_cosets: usize,
        defined: usize,
    },
}

impl Enumeration {
    pub fn order(&self) -> Option<usize> {
        match self {
            Enumeration::Complete(g) => Some(g.order()),
            Enumeration::Overflow { .. } => None,
        }
    }
}

/// Enumerates with relators given as sequences of table columns.
pub fn enumerate_cosets(
    generators: usize,
    relators: &[Vec<usize>],
    max_cosets: usize,
) -> Result<CosetOutcome, CosetError> {
    if max_cosets == 0 {
        return Err(CosetError::ZeroLimit);
    }
    let mut t = CosetTable::new(generators, max_cosets);
    let overflow = |t: &CosetTable| CosetOutcome::Overflow { max_cosets, defined: t.defined_cosets() };
    let mut c = 0;
    while c < t.table.len() {
        for r in relators {
            if !t.is_live(c) {
                break;
            }
            if t.scan_and_fill(c, r).is_err() {
                return Ok(overflow(&t));
            }
        }
        if t.is_live(c) {
            for x in 0..t.columns {
                if t.table[c][x] == UNDEFINED && t.define(c, x).is_err() {
                    return Ok(overflow(&t));
                }
            }
        }
        c += 1;
    }
    Ok(CosetOutcome::Closed(compact(&mut t)))
}

/// Raw result of [`enumerate_cosets`]: the compacted table or an overflow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CosetOutcome {
    Closed(Vec<Vec<usize>>),
    Overflow { max_cosets: usize, defined: usize },
}

fn compact(t: &mut CosetTable) -> Vec<Vec<usize>> {
    let live: Vec<usize> = (0..t.table.len()).filter(|&c| t.is_live(c)).collect();
    let mut index = vec![UNDEFINED; t.table.len()];
    for (k, &c) in live.iter().enumerate() {
        index[c] = k;
    }
    live.iter()
        .map(|&c| {
            (0..t.columns)
                .map(|x| {
                    let target = t.table[c][x];
                    let r = t.rep(target);
                    index[r]
                })
                .collect()
        })
        .collect()
}

fn bfs_representatives(action: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut reps: Vec<Option<Vec<usize>>> = vec![None; action.len()];
    reps[0] = Some(Vec::new());
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for (x, &d) in action[c].iter().enumerate() {
            if reps[d].is_none() {
                let mut w = reps[c].clone().unwrap_or_default();
                w.push(x);
                reps[d] = Some(w);
                queue.push_back(d);
            }
        }
    }
    reps.into_iter().map(|r| r.expect("coset table is connected")).collect()
}

/// Enumerates the cosets of the trivial subgroup of the presented group.
pub fn todd_coxeter(p: &Presentation, max_cosets: usize) -> Result<Enumeration, CosetError> {
    let gens = p.generators();
    let column = |g: Generator, e: i8| -> Result<usize, CosetError> {
        let idx = gens.iter().position(|&h| h == g).ok_or(CosetError::UnknownGenerator(g))?;
        Ok(2 * idx + usize::from(e < 0))
    };
    let relators = p
        .relators()
        .iter()
        .map(|(w, _)| w.unit_letters().into_iter().map(|(g, e)| column(g, e)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match enumerate_cosets(gens.len(), &relators, max_cosets)? {
        CosetOutcome::Closed(action) => {
            let representatives = bfs_representatives(&action);
            Enumeration::Complete(FiniteGroup { generators: gens.to_vec(), action, representatives })
        }
        CosetOutcome::Overflow { max_cosets, defined } => Enumeration::Overflow { max_cosets, defined },
    })
}
