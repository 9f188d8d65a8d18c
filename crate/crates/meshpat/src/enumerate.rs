//! Occurrence counting, binary and anchored pattern detection, greedy
//! force discovery, and brute-force enumeration of avoidance classes.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::force::{strongest_occurrences, Force, ForcedPattern};
use crate::insertion::Direction;
use crate::mesh::{sq, MeshPattern};
use crate::occurrence::{contains_mesh, mesh_in_mesh_occurrences, mesh_occurrences, Occurrence};
use crate::perm::Permutation;

/// A mesh pattern or a forced pattern; everything in this module accepts
/// both.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Pattern {
    Mesh(MeshPattern),
    Forced(ForcedPattern),
}

impl Pattern {
    pub fn classical(word: Permutation) -> Result<Self> {
        Ok(Pattern::Mesh(MeshPattern::classical(word)?))
    }

    pub fn size(&self) -> usize {
        match self {
            Pattern::Mesh(p) => p.size(),
            Pattern::Forced(fp) => fp.pattern.size(),
        }
    }

    pub fn occurrences(&self, host: &Permutation) -> Vec<Occurrence> {
        match self {
            Pattern::Mesh(p) => mesh_occurrences(host, p),
            Pattern::Forced(fp) => strongest_occurrences(host, fp),
        }
    }

    pub fn occurs_in(&self, host: &Permutation) -> bool {
        match self {
            Pattern::Mesh(p) => contains_mesh(host, p),
            // a forced pattern occurs exactly when its underlying pattern does
            Pattern::Forced(fp) => contains_mesh(host, &fp.pattern),
        }
    }
}

impl From<MeshPattern> for Pattern {
    fn from(p: MeshPattern) -> Self {
        Pattern::Mesh(p)
    }
}

impl From<ForcedPattern> for Pattern {
    fn from(fp: ForcedPattern) -> Self {
        Pattern::Forced(fp)
    }
}

/// Number of occurrences of `p` in `host` (maximal-strength occurrences
/// for a forced pattern).
pub fn occ_count(p: &Pattern, host: &Permutation) -> usize {
    p.occurrences(host).len()
}

/// A set of patterns cutting out an avoidance class. Classical members are
/// checked for pairwise non-containment so the set is a genuine basis.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Basis {
    patterns: Vec<MeshPattern>,
}

impl Basis {
    pub fn new(patterns: Vec<MeshPattern>) -> Result<Self> {
        for (i, a) in patterns.iter().enumerate() {
            for (j, b) in patterns.iter().enumerate() {
                if i != j
                    && a.shading().is_empty()
                    && b.shading().is_empty()
                    && !crate::occurrence::classical_occurrences(a.pattern(), b.pattern())
                        .is_empty()
                {
                    return Err(Error::BasisNotMinimal(i, j));
                }
            }
        }
        Ok(Basis { patterns })
    }

    pub fn patterns(&self) -> &[MeshPattern] {
        &self.patterns
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn admits(&self, host: &Permutation) -> bool {
        self.patterns.iter().all(|p| !contains_mesh(host, p))
    }
}

/// Exhaustive binarity check: a pattern of size `n` is binary exactly when
/// no permutation of size at most `2n` (within the class when a basis is
/// given) holds two occurrences; that bound is complete. Returns the first
/// witness with more than one occurrence otherwise.
pub fn is_binary(p: &Pattern, basis: Option<&Basis>) -> (bool, Option<Permutation>) {
    let bound = 2 * p.size();
    for n in 1..=bound {
        let found = Permutation::all(n)
            .into_par_iter()
            .map(|host| {
                if let Some(b) = basis {
                    if !b.admits(&host) {
                        return None;
                    }
                }
                if occ_count(p, &host) > 1 {
                    Some(host)
                } else {
                    None
                }
            })
            .reduce(
                || None,
                |a, b| match (a, b) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                },
            );
        if let Some(host) = found {
            return (false, Some(host));
        }
    }
    (true, None)
}

/// Builds a host with at least `want` occurrences of the classical pattern
/// `p` by repeatedly inserting a new maximum directly left of the current
/// one. Each insertion adds at least one occurrence.
pub fn max_duplication_witness(p: &Permutation, want: usize) -> Result<Permutation> {
    if p.is_empty() {
        return Err(Error::Invalid("the empty pattern has no witness".into()));
    }
    let mut word: Vec<u8> = p.word().to_vec();
    for _ in 1..want {
        let n = word.len() as u8;
        let at = word.iter().position(|&v| v == n).expect("maximum exists");
        word.insert(at, n + 1);
    }
    Permutation::new(word)
}

const BOUNDARY_ANCHORS: [u128; 4] = [
    // a single point with the row above fully shaded (highest point), the
    // row below (lowest), the column to its left (leftmost), or to its
    // right (rightmost)
    0b1010,
    0b0101,
    0b0011,
    0b1100,
];

fn pair_anchor_patterns() -> Vec<MeshPattern> {
    // two points separated by a fully shaded column (adjacent indices) or a
    // fully shaded row (adjacent values)
    let column = [sq(1, 0), sq(1, 1), sq(1, 2)];
    let row = [sq(0, 1), sq(1, 1), sq(2, 1)];
    let mut out = Vec::new();
    for word in ["12", "21"] {
        for squares in [column, row] {
            out.push(MeshPattern::new(word.parse().unwrap(), squares).unwrap());
        }
    }
    out
}

/// Anchoring analysis: every point must reach a boundary-anchored point
/// through a chain of point-to-point anchorings. Returns the verdict and,
/// for each point ordinal, the next point of its chain (itself when it is
/// boundary-anchored, `None` when unanchored).
pub fn is_anchored(p: &MeshPattern) -> (bool, Vec<Option<usize>>) {
    let k = p.size();
    let boundary: Vec<bool> = (1..=k)
        .map(|i| {
            let occ = Occurrence::new(vec![i]).expect("single index");
            BOUNDARY_ANCHORS.iter().any(|&mask| {
                let anchor = MeshPattern::from_mask(
                    Permutation::identity(1),
                    crate::mesh::Shading(mask),
                )
                .expect("valid anchor pattern");
                mesh_in_mesh_occurrences(p, &anchor).contains(&occ)
            })
        })
        .collect();

    let pair_patterns = pair_anchor_patterns();
    let mut adjacent = vec![Vec::new(); k + 1];
    for i in 1..=k {
        for j in i + 1..=k {
            let occ = Occurrence::new(vec![i, j]).expect("increasing pair");
            if pair_patterns
                .iter()
                .any(|a| mesh_in_mesh_occurrences(p, a).contains(&occ))
            {
                adjacent[i].push(j);
                adjacent[j].push(i);
            }
        }
    }

    // breadth-first from the boundary-anchored points
    let mut next: Vec<Option<usize>> = vec![None; k + 1];
    let mut queue: Vec<usize> = Vec::new();
    for i in 1..=k {
        if boundary[i - 1] {
            next[i] = Some(i);
            queue.push(i);
        }
    }
    let mut at = 0;
    while at < queue.len() {
        let v = queue[at];
        at += 1;
        for &w in &adjacent[v] {
            if next[w].is_none() {
                next[w] = Some(v);
                queue.push(w);
            }
        }
    }
    let verdict = k == 0 || (1..=k).all(|i| next[i].is_some());
    (verdict, next[1..].to_vec())
}

/// One anchored pattern per size: the increasing word with its top row and
/// every interior column shaded, chaining every point to the highest one.
/// All of them are anchored, hence binary, and the construction extends to
/// every size; the stream ends where the shading encoding runs out of mask
/// bits (size 10).
pub fn anchored_chain_patterns() -> impl Iterator<Item = MeshPattern> {
    (1usize..).map_while(|n| {
        let mut squares = Vec::new();
        for col in 0..=n {
            squares.push(sq(col, n));
        }
        for col in 1..n {
            for row in 0..=n {
                squares.push(sq(col, row));
            }
        }
        MeshPattern::new(Permutation::identity(n), squares).ok()
    })
}

/// Greedy force discovery: returns a force making `p` binary (within the
/// class when a basis is given). Prefers a single-entry extension that
/// already suffices, trying points by ordinal and directions in
/// up/down/left/right order; otherwise commits the first unused candidate
/// and repeats. Forcing every point always terminates the loop.
pub fn find_binary_force(p: &MeshPattern, basis: Option<&Basis>) -> Result<Force> {
    let k = p.size();
    let mut force = Force::empty();
    loop {
        let current = Pattern::Forced(ForcedPattern::new(p.clone(), force.clone())?);
        if is_binary(&current, basis).0 {
            return Ok(force);
        }
        let used: Vec<usize> = force.entries().iter().map(|&(pt, _)| pt).collect();
        let mut extended = None;
        for point in 1..=k {
            if used.contains(&point) {
                continue;
            }
            for dir in Direction::ALL {
                let cand = force.push(point, dir, k)?;
                let fp = Pattern::Forced(ForcedPattern::new(p.clone(), cand.clone())?);
                if is_binary(&fp, basis).0 {
                    return Ok(cand);
                }
                if extended.is_none() {
                    extended = Some(cand);
                }
            }
        }
        force = extended.ok_or_else(|| Error::Invalid("no point left to force".into()))?;
    }
}

/// Leading counts of a sequence, indexed from size 0.
pub type SequencePrefix = Vec<u64>;

/// Brute-force counts of the permutations of each size up to `maxn` that
/// avoid every basis pattern.
pub fn count_av(basis: &Basis, maxn: usize) -> SequencePrefix {
    (0..=maxn)
        .map(|n| {
            Permutation::all(n)
                .into_par_iter()
                .filter(|host| basis.admits(host))
                .count() as u64
        })
        .collect()
}

/// Catalan numbers by the standard convolution recurrence.
pub fn catalan_prefix(maxn: usize) -> SequencePrefix {
    let mut c: Vec<u64> = vec![1];
    for n in 0..maxn {
        let next: u64 = (0..=n).map(|i| c[i] * c[n - i]).sum();
        c.push(next);
    }
    c
}

/// Experimental coincidence of two patterns relative to a class: their
/// avoidance sets restricted to the class agree for every size up to
/// `maxn`. Returns the separating permutation otherwise.
pub fn class_coincidence(
    p: &Pattern,
    q: &Pattern,
    basis: &Basis,
    maxn: usize,
) -> (bool, Option<Permutation>) {
    for n in 0..=maxn {
        let witness = Permutation::all(n)
            .into_par_iter()
            .filter(|host| basis.admits(host))
            .find_first(|host| p.occurs_in(host) != q.occurs_in(host));
        if let Some(host) = witness {
            return (false, Some(host));
        }
    }
    (true, None)
}
