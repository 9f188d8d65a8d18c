use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::force::{strength, Force, StrengthVector};
use crate::insertion::{insert_directed, Direction};
use crate::mesh::{MeshPattern, Shading, Square};
use crate::occurrence::{classical_occurrences, host_shading_mask, region_of_square, Occurrence};
use crate::perm::Permutation;

use super::{Method, ProofResult, SaNode, SaNodeKind, SaStep, Trace, Verdict};

/// Budget for [`search_forces`]: recursion depth handed to every attempt
/// and the largest force size enumerated.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SearchBudget {
    pub max_depth: usize,
    pub max_force_size: usize,
}

/// Runs the recursive shading algorithm. Success certifies that containment
/// of `p` implies containment of `q`; failure proves nothing.
///
/// The working pattern plays the role of an occurrence of `p` of maximal
/// strength with respect to `force` inside an arbitrary permutation. At every
/// node the algorithm scans the occurrences of the underlying word: finding
/// the source shading on a strictly stronger occurrence contradicts
/// maximality, finding the target shading settles the claim, and otherwise
/// each square separating the occurrence from the target is certified empty
/// by recursing into all four directed point insertions.
pub fn shading_algorithm(
    p: &MeshPattern,
    q: &MeshPattern,
    force: &Force,
    depth: usize,
) -> Result<ProofResult> {
    if p.pattern() != q.pattern() {
        return Err(Error::UnderlyingMismatch);
    }
    let force = Force::new(force.entries().to_vec(), p.size())?;
    let mut run = SaRun {
        tau: p.pattern().clone(),
        source: p.shading(),
        target: q.shading(),
        force: force.clone(),
        occ_cache: HashMap::new(),
        success_at: HashMap::new(),
        failure_at: HashMap::new(),
    };
    let k = p.size();
    let root_occ = Occurrence::new((1..=k).collect()).expect("identity occurrence");
    match run.sa(p, &root_occ, depth) {
        Some(root) => Ok(ProofResult {
            verdict: Verdict::Success,
            method: Method::Sa,
            source: p.clone(),
            target: q.clone(),
            coincidence: false,
            trace: Some(Trace::Sa { force, depth, root }),
        }),
        None => Ok(ProofResult::failure(Method::Sa, p.clone(), q.clone())),
    }
}

type StateKey = (Vec<u8>, u128, Vec<usize>);

struct SaRun {
    tau: Permutation,
    source: Shading,
    target: Shading,
    force: Force,
    occ_cache: HashMap<Vec<u8>, Arc<Vec<Occurrence>>>,
    /// Least depth at which a state succeeded; deeper budgets reuse the node.
    success_at: HashMap<StateKey, (usize, Arc<SaNode>)>,
    /// Greatest depth at which a state exhausted to failure.
    failure_at: HashMap<StateKey, usize>,
}

impl SaRun {
    fn occurrences(&mut self, host: &Permutation) -> Arc<Vec<Occurrence>> {
        if let Some(found) = self.occ_cache.get(host.word()) {
            return Arc::clone(found);
        }
        let occs = Arc::new(classical_occurrences(host, &self.tau));
        self.occ_cache.insert(host.word().to_vec(), Arc::clone(&occs));
        occs
    }

    fn sa(&mut self, w: &MeshPattern, c: &Occurrence, depth: usize) -> Option<Arc<SaNode>> {
        let key: StateKey = (
            w.pattern().word().to_vec(),
            w.shading().0,
            c.indices().to_vec(),
        );
        if let Some((at, node)) = self.success_at.get(&key) {
            if depth >= *at {
                return Some(Arc::clone(node));
            }
        }
        if let Some(&at) = self.failure_at.get(&key) {
            if depth <= at {
                return None;
            }
        }
        let result = self.sa_uncached(w, c, depth);
        match &result {
            Some(node) => {
                let entry = self
                    .success_at
                    .entry(key)
                    .or_insert((depth, Arc::clone(node)));
                if depth < entry.0 {
                    *entry = (depth, Arc::clone(node));
                }
            }
            None => {
                let entry = self.failure_at.entry(key).or_insert(depth);
                if depth > *entry {
                    *entry = depth;
                }
            }
        }
        result
    }

    fn sa_uncached(&mut self, w: &MeshPattern, c: &Occurrence, depth: usize) -> Option<Arc<SaNode>> {
        let tracked_strength: StrengthVector =
            strength(w.pattern(), c, &self.force).expect("force fits the pattern");
        let occs = self.occurrences(w.pattern());
        'occ: for cand in occs.iter() {
            let t = host_shading_mask(w, cand).expect("valid occurrence");
            if self.source.is_subset_of(t) {
                let cand_strength =
                    strength(w.pattern(), cand, &self.force).expect("force fits the pattern");
                if cand_strength > tracked_strength {
                    return Some(Arc::new(SaNode {
                        occurrence: cand.clone(),
                        kind: SaNodeKind::BaseStronger,
                    }));
                }
            }
            if self.target.is_subset_of(t) {
                return Some(Arc::new(SaNode {
                    occurrence: cand.clone(),
                    kind: SaNodeKind::BaseTarget,
                }));
            }
            if depth == 0 {
                continue;
            }
            let Some(pending) = pending_squares(w, cand, Shading(self.target.0 & !t.0)) else {
                continue 'occ;
            };
            let mut working = w.clone();
            let mut steps: Vec<SaStep> = Vec::with_capacity(pending.len());
            for &square in &pending {
                let mut certified = None;
                for dir in Direction::ALL {
                    let child_w =
                        insert_directed(&working, square, dir).expect("square is unshaded");
                    let child_c = shift_occurrence(c, square.col);
                    if let Some(child) = self.sa(&child_w, &child_c, depth - 1) {
                        certified = Some(SaStep {
                            square,
                            direction: dir,
                            child,
                        });
                        break;
                    }
                }
                match certified {
                    Some(step) => {
                        steps.push(step);
                        working = working.with_square(square).expect("in range");
                    }
                    None => continue 'occ,
                }
            }
            return Some(Arc::new(SaNode {
                occurrence: cand.clone(),
                kind: SaNodeKind::Recurse(steps),
            }));
        }
        None
    }
}

/// The working-pattern squares standing between `occ` and the missing
/// target squares, in row-major order. `None` when some missing region
/// holds a point of the working pattern, which no insertion can repair.
pub(super) fn pending_squares(
    w: &MeshPattern,
    occ: &Occurrence,
    missing: Shading,
) -> Option<Vec<Square>> {
    let k = occ.len();
    let mut out = Vec::new();
    for row in 0..=k {
        for col in 0..=k {
            if !missing.bit(col * (k + 1) + row) {
                continue;
            }
            let (squares, has_point) = region_of_square(w.pattern(), occ, col, row);
            if has_point {
                return None;
            }
            out.extend(squares.into_iter().filter(|&s| !w.is_shaded(s)));
        }
    }
    Some(out)
}

pub(super) fn shift_occurrence(c: &Occurrence, col: usize) -> Occurrence {
    let indices = c
        .indices()
        .iter()
        .map(|&i| if i > col { i + 1 } else { i })
        .collect();
    Occurrence::new(indices).expect("shift preserves monotonicity")
}

/// Tries the shading algorithm under every force of size at most
/// `budget.max_force_size`, in a fixed order: sizes ascending, point tuples
/// lexicographic, directions cycling up/down/left/right. Returns the first
/// success.
pub fn search_forces(
    p: &MeshPattern,
    q: &MeshPattern,
    budget: SearchBudget,
) -> Result<ProofResult> {
    if p.pattern() != q.pattern() {
        return Err(Error::UnderlyingMismatch);
    }
    for force in candidate_forces(p.size(), budget.max_force_size) {
        let res = shading_algorithm(p, q, &force, budget.max_depth)?;
        if res.is_success() {
            return Ok(res);
        }
    }
    Ok(ProofResult::failure(Method::Sa, p.clone(), q.clone()))
}

/// All forces over `k` points with size up to `max_size`: ordered tuples of
/// distinct points crossed with every direction assignment.
pub(crate) fn candidate_forces(k: usize, max_size: usize) -> Vec<Force> {
    let mut out = vec![Force::empty()];
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 1..=max_size.min(k) {
        let mut next: Vec<Vec<usize>> = Vec::new();
        for t in &tuples {
            for point in 1..=k {
                if !t.contains(&point) {
                    let mut longer = t.clone();
                    longer.push(point);
                    next.push(longer);
                }
            }
        }
        for t in &next {
            let mut dirs = vec![0usize; t.len()];
            loop {
                let entries = t
                    .iter()
                    .zip(&dirs)
                    .map(|(&p, &d)| (p, Direction::ALL[d]))
                    .collect();
                out.push(Force::new(entries, k).expect("points distinct and in range"));
                let mut i = t.len();
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    dirs[i] += 1;
                    if dirs[i] < 4 {
                        break;
                    }
                    dirs[i] = 0;
                }
                if dirs.iter().all(|&d| d == 0) {
                    break;
                }
            }
        }
        tuples = next;
    }
    out
}
