//! Experimental coincidence classification: avoidance fingerprints partition
//! the shadings over one underlying word, the proving methods add directed
//! implication edges, and a class is resolved once its graph is strongly
//! connected.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{MeshPattern, Shading};
use crate::occurrence::{contains_mesh, occurrence_masks};
use crate::perm::Permutation;
use crate::prover::{
    lemma_tsa1, lemma_tsa2, search_forces, shadeable_units, shading_lemma_anchors,
    simultaneous_shading, Method, SearchBudget, Unit,
};

/// Patterns over one underlying word that no permutation up to the bound
/// tells apart. Members are shading masks in increasing integer order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExperimentalClass {
    pub underlying: Permutation,
    pub members: Vec<Shading>,
}

impl ExperimentalClass {
    pub fn pattern(&self, idx: usize) -> MeshPattern {
        MeshPattern::from_mask(self.underlying.clone(), self.members[idx])
            .expect("member masks are in range")
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Partitions all `2^((k+1)^2)` shadings of `underlying` by their avoidance
/// behaviour over every permutation of size at most `maxn`.
///
/// Uses partition refinement host by host, so memory stays linear in the
/// number of patterns. Classes come out ordered by smallest member mask,
/// members sorted ascending.
pub fn experimental_classify(underlying: &Permutation, maxn: usize) -> Vec<ExperimentalClass> {
    let k = underlying.len();
    let bits = (k + 1) * (k + 1);
    assert!(
        bits <= 25,
        "classification enumerates 2^{bits} shadings; words above size 4 are out of reach"
    );
    let count: usize = 1 << bits;
    let mut group_of: Vec<u32> = vec![0; count];
    let mut num_groups: usize = 1;

    for n in 0..=maxn {
        for host in Permutation::all(n) {
            if num_groups == count {
                break;
            }
            let masks = occurrence_masks(&host, underlying);
            let contained: Vec<bool> = (0..count)
                .into_par_iter()
                .map(|r| {
                    let r = Shading(r as u128);
                    masks.iter().any(|&m| r.is_subset_of(m))
                })
                .collect();
            // Split every group by the containment bit, numbering new
            // groups by first appearance in mask order.
            let mut remap: Vec<u32> = vec![u32::MAX; num_groups * 2];
            let mut next: u32 = 0;
            for r in 0..count {
                let key = group_of[r] as usize * 2 + contained[r] as usize;
                if remap[key] == u32::MAX {
                    remap[key] = next;
                    next += 1;
                }
                group_of[r] = remap[key];
            }
            num_groups = next as usize;
        }
    }

    let mut members: Vec<Vec<Shading>> = vec![Vec::new(); num_groups];
    for (r, &g) in group_of.iter().enumerate() {
        members[g as usize].push(Shading(r as u128));
    }
    // group ids follow first appearance, so classes are already ordered by
    // their smallest member and each member list is ascending
    members
        .into_iter()
        .map(|members| ExperimentalClass {
            underlying: underlying.clone(),
            members,
        })
        .collect()
}

/// First permutation (smallest size, then lexicographic) on which exactly
/// one of the two shadings occurs; `None` when none exists up to `maxn`.
/// The flag tells whether the witness contains the first pattern.
pub fn distinguishing_witness(
    underlying: &Permutation,
    a: Shading,
    b: Shading,
    maxn: usize,
) -> Option<(Permutation, bool)> {
    let pa = MeshPattern::from_mask(underlying.clone(), a).ok()?;
    let pb = MeshPattern::from_mask(underlying.clone(), b).ok()?;
    for n in 0..=maxn {
        for host in Permutation::all(n) {
            let ca = contains_mesh(&host, &pa);
            let cb = contains_mesh(&host, &pb);
            if ca != cb {
                return Some((host, ca));
            }
        }
    }
    None
}

/// Implication graph over the members of one experimental class. An edge
/// `i -> j` records that containment of member `i` implies containment of
/// member `j`.
#[derive(Clone, Debug)]
pub struct CoincidenceGraph {
    pub class: ExperimentalClass,
    pub edges: Vec<(usize, usize, Method)>,
    adjacency: Vec<Vec<usize>>,
}

impl CoincidenceGraph {
    pub fn new(class: ExperimentalClass) -> Self {
        let n = class.len();
        CoincidenceGraph {
            class,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    fn member_index(&self, mask: Shading) -> Option<usize> {
        self.class.members.binary_search(&mask).ok()
    }

    pub fn add_edge(&mut self, from: usize, to: usize, method: Method) {
        if from == to || self.adjacency[from].contains(&to) {
            return;
        }
        self.adjacency[from].push(to);
        self.edges.push((from, to, method));
    }

    /// Adds the implication recorded by a successful proof, resolving the
    /// endpoint masks to member indices. Both patterns must belong to the
    /// class; a proven coincidence outside it would contradict soundness.
    pub fn add_proof(
        &mut self,
        source: Shading,
        target: Shading,
        method: Method,
        both: bool,
    ) -> Result<()> {
        let from = self
            .member_index(source)
            .ok_or_else(|| Error::Invalid(format!("mask {} not in class", source.0)))?;
        let to = self
            .member_index(target)
            .ok_or_else(|| Error::Invalid(format!("proved mask {} outside its class", target.0)))?;
        self.add_edge(from, to, method);
        if both {
            self.add_edge(to, from, method);
        }
        Ok(())
    }

    pub fn reachable(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.adjacency.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                if w == to {
                    return true;
                }
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        false
    }

    /// Strongly connected components (Tarjan, iterative). The class is
    /// resolved when one component covers every member.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.adjacency.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut next_index = 0usize;
        let mut components = Vec::new();

        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            // explicit DFS frames: (vertex, next child position)
            let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
            while let Some(&(v, child)) = frames.last() {
                if child == 0 {
                    index[v] = next_index;
                    low[v] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[v] = true;
                }
                if child < self.adjacency[v].len() {
                    frames.last_mut().expect("frame exists").1 += 1;
                    let w = self.adjacency[v][child];
                    if index[w] == usize::MAX {
                        frames.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    frames.pop();
                    if low[v] == index[v] {
                        let mut component = Vec::new();
                        while let Some(w) = stack.pop() {
                            on_stack[w] = false;
                            component.push(w);
                            if w == v {
                                break;
                            }
                        }
                        component.sort_unstable();
                        components.push(component);
                    }
                    if let Some(&(parent, _)) = frames.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                }
            }
        }
        components
    }

    pub fn is_resolved(&self) -> bool {
        self.class.len() <= 1 || self.strongly_connected_components().len() == 1
    }

    /// The recorded implications with their endpoint patterns materialized.
    pub fn implication_edges(&self) -> Vec<crate::prover::ImplicationEdge> {
        self.edges
            .iter()
            .map(|&(i, j, method)| crate::prover::ImplicationEdge {
                from: self.class.pattern(i),
                to: self.class.pattern(j),
                method,
            })
            .collect()
    }
}

/// Subset implications: a more shaded member implies every member whose
/// shading it contains.
pub fn add_subset_edges(graph: &mut CoincidenceGraph) {
    let members = graph.class.members.clone();
    for (i, &a) in members.iter().enumerate() {
        for (j, &b) in members.iter().enumerate() {
            if i != j && b.is_subset_of(a) {
                graph.add_edge(i, j, Method::Subset);
            }
        }
    }
}

/// One pipeline row: unresolved / resolved class counts after a stage.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StageSummary {
    pub label: String,
    pub unresolved: usize,
    pub resolved: usize,
}

/// Final counts of a classification run. The histogram buckets classes by
/// member count: sizes 1 through 7, then everything of size 8 and up.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassificationReport {
    pub underlying: Permutation,
    pub maxn: usize,
    pub stages: Vec<StageSummary>,
    pub histogram: [usize; 8],
    pub num_classes: usize,
    pub num_patterns: usize,
    pub all_resolved: bool,
}

impl ClassificationReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "stage\tunresolved\tresolved");
        for s in &self.stages {
            let _ = writeln!(out, "{}\t{}\t{}", s.label, s.unresolved, s.resolved);
        }
        out
    }

    pub fn histogram_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "class_size\tcount");
        for (i, c) in self.histogram.iter().enumerate() {
            let label = if i == 7 {
                ">=8".to_string()
            } else {
                (i + 1).to_string()
            };
            let _ = writeln!(out, "{label}\t{c}");
        }
        out
    }
}

/// Full classification state: one graph per experimental class plus the
/// stage-by-stage report.
pub struct Classification {
    pub graphs: Vec<CoincidenceGraph>,
    pub report: ClassificationReport,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PipelineMethod {
    Sl,
    Tsa1,
    Ssl,
    Tsa2,
    Sa,
}

impl PipelineMethod {
    pub const ALL: [PipelineMethod; 5] = [
        PipelineMethod::Sl,
        PipelineMethod::Tsa1,
        PipelineMethod::Ssl,
        PipelineMethod::Tsa2,
        PipelineMethod::Sa,
    ];

    pub fn parse(token: &str) -> Result<Self> {
        match token {
            "sl" => Ok(PipelineMethod::Sl),
            "tsa1" => Ok(PipelineMethod::Tsa1),
            "ssl" => Ok(PipelineMethod::Ssl),
            "tsa2" => Ok(PipelineMethod::Tsa2),
            "sa" => Ok(PipelineMethod::Sa),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

/// Runs the method schedule over every unresolved class: subset edges first,
/// then each requested method, with the shading algorithm once per scheduled
/// depth. Records unresolved/resolved counts after every stage.
pub fn run_pipeline(
    underlying: &Permutation,
    maxn: usize,
    methods: &[PipelineMethod],
    depth_schedule: &[usize],
    max_force_size: usize,
) -> Result<Classification> {
    let classes = experimental_classify(underlying, maxn);
    let num_classes = classes.len();
    let num_patterns: usize = classes.iter().map(|c| c.len()).sum();
    let mut histogram = [0usize; 8];
    for c in &classes {
        histogram[(c.len() - 1).min(7)] += 1;
    }

    let mut graphs: Vec<CoincidenceGraph> =
        classes.into_iter().map(CoincidenceGraph::new).collect();
    let mut stages: Vec<StageSummary> = Vec::new();
    let snapshot = |label: &str, graphs: &[CoincidenceGraph], stages: &mut Vec<StageSummary>| {
        let unresolved = graphs.iter().filter(|g| !g.is_resolved()).count();
        stages.push(StageSummary {
            label: label.to_string(),
            unresolved,
            resolved: graphs.len() - unresolved,
        });
    };

    snapshot("experimental", &graphs, &mut stages);

    for g in graphs.iter_mut() {
        add_subset_edges(g);
    }
    snapshot("subset", &graphs, &mut stages);

    for &method in methods {
        match method {
            PipelineMethod::Sl => {
                run_per_square_stage(&mut graphs, Method::Sl, |p, s| {
                    Ok(!shading_lemma_anchors(p, s).is_empty())
                })?;
                snapshot("sl", &graphs, &mut stages);
            }
            PipelineMethod::Tsa1 => {
                run_per_square_stage(&mut graphs, Method::Tsa1, |p, s| {
                    Ok(lemma_tsa1(p, s)?.is_success())
                })?;
                snapshot("tsa1", &graphs, &mut stages);
            }
            PipelineMethod::Ssl => {
                run_ssl_stage(&mut graphs)?;
                snapshot("ssl", &graphs, &mut stages);
            }
            PipelineMethod::Tsa2 => {
                run_tsa2_stage(&mut graphs)?;
                snapshot("tsa2", &graphs, &mut stages);
            }
            PipelineMethod::Sa => {
                for &depth in depth_schedule {
                    run_sa_stage(
                        &mut graphs,
                        SearchBudget {
                            max_depth: depth,
                            max_force_size,
                        },
                    )?;
                    snapshot(&format!("sa-depth-{depth}"), &graphs, &mut stages);
                }
            }
        }
    }

    let all_resolved = graphs.iter().all(|g| g.is_resolved());
    Ok(Classification {
        graphs,
        report: ClassificationReport {
            underlying: underlying.clone(),
            maxn,
            stages,
            histogram,
            num_classes,
            num_patterns,
            all_resolved,
        },
    })
}

/// Coincidence methods that shade one square at a time: for every member and
/// every unshaded square passing `check`, link the member with the enlarged
/// pattern in both directions.
fn run_per_square_stage(
    graphs: &mut [CoincidenceGraph],
    method: Method,
    check: impl Fn(&MeshPattern, crate::mesh::Square) -> Result<bool> + Sync,
) -> Result<()> {
    let proofs: Vec<Vec<(Shading, Shading)>> = graphs
        .par_iter()
        .map(|g| {
            let mut found = Vec::new();
            if g.is_resolved() {
                return Ok(found);
            }
            for idx in 0..g.class.len() {
                let p = g.class.pattern(idx);
                for s in p.unshaded_squares_row_major() {
                    if check(&p, s)? {
                        found.push((p.shading(), p.with_square(s)?.shading()));
                    }
                }
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;
    for (g, proofs) in graphs.iter_mut().zip(proofs) {
        for (source, target) in proofs {
            g.add_proof(source, target, method, true)?;
        }
    }
    Ok(())
}

/// Enumerates one shadeable unit per point over all point subsets and links
/// every member with each reachable union.
fn run_ssl_stage(graphs: &mut [CoincidenceGraph]) -> Result<()> {
    let proofs: Vec<Vec<(Shading, Shading)>> = graphs
        .par_iter()
        .map(|g| {
            let mut found = Vec::new();
            if g.is_resolved() {
                return Ok(found);
            }
            for idx in 0..g.class.len() {
                let p = g.class.pattern(idx);
                let units: Vec<(usize, Vec<Unit>)> = (1..=p.size())
                    .map(|point| shadeable_units(&p, point).map(|u| (point, u)))
                    .collect::<Result<_>>()?;
                let mut picks: Vec<(usize, Unit)> = Vec::new();
                let mut targets: Vec<Shading> = Vec::new();
                collect_ssl_targets(&p, &units, 0, &mut picks, &mut targets)?;
                targets.sort_unstable();
                targets.dedup();
                for t in targets {
                    if t != p.shading() {
                        found.push((p.shading(), t));
                    }
                }
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;
    for (g, proofs) in graphs.iter_mut().zip(proofs) {
        for (source, target) in proofs {
            g.add_proof(source, target, Method::Ssl, true)?;
        }
    }
    Ok(())
}

fn collect_ssl_targets(
    p: &MeshPattern,
    units: &[(usize, Vec<Unit>)],
    at: usize,
    picks: &mut Vec<(usize, Unit)>,
    targets: &mut Vec<Shading>,
) -> Result<()> {
    if at == units.len() {
        if !picks.is_empty() {
            let res = simultaneous_shading(p, picks)?;
            targets.push(res.target.shading());
        }
        return Ok(());
    }
    collect_ssl_targets(p, units, at + 1, picks, targets)?;
    let (point, ref choices) = units[at];
    for &unit in choices {
        picks.push((point, unit));
        collect_ssl_targets(p, units, at + 1, picks, targets)?;
        picks.pop();
    }
    Ok(())
}

/// Single-square sweep of the forced-sequence lemma over every one-entry
/// force. Larger square sets are covered by the shading-algorithm stage.
fn run_tsa2_stage(graphs: &mut [CoincidenceGraph]) -> Result<()> {
    let proofs: Vec<Vec<(Shading, Shading)>> = graphs
        .par_iter()
        .map(|g| {
            let mut found = Vec::new();
            if g.is_resolved() {
                return Ok(found);
            }
            for idx in 0..g.class.len() {
                let p = g.class.pattern(idx);
                for s in p.unshaded_squares_row_major() {
                    'square: for point in 1..=p.size() {
                        for dir in crate::insertion::Direction::ALL {
                            let force = crate::force::Force::new(vec![(point, dir)], p.size())?;
                            if lemma_tsa2(&p, &force, &[s])?.is_success() {
                                found.push((p.shading(), p.with_square(s)?.shading()));
                                break 'square;
                            }
                        }
                    }
                }
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;
    for (g, proofs) in graphs.iter_mut().zip(proofs) {
        for (source, target) in proofs {
            g.add_proof(source, target, Method::Tsa2, true)?;
        }
    }
    Ok(())
}

/// Force-searched shading algorithm over member pairs of each unresolved
/// class, skipping pairs already connected, until a pass adds no edge.
fn run_sa_stage(graphs: &mut Vec<CoincidenceGraph>, budget: SearchBudget) -> Result<()> {
    let updated: Vec<CoincidenceGraph> = std::mem::take(graphs)
        .into_par_iter()
        .map(|mut g| -> Result<CoincidenceGraph> {
            if g.is_resolved() {
                return Ok(g);
            }
            loop {
                let mut progressed = false;
                for i in 0..g.class.len() {
                    for j in 0..g.class.len() {
                        if i == j || g.reachable(i, j) {
                            continue;
                        }
                        let res =
                            search_forces(&g.class.pattern(i), &g.class.pattern(j), budget)?;
                        if res.is_success() {
                            g.add_edge(i, j, Method::Sa);
                            progressed = true;
                        }
                    }
                }
                if !progressed || g.is_resolved() {
                    return Ok(g);
                }
            }
        })
        .collect::<Result<_>>()?;
    *graphs = updated;
    Ok(())
}

/// Writes one line per class: the member masks, whitespace-separated.
pub fn save_results(path: &Path, classes: &[ExperimentalClass]) -> std::io::Result<()> {
    let mut out = String::new();
    for class in classes {
        let parts: Vec<String> = class.members.iter().map(|m| m.0.to_string()).collect();
        let _ = writeln!(out, "{}", parts.join(" "));
    }
    fs::write(path, out)
}

/// Reads a class file back. Every integer must fit the shading grid of the
/// underlying word.
pub fn load_results(path: &Path, underlying: &Permutation) -> Result<Vec<ExperimentalClass>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let mut classes = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let mut members = Vec::new();
        for tok in line.split_whitespace() {
            let mask: u128 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad shading integer {tok:?}")))?;
            // validates the bit range
            MeshPattern::from_mask(underlying.clone(), Shading(mask))?;
            members.push(Shading(mask));
        }
        classes.push(ExperimentalClass {
            underlying: underlying.clone(),
            members,
        });
    }
    Ok(classes)
}

/// Writes witness lines `mask_a mask_b permutation side` for class
/// representative pairs, where `side` says which pattern the witness
/// contains. All pairs when the class count stays within the limit,
/// otherwise consecutive representatives only.
pub fn write_witnesses(
    path: &Path,
    classes: &[ExperimentalClass],
    maxn: usize,
    all_pairs_limit: usize,
) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "mask_a\tmask_b\twitness\tcontains");
    let underlying = match classes.first() {
        Some(c) => c.underlying.clone(),
        None => return Ok(()),
    };
    let reps: Vec<Shading> = classes.iter().map(|c| c.members[0]).collect();
    let pairs: Vec<(usize, usize)> = if reps.len() <= all_pairs_limit {
        (0..reps.len())
            .flat_map(|i| (i + 1..reps.len()).map(move |j| (i, j)))
            .collect()
    } else {
        (1..reps.len()).map(|j| (j - 1, j)).collect()
    };
    let rows: Vec<String> = pairs
        .par_iter()
        .map(
            |&(i, j)| match distinguishing_witness(&underlying, reps[i], reps[j], maxn) {
                Some((w, first)) => format!(
                    "{}\t{}\t{}\t{}",
                    reps[i].0,
                    reps[j].0,
                    w,
                    if first { "first" } else { "second" }
                ),
                None => format!("{}\t{}\t-\t-", reps[i].0, reps[j].0),
            },
        )
        .collect();
    for row in rows {
        let _ = writeln!(out, "{row}");
    }
    fs::write(path, out).map_err(|e| Error::Parse(format!("cannot write witnesses: {e}")))?;
    Ok(())
}
