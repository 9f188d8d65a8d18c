use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{MeshPattern, Shading};
use crate::perm::Permutation;

/// A strictly increasing tuple of 1-based positions into a host.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occurrence {
    indices: Vec<usize>,
}

impl Occurrence {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) || indices.first() == Some(&0) {
            return Err(Error::BadOccurrence(indices));
        }
        Ok(Occurrence { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Host letters selected by this occurrence.
    pub fn letters(&self, host: &Permutation) -> Vec<u8> {
        self.indices.iter().map(|&i| host.value_at(i)).collect()
    }
}

impl fmt::Display for Occurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for Occurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All occurrences of the classical pattern `patt` in `host`, in
/// lexicographic order of the index tuples. The empty pattern has exactly
/// one (empty) occurrence.
pub fn classical_occurrences(host: &Permutation, patt: &Permutation) -> Vec<Occurrence> {
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(patt.len());
    extend(host, patt.word(), &mut chosen, &mut out);
    out
}

fn extend(host: &Permutation, patt: &[u8], chosen: &mut Vec<usize>, out: &mut Vec<Occurrence>) {
    if chosen.len() == patt.len() {
        out.push(Occurrence {
            indices: chosen.clone(),
        });
        return;
    }
    let t = chosen.len();
    let start = chosen.last().map_or(1, |&i| i + 1);
    // Remaining letters must fit after the candidate position.
    let remaining = patt.len() - t;
    if host.len() + 1 < start + remaining {
        return;
    }
    let last_start = host.len() + 1 - remaining;
    for i in start..=last_start {
        if order_compatible(host, patt, chosen, i, t) {
            chosen.push(i);
            extend(host, patt, chosen, out);
            chosen.pop();
        }
    }
}

/// Whether appending host position `i` keeps the chosen subsequence
/// order-isomorphic to the pattern prefix of length `t + 1`.
fn order_compatible(host: &Permutation, patt: &[u8], chosen: &[usize], i: usize, t: usize) -> bool {
    let v = host.value_at(i);
    for (s, &j) in chosen.iter().enumerate() {
        let w = host.value_at(j);
        if (w < v) != (patt[s] < patt[t]) {
            return false;
        }
    }
    true
}

/// Boundaries of the occurrence grid inside a host of size `n`: column cuts
/// from the indices and row cuts from the sorted values, with 0 and `n + 1`
/// sentinels at both ends.
struct Cuts {
    cols: Vec<usize>,
    rows: Vec<usize>,
}

fn cuts(host: &Permutation, occ: &Occurrence) -> Cuts {
    let n = host.len();
    let mut cols = Vec::with_capacity(occ.len() + 2);
    cols.push(0);
    cols.extend_from_slice(occ.indices());
    cols.push(n + 1);
    let mut vals: Vec<usize> = occ.indices().iter().map(|&i| host.value_at(i) as usize).collect();
    vals.sort_unstable();
    let mut rows = Vec::with_capacity(occ.len() + 2);
    rows.push(0);
    rows.extend_from_slice(&vals);
    rows.push(n + 1);
    Cuts { cols, rows }
}

fn band(cuts: &[usize], x: usize) -> Option<usize> {
    // Which open interval (cuts[a], cuts[a+1]) contains x; None if x is a cut.
    for (a, w) in cuts.windows(2).enumerate() {
        if x > w[0] && x < w[1] {
            return Some(a);
        }
    }
    None
}

/// The host squares inside the region that pattern square `(a, b)` spans
/// under `occ`, in row-major order, together with whether the open region
/// holds a host point.
pub fn region_of_square(
    host: &Permutation,
    occ: &Occurrence,
    a: usize,
    b: usize,
) -> (Vec<crate::mesh::Square>, bool) {
    let c = cuts(host, occ);
    let mut squares = Vec::new();
    for row in c.rows[b]..c.rows[b + 1] {
        for col in c.cols[a]..c.cols[a + 1] {
            squares.push(crate::mesh::sq(col, row));
        }
    }
    let mut has_point = false;
    for i in c.cols[a] + 1..c.cols[a + 1] {
        let v = host.value_at(i) as usize;
        if v > c.rows[b] && v < c.rows[b + 1] {
            has_point = true;
            break;
        }
    }
    (squares, has_point)
}

/// The maximal set of pattern squares whose host regions contain no point,
/// as a shading mask over the `(k+1)^2` grid. A mesh pattern `(tau, R)`
/// occurs at `occ` exactly when `R` is a subset of this mask.
pub fn shading_allowed_mask(host: &Permutation, occ: &Occurrence) -> Result<Shading> {
    let k = occ.len();
    for &i in occ.indices() {
        if i > host.len() {
            return Err(Error::BadOccurrence(occ.indices().to_vec()));
        }
    }
    let c = cuts(host, occ);
    let bits = (k + 1) * (k + 1);
    let mut mask: u128 = if bits == 128 { !0 } else { (1u128 << bits) - 1 };
    for i in 1..=host.len() {
        if occ.indices().contains(&i) {
            continue;
        }
        let v = host.value_at(i) as usize;
        if let (Some(a), Some(b)) = (band(&c.cols, i), band(&c.rows, v)) {
            mask &= !(1u128 << (a * (k + 1) + b));
        }
    }
    Ok(Shading(mask))
}

/// Mesh analogue of [`shading_allowed_mask`]: the maximal `T` such that
/// `occ` is an occurrence of `(tau, T)` in the mesh host. A pattern square
/// enters `T` when its whole host region is shaded and free of host points.
pub fn host_shading_mask(host: &MeshPattern, occ: &Occurrence) -> Result<Shading> {
    let k = occ.len();
    let c = cuts(host.pattern(), occ);
    let mut mask: u128 = 0;
    for a in 0..=k {
        'sq: for b in 0..=k {
            for col in c.cols[a]..c.cols[a + 1] {
                for row in c.rows[b]..c.rows[b + 1] {
                    if !host.is_shaded(crate::mesh::sq(col, row)) {
                        continue 'sq;
                    }
                }
            }
            for i in c.cols[a] + 1..c.cols[a + 1] {
                let v = host.pattern().value_at(i) as usize;
                if v > c.rows[b] && v < c.rows[b + 1] {
                    continue 'sq;
                }
            }
            mask |= 1u128 << (a * (k + 1) + b);
        }
    }
    Ok(Shading(mask))
}

/// All occurrences of the mesh pattern `p` in the permutation `host`.
pub fn mesh_occurrences(host: &Permutation, p: &MeshPattern) -> Vec<Occurrence> {
    classical_occurrences(host, p.pattern())
        .into_iter()
        .filter(|occ| {
            let mask = shading_allowed_mask(host, occ).expect("occurrence is valid");
            p.shading().is_subset_of(mask)
        })
        .collect()
}

/// All occurrences of the mesh pattern `p` inside the mesh pattern `host`:
/// classical occurrences whose shaded regions are fully shaded in the host
/// and contain no host point.
pub fn mesh_in_mesh_occurrences(host: &MeshPattern, p: &MeshPattern) -> Vec<Occurrence> {
    classical_occurrences(host.pattern(), p.pattern())
        .into_iter()
        .filter(|occ| {
            let mask = host_shading_mask(host, occ).expect("occurrence is valid");
            p.shading().is_subset_of(mask)
        })
        .collect()
}

pub fn contains_mesh(host: &Permutation, p: &MeshPattern) -> bool {
    let mut chosen: Vec<usize> = Vec::with_capacity(p.size());
    contains_search(host, p, &mut chosen)
}

/// Backtracking containment test that stops at the first witness.
fn contains_search(host: &Permutation, p: &MeshPattern, chosen: &mut Vec<usize>) -> bool {
    let patt = p.pattern().word();
    if chosen.len() == patt.len() {
        let occ = Occurrence {
            indices: chosen.clone(),
        };
        let mask = shading_allowed_mask(host, &occ).expect("occurrence is valid");
        return p.shading().is_subset_of(mask);
    }
    let t = chosen.len();
    let start = chosen.last().map_or(1, |&i| i + 1);
    let remaining = patt.len() - t;
    if host.len() + 1 < start + remaining {
        return false;
    }
    let last_start = host.len() + 1 - remaining;
    for i in start..=last_start {
        if order_compatible(host, patt, chosen, i, t) {
            chosen.push(i);
            if contains_search(host, p, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Allowed-shading masks for every classical occurrence of `patt` in `host`.
///
/// Containment of any shading over the same word is then a subset test per
/// mask, which is how classification amortizes the grid scan over all
/// `2^((k+1)^2)` shadings.
pub fn occurrence_masks(host: &Permutation, patt: &Permutation) -> Vec<Shading> {
    classical_occurrences(host, patt)
        .iter()
        .map(|occ| shading_allowed_mask(host, occ).expect("occurrence is valid"))
        .collect()
}

/// Per-size bitsets of avoiding permutations over the lexicographic
/// enumeration of each symmetric group.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Fingerprint {
    by_size: Vec<Vec<u64>>,
}

impl Fingerprint {
    pub fn max_size(&self) -> usize {
        self.by_size.len().saturating_sub(1)
    }

    pub fn avoids(&self, n: usize, idx: usize) -> bool {
        self.by_size[n][idx / 64] >> (idx % 64) & 1 == 1
    }

    pub fn count_avoiders(&self, n: usize) -> usize {
        self.by_size[n].iter().map(|w| w.count_ones() as usize).sum()
    }

    /// True when every avoider recorded by `self` is also an avoider of `other`.
    pub fn avoiders_subset_of(&self, other: &Fingerprint) -> bool {
        self.by_size
            .iter()
            .zip(&other.by_size)
            .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x & !y == 0))
    }
}

/// Computes [`Fingerprint`] for `p` over all hosts of size at most `maxn`.
pub fn avoidance_fingerprint(p: &MeshPattern, maxn: usize) -> Fingerprint {
    let by_size = (0..=maxn)
        .map(|n| {
            let perms = Permutation::all(n);
            let mut bits = vec![0u64; perms.len().div_ceil(64)];
            for (idx, host) in perms.iter().enumerate() {
                if !contains_mesh(host, p) {
                    bits[idx / 64] |= 1 << (idx % 64);
                }
            }
            bits
        })
        .collect();
    Fingerprint { by_size }
}

/// Fingerprints for many patterns over one underlying classical pattern,
/// sharing the per-host occurrence masks. Parallel over hosts per size;
/// the output order matches `patterns`.
pub fn fingerprints_shared(
    underlying: &Permutation,
    patterns: &[Shading],
    maxn: usize,
) -> Vec<Fingerprint> {
    let mut by_pattern: Vec<Vec<Vec<u64>>> = vec![Vec::with_capacity(maxn + 1); patterns.len()];
    for n in 0..=maxn {
        let perms = Permutation::all(n);
        let masks: Vec<Vec<Shading>> = perms
            .par_iter()
            .map(|host| occurrence_masks(host, underlying))
            .collect();
        let words = perms.len().div_ceil(64);
        let rows: Vec<Vec<u64>> = patterns
            .par_iter()
            .map(|&r| {
                let mut bits = vec![0u64; words];
                for (idx, host_masks) in masks.iter().enumerate() {
                    if !host_masks.iter().any(|&m| r.is_subset_of(m)) {
                        bits[idx / 64] |= 1 << (idx % 64);
                    }
                }
                bits
            })
            .collect();
        for (fp, row) in by_pattern.iter_mut().zip(rows) {
            fp.push(row);
        }
    }
    by_pattern.into_iter().map(|by_size| Fingerprint { by_size }).collect()
}
