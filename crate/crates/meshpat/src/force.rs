use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::insertion::Direction;
use crate::mesh::MeshPattern;
use crate::occurrence::{mesh_occurrences, Occurrence};
use crate::perm::Permutation;

/// An ordered list of `(point, direction)` pairs attached to a pattern.
///
/// Points are identified by their ordinal position in the pattern word.
/// Ordinals survive point insertion without renumbering, which keeps the
/// strength bookkeeping trivial while tracking occurrences through inserted
/// points.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Force {
    entries: Vec<(usize, Direction)>,
}

impl Force {
    pub fn new(entries: Vec<(usize, Direction)>, pattern_size: usize) -> Result<Self> {
        for (i, &(point, _)) in entries.iter().enumerate() {
            if point == 0 || point > pattern_size {
                return Err(Error::ForcePointOutOfRange(point, pattern_size));
            }
            if entries[..i].iter().any(|&(p, _)| p == point) {
                return Err(Error::ForceRepeatedPoint(point));
            }
        }
        Ok(Force { entries })
    }

    pub fn empty() -> Self {
        Force::default()
    }

    pub fn entries(&self) -> &[(usize, Direction)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&self, point: usize, dir: Direction, pattern_size: usize) -> Result<Self> {
        let mut entries = self.entries.clone();
        entries.push((point, dir));
        Force::new(entries, pattern_size)
    }
}

impl fmt::Display for Force {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "-");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(p, d)| format!("{p}:{d}"))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Force {
    type Err = Error;

    /// Comma-separated `ordinal:dir` entries, e.g. `2:U,3:D`. A lone `-`
    /// denotes the empty force. Point validity is checked against the
    /// pattern later, so parse accepts any positive ordinal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "-" {
            return Ok(Force::empty());
        }
        let mut entries = Vec::new();
        for part in s.split(',') {
            let (point, dir) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("bad force entry {part:?}")))?;
            let point: usize = point
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad force point {point:?}")))?;
            entries.push((point, dir.trim().parse::<Direction>()?));
        }
        Force::new(entries, usize::MAX)
    }
}

/// Signed index/value components of an occurrence, one per force entry,
/// compared lexicographically.
pub type StrengthVector = Vec<i64>;

/// Strength of the occurrence `occ` in `host` with respect to `force`:
/// component `j` reads the letter at force ordinal `i_j` as `+value` for up,
/// `-value` for down, `-index` for left and `+index` for right.
pub fn strength(host: &Permutation, occ: &Occurrence, force: &Force) -> Result<StrengthVector> {
    let mut out = Vec::with_capacity(force.len());
    for &(point, dir) in force.entries() {
        if point == 0 || point > occ.len() {
            return Err(Error::ForcePointOutOfRange(point, occ.len()));
        }
        let idx = occ.indices()[point - 1];
        let val = host.value_at(idx) as i64;
        out.push(match dir {
            Direction::Up => val,
            Direction::Down => -val,
            Direction::Left => -(idx as i64),
            Direction::Right => idx as i64,
        });
    }
    Ok(out)
}

/// A pattern with a force: its occurrences are the mesh occurrences of
/// maximal strength.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ForcedPattern {
    pub pattern: MeshPattern,
    pub force: Force,
}

impl ForcedPattern {
    pub fn new(pattern: MeshPattern, force: Force) -> Result<Self> {
        // re-validate the force against this pattern's size
        let force = Force::new(force.entries().to_vec(), pattern.size())?;
        Ok(ForcedPattern { pattern, force })
    }
}

/// The mesh occurrences of `fp.pattern` attaining the lexicographic maximum
/// strength; all ties are returned, in index order. Empty exactly when the
/// underlying mesh pattern does not occur.
pub fn strongest_occurrences(host: &Permutation, fp: &ForcedPattern) -> Vec<Occurrence> {
    let occs = mesh_occurrences(host, &fp.pattern);
    let mut best: Option<StrengthVector> = None;
    let mut out: Vec<Occurrence> = Vec::new();
    for occ in occs {
        let s = strength(host, &occ, &fp.force).expect("force checked at construction");
        match &best {
            Some(b) if *b > s => {}
            Some(b) if *b == s => out.push(occ),
            _ => {
                best = Some(s);
                out = vec![occ];
            }
        }
    }
    out
}

/// Spatial relations between two same-length occurrences at one point.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Relation {
    Above,
    Below,
    LeftOf,
    RightOf,
}

/// How `u` sits relative to `v` with respect to the point at `ordinal`:
/// value comparison gives above/below, index comparison gives left/right.
/// Identical coordinates contribute no relation.
pub fn compare_wrt_point(
    host: &Permutation,
    u: &Occurrence,
    v: &Occurrence,
    ordinal: usize,
) -> Result<Vec<Relation>> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch);
    }
    if ordinal == 0 || ordinal > u.len() {
        return Err(Error::ForcePointOutOfRange(ordinal, u.len()));
    }
    let ui = u.indices()[ordinal - 1];
    let vi = v.indices()[ordinal - 1];
    let uv = host.value_at(ui);
    let vv = host.value_at(vi);
    let mut out = Vec::new();
    if uv > vv {
        out.push(Relation::Above);
    }
    if uv < vv {
        out.push(Relation::Below);
    }
    if ui < vi {
        out.push(Relation::LeftOf);
    }
    if ui > vi {
        out.push(Relation::RightOf);
    }
    Ok(out)
}
