use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// A unit square of the mesh grid, indexed by its lower-left corner.
///
/// For a pattern of size `k` valid squares have `0 <= col, row <= k`, so the
/// grid holds `(k+1)^2` squares.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Square {
    pub col: usize,
    pub row: usize,
}

pub const fn sq(col: usize, row: usize) -> Square {
    Square { col, row }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.col, self.row)
    }
}

impl fmt::Debug for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A set of mesh squares stored as a bitmask.
///
/// Bit `i` corresponds to the square `(i / (k+1), i mod (k+1))`, which is the
/// integer encoding the result files use. The mask alone does not know `k`;
/// it is always interpreted next to the pattern that owns it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Debug)]
pub struct Shading(pub u128);

impl Shading {
    pub const EMPTY: Shading = Shading(0);

    pub fn bit(self, idx: usize) -> bool {
        self.0 >> idx & 1 == 1
    }

    pub fn is_subset_of(self, other: Shading) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Shading) -> Shading {
        Shading(self.0 | other.0)
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

/// A mesh pattern: an underlying classical pattern together with a shading.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeshPattern {
    pattern: Permutation,
    shading: Shading,
}

impl MeshPattern {
    pub fn new(pattern: Permutation, squares: impl IntoIterator<Item = Square>) -> Result<Self> {
        let mut mp = MeshPattern::classical(pattern)?;
        for s in squares {
            let idx = mp.square_index(s)?;
            mp.shading.0 |= 1 << idx;
        }
        Ok(mp)
    }

    /// A classical pattern is a mesh pattern with empty shading.
    pub fn classical(pattern: Permutation) -> Result<Self> {
        let bits = (pattern.len() + 1) * (pattern.len() + 1);
        if bits > 128 {
            return Err(Error::PatternTooLarge(bits));
        }
        Ok(MeshPattern {
            pattern,
            shading: Shading::EMPTY,
        })
    }

    pub fn from_mask(pattern: Permutation, shading: Shading) -> Result<Self> {
        let bits = (pattern.len() + 1) * (pattern.len() + 1);
        if bits > 128 {
            return Err(Error::PatternTooLarge(bits));
        }
        if bits < 128 && shading.0 >> bits != 0 {
            let k = pattern.len();
            let idx = 127 - shading.0.leading_zeros() as usize;
            return Err(Error::SquareOutOfRange(idx / (k + 1), idx % (k + 1), k));
        }
        Ok(MeshPattern { pattern, shading })
    }

    /// Fully shaded pattern over the given word.
    pub fn full(pattern: Permutation) -> Result<Self> {
        let bits = (pattern.len() + 1) * (pattern.len() + 1);
        if bits > 128 {
            return Err(Error::PatternTooLarge(bits));
        }
        let mask = if bits == 128 { !0 } else { (1u128 << bits) - 1 };
        Ok(MeshPattern {
            pattern,
            shading: Shading(mask),
        })
    }

    pub fn size(&self) -> usize {
        self.pattern.len()
    }

    pub fn pattern(&self) -> &Permutation {
        &self.pattern
    }

    pub fn shading(&self) -> Shading {
        self.shading
    }

    fn square_index(&self, s: Square) -> Result<usize> {
        let k = self.size();
        if s.col > k || s.row > k {
            return Err(Error::SquareOutOfRange(s.col, s.row, k));
        }
        Ok(s.col * (k + 1) + s.row)
    }

    pub fn is_shaded(&self, s: Square) -> bool {
        match self.square_index(s) {
            Ok(idx) => self.shading.bit(idx),
            Err(_) => false,
        }
    }

    /// Shaded squares in bit order (column-major: all rows of column 0 first).
    pub fn squares(&self) -> Vec<Square> {
        let k = self.size();
        let mut out = Vec::with_capacity(self.shading.count() as usize);
        for idx in 0..(k + 1) * (k + 1) {
            if self.shading.bit(idx) {
                out.push(sq(idx / (k + 1), idx % (k + 1)));
            }
        }
        out
    }

    /// Unshaded squares in row-major order (row 0 left to right, then row 1, ...).
    pub fn unshaded_squares_row_major(&self) -> Vec<Square> {
        let k = self.size();
        let mut out = Vec::new();
        for row in 0..=k {
            for col in 0..=k {
                let s = sq(col, row);
                if !self.is_shaded(s) {
                    out.push(s);
                }
            }
        }
        out
    }

    pub fn with_square(&self, s: Square) -> Result<Self> {
        let idx = self.square_index(s)?;
        let mut next = self.clone();
        next.shading.0 |= 1 << idx;
        Ok(next)
    }

    pub fn with_squares(&self, squares: &[Square]) -> Result<Self> {
        let mut next = self.clone();
        for &s in squares {
            let idx = next.square_index(s)?;
            next.shading.0 |= 1 << idx;
        }
        Ok(next)
    }

    pub fn with_mask(&self, mask: Shading) -> Self {
        MeshPattern {
            pattern: self.pattern.clone(),
            shading: self.shading.union(mask),
        }
    }

    /// Squares of `self` that are shaded but not shaded in `other`.
    pub fn shading_difference(&self, other: &MeshPattern) -> Shading {
        Shading(self.shading.0 & !other.shading.0)
    }

    pub fn mask_to_squares(&self, mask: Shading) -> Vec<Square> {
        let k = self.size();
        let mut out = Vec::new();
        for row in 0..=k {
            for col in 0..=k {
                if mask.bit(col * (k + 1) + row) {
                    out.push(sq(col, row));
                }
            }
        }
        out
    }

    pub fn square_mask(&self, s: Square) -> Result<Shading> {
        Ok(Shading(1 << self.square_index(s)?))
    }
}

impl fmt::Display for MeshPattern {
    /// `word:mesh-int`, the text form every command-line surface accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.pattern, self.shading.0)
    }
}

impl fmt::Debug for MeshPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for MeshPattern {
    type Err = Error;

    /// Parses `<word>:<mesh-int>`, or a bare `<word>` meaning empty shading.
    fn from_str(s: &str) -> Result<Self> {
        let (word, mask) = match s.split_once(':') {
            Some((w, m)) => {
                let mask: u128 = m
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad mesh integer {m:?}")))?;
                (w, mask)
            }
            None => (s, 0),
        };
        let pattern: Permutation = word.trim().parse()?;
        MeshPattern::from_mask(pattern, Shading(mask))
    }
}

/// The eight symmetries of the square acting on mesh patterns.
///
/// `Reverse` mirrors left-right, `Complement` mirrors top-bottom and
/// `Inverse` transposes along the main diagonal. Containment is preserved
/// when pattern and host are transformed together.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Symmetry {
    Identity,
    Reverse,
    Complement,
    ReverseComplement,
    Inverse,
    InverseReverse,
    InverseComplement,
    InverseReverseComplement,
}

impl Symmetry {
    pub const ALL: [Symmetry; 8] = [
        Symmetry::Identity,
        Symmetry::Reverse,
        Symmetry::Complement,
        Symmetry::ReverseComplement,
        Symmetry::Inverse,
        Symmetry::InverseReverse,
        Symmetry::InverseComplement,
        Symmetry::InverseReverseComplement,
    ];

    /// Basic operations applied left to right.
    fn ops(self) -> &'static [BasicOp] {
        use BasicOp::*;
        match self {
            Symmetry::Identity => &[],
            Symmetry::Reverse => &[Rev],
            Symmetry::Complement => &[Compl],
            Symmetry::ReverseComplement => &[Rev, Compl],
            Symmetry::Inverse => &[Inv],
            Symmetry::InverseReverse => &[Inv, Rev],
            Symmetry::InverseComplement => &[Inv, Compl],
            Symmetry::InverseReverseComplement => &[Inv, Rev, Compl],
        }
    }

    pub fn apply(self, p: &MeshPattern) -> MeshPattern {
        let mut out = p.clone();
        for op in self.ops() {
            out = op.apply(&out);
        }
        out
    }

    pub fn apply_perm(self, p: &Permutation) -> Permutation {
        let mut out = p.clone();
        for op in self.ops() {
            out = match op {
                BasicOp::Rev => out.reverse(),
                BasicOp::Compl => out.complement(),
                BasicOp::Inv => out.inverse(),
            };
        }
        out
    }

    pub fn apply_square(self, s: Square, k: usize) -> Square {
        let mut out = s;
        for op in self.ops() {
            out = op.apply_square(out, k);
        }
        out
    }

    /// The symmetry undoing this one.
    pub fn inverse(self) -> Symmetry {
        // The group is small; find the inverse by checking on a witness.
        let witness = MeshPattern::new(
            Permutation::new(vec![2, 4, 1, 3]).unwrap(),
            [sq(0, 1), sq(2, 3), sq(4, 0)],
        )
        .unwrap();
        for cand in Symmetry::ALL {
            if cand.apply(&self.apply(&witness)) == witness {
                return cand;
            }
        }
        unreachable!("every symmetry has an inverse")
    }
}

#[derive(Clone, Copy)]
enum BasicOp {
    Rev,
    Compl,
    Inv,
}

impl BasicOp {
    fn apply(self, p: &MeshPattern) -> MeshPattern {
        let k = p.size();
        let word = match self {
            BasicOp::Rev => p.pattern().reverse(),
            BasicOp::Compl => p.pattern().complement(),
            BasicOp::Inv => p.pattern().inverse(),
        };
        let squares: Vec<Square> = p.squares().iter().map(|&s| self.apply_square(s, k)).collect();
        MeshPattern::new(word, squares).expect("symmetry keeps squares in range")
    }

    fn apply_square(self, s: Square, k: usize) -> Square {
        match self {
            BasicOp::Rev => sq(k - s.col, s.row),
            BasicOp::Compl => sq(s.col, k - s.row),
            BasicOp::Inv => sq(s.row, s.col),
        }
    }
}
