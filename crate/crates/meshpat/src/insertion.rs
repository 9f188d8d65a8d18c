use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mesh::{sq, MeshPattern, Square};
use crate::perm::Permutation;

/// Direction a point is pushed in: each variant pins the inserted point as
/// the highest, lowest, leftmost or rightmost point of its square.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Up,
        Direction::Down,
        Direction::Left,
        Direction::Right,
    ];

    /// The two squares shaded next to a point inserted into `(x, y)`,
    /// in the coordinates of the enlarged grid.
    fn shaded_pair(self, x: usize, y: usize) -> [Square; 2] {
        match self {
            Direction::Up => [sq(x, y + 1), sq(x + 1, y + 1)],
            Direction::Down => [sq(x, y), sq(x + 1, y)],
            Direction::Left => [sq(x, y), sq(x, y + 1)],
            Direction::Right => [sq(x + 1, y), sq(x + 1, y + 1)],
        }
    }

    pub fn letter(self) -> char {
        match self {
            Direction::Up => 'U',
            Direction::Down => 'D',
            Direction::Left => 'L',
            Direction::Right => 'R',
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "U" | "u" => Ok(Direction::Up),
            "D" | "d" => Ok(Direction::Down),
            "L" | "l" => Ok(Direction::Left),
            "R" | "r" => Ok(Direction::Right),
            _ => Err(Error::Parse(format!("bad direction {s:?}"))),
        }
    }
}

/// Inserts a new point into the unshaded square `(x, y)` of `p`.
///
/// The new point lands at position `x + 1` with value `y + 1`; existing
/// shading transports through the column split at `x` and the row split at
/// `y` (a square on a split line maps to both halves). The four quadrant
/// squares around the new point are unshaded.
pub fn insert_point(p: &MeshPattern, square: Square) -> Result<MeshPattern> {
    let k = p.size();
    if square.col > k || square.row > k {
        return Err(Error::SquareOutOfRange(square.col, square.row, k));
    }
    if p.is_shaded(square) {
        return Err(Error::SquareShaded(square));
    }
    let (x, y) = (square.col, square.row);

    let mut word: Vec<u8> = Vec::with_capacity(k + 1);
    for &v in p.pattern().word() {
        word.push(if v as usize > y { v + 1 } else { v });
    }
    word.insert(x, y as u8 + 1);
    let pattern = Permutation::new(word).expect("insertion preserves bijectivity");

    let split = |c: usize, at: usize| -> [Option<usize>; 2] {
        if c < at {
            [Some(c), None]
        } else if c == at {
            [Some(c), Some(c + 1)]
        } else {
            [Some(c + 1), None]
        }
    };

    let mut squares = Vec::new();
    for s in p.squares() {
        for col in split(s.col, x).into_iter().flatten() {
            for row in split(s.row, y).into_iter().flatten() {
                squares.push(sq(col, row));
            }
        }
    }
    MeshPattern::new(pattern, squares)
}

/// [`insert_point`] plus the directional pair of squares that pins the new
/// point against its square boundary.
pub fn insert_directed(p: &MeshPattern, square: Square, dir: Direction) -> Result<MeshPattern> {
    let inserted = insert_point(p, square)?;
    inserted.with_squares(&dir.shaded_pair(square.col, square.row))
}

/// The four directed insertions into one square. Directions whose shadings
/// coincide collapse, so the result has at most four patterns.
pub fn star_set(p: &MeshPattern, square: Square) -> Result<Vec<MeshPattern>> {
    let mut out: Vec<MeshPattern> = Vec::with_capacity(4);
    for dir in Direction::ALL {
        let m = insert_directed(p, square, dir)?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}
