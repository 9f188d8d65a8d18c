use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A permutation of `{1, ..., n}` written in one-line notation.
///
/// The empty permutation (`n = 0`) is a valid value.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    word: Vec<u8>,
}

impl Permutation {
    /// Builds a permutation from its one-line word, checking that every value
    /// in `1..=n` appears exactly once.
    pub fn new(word: Vec<u8>) -> Result<Self> {
        let n = word.len();
        if n > u8::MAX as usize {
            return Err(Error::NotAPermutation(n));
        }
        let mut seen = vec![false; n];
        for &v in &word {
            let v = v as usize;
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::NotAPermutation(n));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { word })
    }

    pub fn empty() -> Self {
        Permutation { word: Vec::new() }
    }

    /// The increasing permutation `12...n`.
    pub fn identity(n: usize) -> Self {
        Permutation {
            word: (1..=n as u8).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// Value at 1-based position `i`.
    pub fn value_at(&self, i: usize) -> u8 {
        self.word[i - 1]
    }

    /// 1-based position of value `v`.
    pub fn position_of(&self, v: u8) -> usize {
        self.word.iter().position(|&w| w == v).expect("value in range") + 1
    }

    pub fn reverse(&self) -> Self {
        let mut word = self.word.clone();
        word.reverse();
        Permutation { word }
    }

    pub fn complement(&self) -> Self {
        let n = self.word.len() as u8;
        Permutation {
            word: self.word.iter().map(|&v| n + 1 - v).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut word = vec![0u8; self.word.len()];
        for (i, &v) in self.word.iter().enumerate() {
            word[v as usize - 1] = i as u8 + 1;
        }
        Permutation { word }
    }

    /// All permutations of size `n` in lexicographic order of the word.
    ///
    /// This order is the canonical enumeration used by avoidance
    /// fingerprints, so it must stay stable.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut word: Vec<u8> = (1..=n as u8).collect();
        loop {
            out.push(Permutation { word: word.clone() });
            if !next_lex(&mut word) {
                break;
            }
        }
        out
    }

    /// The permutation order-isomorphic to an arbitrary sequence of distinct values.
    pub fn flatten(values: &[u8]) -> Self {
        let mut sorted: Vec<u8> = values.to_vec();
        sorted.sort_unstable();
        let word = values
            .iter()
            .map(|v| sorted.iter().position(|w| w == v).unwrap() as u8 + 1)
            .collect();
        Permutation { word }
    }
}

fn next_lex(word: &mut [u8]) -> bool {
    if word.len() < 2 {
        return false;
    }
    let mut i = word.len() - 1;
    while i > 0 && word[i - 1] >= word[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = word.len() - 1;
    while word[j] <= word[i - 1] {
        j -= 1;
    }
    word.swap(i - 1, j);
    word[i..].reverse();
    true
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.iter().any(|&v| v > 9) {
            let parts: Vec<String> = self.word.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(","))
        } else {
            for v in &self.word {
                write!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Parses either a digit string (`42135`) or a comma-separated list
    /// (`10,2,1,...`), which is required above size 9.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Ok(Permutation::empty());
        }
        let word: Vec<u8> = if s.contains(',') {
            s.split(',')
                .map(|part| {
                    part.trim()
                        .parse::<u8>()
                        .map_err(|_| Error::Parse(format!("bad permutation entry {part:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::Parse(format!("bad permutation digit {c:?}")))
                })
                .collect::<Result<_>>()?
        };
        Permutation::new(word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![2, 3]).is_err());
        assert!(Permutation::new(vec![0]).is_err());
    }

    #[test]
    fn empty_permutation_is_valid() {
        let p = Permutation::new(vec![]).unwrap();
        assert_eq!(p.len(), 0);
        assert_eq!(Permutation::all(0), vec![p]);
    }

    #[test]
    fn lexicographic_enumeration() {
        let s3 = Permutation::all(3);
        let words: Vec<&[u8]> = s3.iter().map(|p| p.word()).collect();
        assert_eq!(
            words,
            vec![
                &[1, 2, 3][..],
                &[1, 3, 2],
                &[2, 1, 3],
                &[2, 3, 1],
                &[3, 1, 2],
                &[3, 2, 1]
            ]
        );
        assert_eq!(Permutation::all(5).len(), 120);
    }

    #[test]
    fn symmetit_basics() {
        let p: Permutation = "42135".parse().unwrap();
        assert_eq!(p.reverse().word(), &[5, 3, 1, 2, 4]);
        assert_eq!(p.complement().word(), &[2, 4, 5, 3, 1]);
        assert_eq!(p.inverse().word(), &[3, 2, 4, 1, 5]);
        assert_eq!(p.inverse().inverse(), p);
    }

    #[test]
    fn parses_both_forms() {
        let p: Permutation = "2,1,3".parse().unwrap();
        assert_eq!(p.word(), &[2, 1, 3]);
        let q: Permutation = "213".parse().unwrap();
        assert_eq!(p, q);
        assert!("21x".parse::<Permutation>().is_err());
    }

    #[test]
    fn flatten_is_order_isomorphic() {
        assert_eq!(Permutation::flatten(&[4, 1, 5]).word(), &[2, 1, 3]);
        assert_eq!(Permutation::flatten(&[]).word(), &[] as &[u8]);
    }
}
