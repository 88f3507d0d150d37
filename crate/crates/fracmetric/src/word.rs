//! Words over the cell alphabet, boundary addresses, and ordered boundary
//! pairs.
//!
//! Cell letters and boundary indices are stored 0-based; all text forms are
//! 1-based. A word renders as a digit string when the fractal has at most
//! nine cells and as dot-separated integers otherwise; the empty word is `e`.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AddressParseError {
    #[error("empty address")]
    Empty,
    #[error("invalid word `{0}`")]
    BadWord(String),
    #[error("cell index {found} out of range 1..={max}")]
    CellOutOfRange { found: usize, max: usize },
    #[error("invalid boundary index `{0}`")]
    BadBoundary(String),
    #[error("boundary index {found} out of range 1..={max}")]
    BoundaryOutOfRange { found: usize, max: usize },
    #[error("address must have the form <word>.<j>, got `{0}`")]
    MissingBoundary(String),
}

/// A finite word of cell indices; concatenation is associative and the empty
/// word is the identity.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u16>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<u16>) -> Self {
        Word(letters)
    }

    /// The word `letter^times`.
    pub fn repeated(letter: u16, times: usize) -> Self {
        Word(vec![letter; times])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u16] {
        &self.0
    }

    pub fn child(&self, letter: u16) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Parses the 1-based text form. `e` is the empty word.
    pub fn parse(text: &str, cell_count: usize) -> Result<Word, AddressParseError> {
        let s = text.trim();
        if s.is_empty() {
            return Err(AddressParseError::Empty);
        }
        if s == "e" {
            return Ok(Word::empty());
        }
        let letters = if cell_count <= 9 {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .filter(|&d| d >= 1)
                        .map(|d| d as usize)
                        .ok_or_else(|| AddressParseError::BadWord(s.to_owned()))
                })
                .collect::<Result<Vec<_>, _>>()?
        } else {
            s.split('.')
                .map(|tok| {
                    tok.parse::<usize>()
                        .ok()
                        .filter(|&d| d >= 1)
                        .ok_or_else(|| AddressParseError::BadWord(s.to_owned()))
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        let mut out = Vec::with_capacity(letters.len());
        for d in letters {
            if d > cell_count {
                return Err(AddressParseError::CellOutOfRange {
                    found: d,
                    max: cell_count,
                });
            }
            out.push((d - 1) as u16);
        }
        Ok(Word(out))
    }

    /// Renders the 1-based text form for a fractal with `cell_count` cells.
    pub fn display(&self, cell_count: usize) -> String {
        if self.0.is_empty() {
            return "e".to_owned();
        }
        if cell_count <= 9 {
            self.0.iter().map(|&l| (l + 1).to_string()).collect()
        } else {
            self.0
                .iter()
                .map(|&l| (l + 1).to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "Word(e)")
        } else {
            write!(
                f,
                "Word({})",
                self.0
                    .iter()
                    .map(|l| (l + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(".")
            )
        }
    }
}

/// A point of the level-`word.len()` vertex mesh, written as the image of the
/// boundary point `boundary` under the cell maps named by `word`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Address {
    pub word: Word,
    pub boundary: u16,
}

impl Address {
    pub fn new(word: Word, boundary: u16) -> Self {
        Address { word, boundary }
    }

    pub fn level(&self) -> usize {
        self.word.len()
    }

    /// Rewrites the address at a deeper level by appending copies of its own
    /// boundary letter; the fixed-point rule makes this the same point.
    pub fn lift(&self, level: usize) -> Option<Address> {
        if level < self.level() {
            return None;
        }
        let suffix = Word::repeated(self.boundary, level - self.level());
        Some(Address {
            word: self.word.concat(&suffix),
            boundary: self.boundary,
        })
    }

    /// Parses `<word>.<j>`, e.g. `12.3` or `e.1`.
    pub fn parse(
        text: &str,
        cell_count: usize,
        boundary_count: usize,
    ) -> Result<Address, AddressParseError> {
        let s = text.trim();
        let (word_part, j_part) = s
            .rsplit_once('.')
            .ok_or_else(|| AddressParseError::MissingBoundary(s.to_owned()))?;
        let j: usize = j_part
            .parse()
            .ok()
            .filter(|&j| j >= 1)
            .ok_or_else(|| AddressParseError::BadBoundary(j_part.to_owned()))?;
        if j > boundary_count {
            return Err(AddressParseError::BoundaryOutOfRange {
                found: j,
                max: boundary_count,
            });
        }
        let word = Word::parse(word_part, cell_count)?;
        Ok(Address {
            word,
            boundary: (j - 1) as u16,
        })
    }

    pub fn display(&self, cell_count: usize) -> String {
        format!("{}.{}", self.word.display(cell_count), self.boundary + 1)
    }
}

/// An ordered pair of distinct boundary indices; the coordinate set of the
/// transfer operators and the orientation carried by path steps.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BoundaryPair {
    pub from: u16,
    pub to: u16,
}

impl BoundaryPair {
    pub fn new(from: u16, to: u16) -> Self {
        debug_assert_ne!(from, to);
        BoundaryPair { from, to }
    }

    pub fn swapped(&self) -> Self {
        BoundaryPair {
            from: self.to,
            to: self.from,
        }
    }

    /// Number of ordered pairs over `n` boundary points.
    pub fn count(n: usize) -> usize {
        n * (n - 1)
    }

    /// Dense index in lexicographic `(from, to)` order.
    pub fn index(&self, n: usize) -> usize {
        let f = self.from as usize;
        let t = self.to as usize;
        f * (n - 1) + if t < f { t } else { t - 1 }
    }

    pub fn from_index(n: usize, index: usize) -> Self {
        let f = index / (n - 1);
        let r = index % (n - 1);
        let t = if r < f { r } else { r + 1 };
        BoundaryPair {
            from: f as u16,
            to: t as u16,
        }
    }

    /// All ordered pairs in index order.
    pub fn all(n: usize) -> impl Iterator<Item = BoundaryPair> {
        (0..BoundaryPair::count(n)).map(move |i| BoundaryPair::from_index(n, i))
    }

    /// Parses `j1,j2` or `(j1,j2)`, 1-based.
    pub fn parse(text: &str, boundary_count: usize) -> Result<Self, AddressParseError> {
        let s = text
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .trim();
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| AddressParseError::BadBoundary(text.to_owned()))?;
        let parse_one = |tok: &str| -> Result<u16, AddressParseError> {
            let j: usize = tok
                .trim()
                .parse()
                .ok()
                .filter(|&j| j >= 1)
                .ok_or_else(|| AddressParseError::BadBoundary(tok.to_owned()))?;
            if j > boundary_count {
                return Err(AddressParseError::BoundaryOutOfRange {
                    found: j,
                    max: boundary_count,
                });
            }
            Ok((j - 1) as u16)
        };
        let from = parse_one(a)?;
        let to = parse_one(b)?;
        if from == to {
            return Err(AddressParseError::BadBoundary(text.to_owned()));
        }
        Ok(BoundaryPair { from, to })
    }
}

impl fmt::Display for BoundaryPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.from + 1, self.to + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_roundtrip_small_alphabet() {
        let w = Word::parse("132", 3).unwrap();
        assert_eq!(w.letters(), &[0, 2, 1]);
        assert_eq!(w.display(3), "132");
        assert_eq!(Word::parse("e", 3).unwrap(), Word::empty());
        assert!(Word::parse("4", 3).is_err());
        assert!(Word::parse("0", 3).is_err());
    }

    #[test]
    fn word_roundtrip_large_alphabet() {
        let w = Word::parse("1.12.3", 12).unwrap();
        assert_eq!(w.letters(), &[0, 11, 2]);
        assert_eq!(w.display(12), "1.12.3");
    }

    #[test]
    fn word_concat_identity() {
        let w = Word::parse("12", 3).unwrap();
        assert_eq!(w.concat(&Word::empty()), w);
        assert_eq!(Word::empty().concat(&w), w);
        assert!(Word::parse("1", 3).unwrap().is_prefix_of(&w));
    }

    #[test]
    fn address_parse_and_lift() {
        let a = Address::parse("e.2", 3, 3).unwrap();
        assert_eq!(a.level(), 0);
        let lifted = a.lift(3).unwrap();
        assert_eq!(lifted.display(3), "222.2");
        assert!(Address::parse("12", 3, 3).is_err());
        assert!(Address::parse("12.4", 3, 3).is_err());
    }

    #[test]
    fn boundary_pair_indexing_is_a_bijection() {
        for n in 2..=6 {
            for (i, p) in BoundaryPair::all(n).enumerate() {
                assert_eq!(p.index(n), i);
                assert_eq!(BoundaryPair::from_index(n, i), p);
                assert_eq!(p.swapped().swapped(), p);
            }
        }
    }

    #[test]
    fn boundary_pair_text() {
        let p = BoundaryPair::parse("1,2", 3).unwrap();
        assert_eq!(p.to_string(), "(1,2)");
        assert_eq!(BoundaryPair::parse("(3, 1)", 3).unwrap().to_string(), "(3,1)");
        assert!(BoundaryPair::parse("2,2", 3).is_err());
    }
}
