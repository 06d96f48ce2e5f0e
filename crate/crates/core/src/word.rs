//! Words in a finitely generated free group and the group presentations they
//! are read in.
//!
//! A letter is a nonzero signed generator index: `i` is the `i`-th generator
//! (1-based) and `-i` its inverse. Words are always stored freely reduced.
//!
//! The text form uses lowercase letters `a`, `b`, `c`, ... for generators and
//! either a trailing `'` or the uppercase letter for inverses, so `ab'` and
//! `aB` both denote a b⁻¹. The empty word prints as `1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Letter = i32;

/// A freely reduced word of a fixed rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

fn check_letter(l: Letter, rank: usize) -> Result<()> {
    let index = l.unsigned_abs() as usize;
    if l == 0 || index > rank {
        return Err(Error::IndexOutOfRange { index: l as i64, rank });
    }
    Ok(())
}

/// Freely reduces a raw letter sequence with a single stack pass.
pub fn free_reduce(rank: usize, letters: &[Letter]) -> Result<Word> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        check_letter(l, rank)?;
        push_reduced(&mut out, l);
    }
    Ok(Word { rank, letters: out })
}

#[inline]
fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&-l) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl Word {
    pub fn identity(rank: usize) -> Self {
        Word { rank, letters: Vec::new() }
    }

    pub fn new(rank: usize, letters: &[Letter]) -> Result<Self> {
        free_reduce(rank, letters)
    }

    /// The generator `index` (1-based) or its inverse for negative `index`.
    pub fn generator(rank: usize, index: Letter) -> Result<Self> {
        check_letter(index, rank)?;
        Ok(Word { rank, letters: vec![index] })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word { rank: self.rank, letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    pub fn mul(&self, other: &Word) -> Result<Word> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: other.rank });
        }
        let mut out = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut out, l);
        }
        Ok(Word { rank: self.rank, letters: out })
    }

    /// Concatenation for words already known to share a rank.
    pub(crate) fn concat(&self, other: &Word) -> Word {
        debug_assert_eq!(self.rank, other.rank);
        let mut out = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut out, l);
        }
        Word { rank: self.rank, letters: out }
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.rank);
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `u v u⁻¹ v⁻¹`.
    pub fn commutator(u: &Word, v: &Word) -> Result<Word> {
        u.mul(v)?.mul(&u.inverse())?.mul(&v.inverse())
    }

    pub fn conjugate_by(&self, g: &Word) -> Result<Word> {
        g.mul(self)?.mul(&g.inverse())
    }

    /// Total exponent sum (sum of letter signs).
    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|l| l.signum() as i64).sum()
    }

    /// Image in the abelianization `Z^rank`.
    pub fn abelianization(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for &l in &self.letters {
            v[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        v
    }

    /// Strips matching inverse letters from both ends.
    pub fn cyclic_reduce(&self) -> Word {
        let l = &self.letters;
        let (mut i, mut j) = (0usize, l.len());
        while j >= i + 2 && l[i] == -l[j - 1] {
            i += 1;
            j -= 1;
        }
        Word { rank: self.rank, letters: l[i..j].to_vec() }
    }

    /// Exact conjugacy test in the free group: cyclic reductions agree up
    /// to rotation.
    pub fn is_free_conjugate(&self, other: &Word) -> bool {
        if self.rank != other.rank {
            return false;
        }
        let a = self.cyclic_reduce();
        let b = other.cyclic_reduce();
        if a.len() != b.len() {
            return false;
        }
        if a.is_empty() {
            return true;
        }
        let n = a.len();
        (0..n).any(|s| (0..n).all(|k| a.letters[(s + k) % n] == b.letters[k]))
    }

    pub fn parse(s: &str, rank: usize) -> Result<Word> {
        let mut raw = Vec::new();
        let chars: Vec<char> = s.chars().collect();
        let trimmed = s.trim();
        if trimmed == "1" || trimmed == "e" || trimmed.is_empty() {
            return Ok(Word::identity(rank));
        }
        let mut pos = 0;
        while pos < chars.len() {
            let c = chars[pos];
            if c.is_whitespace() || c == '*' || c == '.' {
                pos += 1;
                continue;
            }
            let base = if c.is_ascii_lowercase() {
                (c as u8 - b'a') as i32 + 1
            } else if c.is_ascii_uppercase() {
                -((c as u8 - b'A') as i32 + 1)
            } else {
                return Err(Error::Parse {
                    position: pos,
                    message: format!("unexpected character {c:?}"),
                });
            };
            if base.unsigned_abs() as usize > rank {
                return Err(Error::Parse {
                    position: pos,
                    message: format!("generator {c:?} out of range for rank {rank}"),
                });
            }
            pos += 1;
            let mut letter = base;
            while pos < chars.len() && chars[pos] == '\'' {
                letter = -letter;
                pos += 1;
            }
            raw.push(letter);
        }
        free_reduce(rank, &raw)
    }

    pub fn from_ints(rank: usize, ints: &[i64]) -> Result<Word> {
        let mut raw = Vec::with_capacity(ints.len());
        for &x in ints {
            if x == 0 || x.unsigned_abs() as usize > rank {
                return Err(Error::IndexOutOfRange { index: x, rank });
            }
            raw.push(x as Letter);
        }
        free_reduce(rank, &raw)
    }

    pub fn to_ints(&self) -> Vec<i64> {
        self.letters.iter().map(|&l| l as i64).collect()
    }

    /// All freely reduced words of length at most `max_len`, shortlex order.
    pub fn enumerate(rank: usize, max_len: usize) -> Vec<Word> {
        let alphabet: Vec<Letter> =
            (1..=rank as Letter).flat_map(|i| [i, -i]).collect();
        let mut out = vec![Word::identity(rank)];
        let mut frontier = vec![Word::identity(rank)];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for &l in &alphabet {
                    if w.letters.last() == Some(&-l) {
                        continue;
                    }
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    next.push(Word { rank, letters });
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for &l in &self.letters {
            let c = if l.unsigned_abs() <= 26 {
                (b'a' + (l.unsigned_abs() - 1) as u8) as char
            } else {
                '?'
            };
            if l > 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}'")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_ints().serialize(s)
    }
}

/// Whether the group is free or the fundamental group of a closed surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PresentationKind {
    Free,
    ClosedSurface { genus: usize },
}

/// `Free(d)` with no relator, or the closed surface group of genus `g` on
/// generators `a₁ b₁ … a_g b_g` with relator `[a₁,b₁]···[a_g,b_g]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Presentation {
    kind: PresentationKind,
    rank: usize,
    relator: Word,
}

impl Presentation {
    pub fn free(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidArgument("free rank must be at least 1".into()));
        }
        Ok(Presentation { kind: PresentationKind::Free, rank, relator: Word::identity(rank) })
    }

    pub fn surface(genus: usize) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidArgument("surface genus must be at least 1".into()));
        }
        let rank = 2 * genus;
        let mut letters = Vec::with_capacity(4 * genus);
        for i in 0..genus as Letter {
            let (a, b) = (2 * i + 1, 2 * i + 2);
            letters.extend_from_slice(&[a, b, -a, -b]);
        }
        let relator = free_reduce(rank, &letters)?;
        Ok(Presentation { kind: PresentationKind::ClosedSurface { genus }, rank, relator })
    }

    pub fn kind(&self) -> PresentationKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn genus(&self) -> Option<usize> {
        match self.kind {
            PresentationKind::Free => None,
            PresentationKind::ClosedSurface { genus } => Some(genus),
        }
    }

    pub fn is_surface(&self) -> bool {
        matches!(self.kind, PresentationKind::ClosedSurface { .. })
    }

    /// Empty for free groups.
    pub fn relator(&self) -> &Word {
        &self.relator
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cancels_inverse_pair() {
        assert!(free_reduce(2, &[1, -1]).unwrap().is_empty());
    }

    #[test]
    fn single_cancellation() {
        let w = free_reduce(2, &[1, 2, -2, 1]).unwrap();
        assert_eq!(w.letters(), &[1, 1]);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(free_reduce(2, &[3]), Err(Error::IndexOutOfRange { .. })));
        assert!(free_reduce(2, &[0]).is_err());
    }

    #[test]
    fn parse_and_display() {
        let w = Word::parse("ab'a", 2).unwrap();
        assert_eq!(w.letters(), &[1, -2, 1]);
        assert_eq!(w.to_string(), "ab'a");
        assert_eq!(Word::parse("aB", 2).unwrap(), Word::parse("ab'", 2).unwrap());
        assert_eq!(Word::parse("1", 3).unwrap(), Word::identity(3));
        match Word::parse("ab#", 2) {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Word::parse("abc", 2), Err(Error::Parse { position: 2, .. })));
    }

    #[test]
    fn surface_relator() {
        let p = Presentation::surface(2).unwrap();
        assert_eq!(p.rank(), 4);
        assert_eq!(p.relator().letters(), &[1, 2, -1, -2, 3, 4, -3, -4]);
    }

    #[test]
    fn cyclic_conjugacy() {
        let ab = Word::parse("ab", 2).unwrap();
        let ba = Word::parse("ba", 2).unwrap();
        assert!(ab.is_free_conjugate(&ba));
        let w = Word::parse("b'abb", 2).unwrap();
        assert!(w.is_free_conjugate(&ab));
        assert!(!ab.is_free_conjugate(&Word::parse("ab'", 2).unwrap()));
    }

    #[test]
    fn enumeration_counts() {
        // 1 + 4 + 12 + 36 + 108
        assert_eq!(Word::enumerate(2, 4).len(), 161);
    }

    fn raw_letters(rank: i32) -> impl Strategy<Value = Vec<i32>> {
        prop::collection::vec((1..=rank, any::<bool>()).prop_map(|(i, s)| if s { i } else { -i }), 0..30)
    }

    proptest! {
        #[test]
        fn reduce_idempotent(raw in raw_letters(3)) {
            let w = free_reduce(3, &raw).unwrap();
            prop_assert_eq!(free_reduce(3, w.letters()).unwrap(), w.clone());
            for pair in w.letters().windows(2) {
                prop_assert_ne!(pair[0], -pair[1]);
            }
        }

        #[test]
        fn inverse_cancels(raw in raw_letters(3)) {
            let w = free_reduce(3, &raw).unwrap();
            prop_assert!(w.mul(&w.inverse()).unwrap().is_empty());
        }
    }
}
