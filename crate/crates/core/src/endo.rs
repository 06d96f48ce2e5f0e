//! Endomorphisms of free groups given by generator images.

use std::fmt;

use crate::error::{Error, Result};
use crate::word::{Letter, Word};

/// An endomorphism of `F_rank`, optionally with the images of its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EndoMap {
    rank: usize,
    images: Vec<Word>,
    inverse_images: Option<Vec<Word>>,
}

fn check_images(rank: usize, images: &[Word]) -> Result<()> {
    if images.len() != rank {
        return Err(Error::RankMismatch { expected: rank, found: images.len() });
    }
    for w in images {
        if w.rank() != rank {
            return Err(Error::RankMismatch { expected: rank, found: w.rank() });
        }
    }
    Ok(())
}

impl EndoMap {
    pub fn new(images: Vec<Word>) -> Result<Self> {
        let rank = images.len();
        check_images(rank, &images)?;
        Ok(EndoMap { rank, images, inverse_images: None })
    }

    /// Builds an automorphism, verifying that the two maps are mutually
    /// inverse on every generator.
    pub fn with_inverse(images: Vec<Word>, inverse_images: Vec<Word>) -> Result<Self> {
        let rank = images.len();
        check_images(rank, &images)?;
        check_images(rank, &inverse_images)?;
        let f = EndoMap { rank, images, inverse_images: None };
        let g = EndoMap { rank, images: inverse_images, inverse_images: None };
        if !f.compose(&g)?.is_identity() || !g.compose(&f)?.is_identity() {
            return Err(Error::NotInvertible("supplied inverse images do not invert the map".into()));
        }
        Ok(EndoMap { rank, images: f.images, inverse_images: Some(g.images) })
    }

    pub fn identity(rank: usize) -> Self {
        let images: Vec<Word> =
            (1..=rank as Letter).map(|i| Word::generator(rank, i).unwrap()).collect();
        EndoMap { rank, images: images.clone(), inverse_images: Some(images) }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> Option<&[Word]> {
        self.inverse_images.as_deref()
    }

    pub fn is_automorphism(&self) -> bool {
        self.inverse_images.is_some()
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.letters() == [(i + 1) as Letter])
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: w.rank() });
        }
        Ok(self.apply_unchecked(w))
    }

    pub(crate) fn apply_unchecked(&self, w: &Word) -> Word {
        let mut raw: Vec<Letter> = Vec::new();
        for &l in w.letters() {
            let img = &self.images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                raw.extend_from_slice(img.letters());
            } else {
                raw.extend(img.letters().iter().rev().map(|x| -x));
            }
        }
        crate::word::free_reduce(self.rank, &raw).expect("images have matching rank")
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &EndoMap) -> Result<EndoMap> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: other.rank });
        }
        let images = other.images.iter().map(|w| self.apply_unchecked(w)).collect();
        let inverse_images = match (&self.inverse_images, &other.inverse_images) {
            (Some(fi), Some(gi)) => {
                let finv = EndoMap { rank: self.rank, images: fi.clone(), inverse_images: None };
                let ginv = EndoMap { rank: self.rank, images: gi.clone(), inverse_images: None };
                Some(finv.images.iter().map(|w| ginv.apply_unchecked(w)).collect())
            }
            _ => None,
        };
        Ok(EndoMap { rank: self.rank, images, inverse_images })
    }

    pub fn inverse(&self) -> Option<EndoMap> {
        self.inverse_images.as_ref().map(|inv| EndoMap {
            rank: self.rank,
            images: inv.clone(),
            inverse_images: Some(self.images.clone()),
        })
    }

    pub fn pow(&self, n: u32) -> Result<EndoMap> {
        let mut out = EndoMap::identity(self.rank);
        for _ in 0..n {
            out = out.compose(self)?;
        }
        Ok(out)
    }

    /// Fills in the inverse by Nielsen reduction of the image tuple.
    ///
    /// Elementary moves `yᵢ ← yᵢ y_j^{±1}` and `yᵢ ← y_j^{±1} yᵢ` are applied
    /// while they shorten the tuple; the same moves on a parallel tuple of
    /// preimages record the inverse once the images reach signed generators.
    pub fn invert(mut self) -> Result<EndoMap> {
        if self.inverse_images.is_some() {
            return Ok(self);
        }
        let rank = self.rank;
        let mut ys = self.images.clone();
        let mut us: Vec<Word> =
            (1..=rank as Letter).map(|i| Word::generator(rank, i).unwrap()).collect();
        if ys.iter().any(|y| y.is_empty()) {
            return Err(Error::NotInvertible("a generator maps to the identity".into()));
        }
        loop {
            let mut improved = false;
            'search: for i in 0..rank {
                for j in 0..rank {
                    if i == j {
                        continue;
                    }
                    for sign in [1i64, -1] {
                        let yj = ys[j].pow(sign);
                        let uj = us[j].pow(sign);
                        let right = ys[i].concat(&yj);
                        if right.len() < ys[i].len() {
                            ys[i] = right;
                            us[i] = us[i].concat(&uj);
                            improved = true;
                            break 'search;
                        }
                        let left = yj.concat(&ys[i]);
                        if left.len() < ys[i].len() {
                            ys[i] = left;
                            us[i] = uj.concat(&us[i]);
                            improved = true;
                            break 'search;
                        }
                    }
                }
            }
            if !improved {
                break;
            }
            if ys.iter().any(|y| y.is_empty()) {
                return Err(Error::NotInvertible("images are not a free basis".into()));
            }
        }
        let mut inverse: Vec<Option<Word>> = vec![None; rank];
        for (y, u) in ys.iter().zip(&us) {
            if y.len() != 1 {
                return Err(Error::NotInvertible(
                    "Nielsen reduction did not reach a signed generator basis".into(),
                ));
            }
            let l = y.letters()[0];
            let slot = &mut inverse[l.unsigned_abs() as usize - 1];
            if slot.is_some() {
                return Err(Error::NotInvertible("images are not a free basis".into()));
            }
            *slot = Some(if l > 0 { u.clone() } else { u.inverse() });
        }
        self.inverse_images = Some(inverse.into_iter().map(|w| w.unwrap()).collect());
        Ok(self)
    }

    /// Generators `i` and `j` (1-based) exchanged.
    pub fn swap(rank: usize, i: usize, j: usize) -> Result<EndoMap> {
        check_index(rank, i)?;
        check_index(rank, j)?;
        let mut images: Vec<Word> = EndoMap::identity(rank).images;
        images.swap(i - 1, j - 1);
        Ok(EndoMap { rank, images: images.clone(), inverse_images: Some(images) })
    }

    /// `x_i ↦ x_i⁻¹`.
    pub fn inversion(rank: usize, i: usize) -> Result<EndoMap> {
        check_index(rank, i)?;
        let mut images = EndoMap::identity(rank).images;
        images[i - 1] = images[i - 1].inverse();
        Ok(EndoMap { rank, images: images.clone(), inverse_images: Some(images) })
    }

    /// `x_i ↦ x_i x_j^sign`, others fixed.
    pub fn transvection(rank: usize, i: usize, j: usize, sign: i32) -> Result<EndoMap> {
        check_index(rank, i)?;
        check_index(rank, j)?;
        if i == j || sign.abs() != 1 {
            return Err(Error::InvalidArgument("transvection needs i ≠ j and sign ±1".into()));
        }
        let mut images = EndoMap::identity(rank).images;
        let mut inverse = images.clone();
        let xj = (j as Letter) * sign;
        images[i - 1] = Word::new(rank, &[i as Letter, xj])?;
        inverse[i - 1] = Word::new(rank, &[i as Letter, -xj])?;
        Ok(EndoMap { rank, images, inverse_images: Some(inverse) })
    }

    /// `x ↦ g x g⁻¹`.
    pub fn conjugation(g: &Word) -> EndoMap {
        let rank = g.rank();
        let gi = g.inverse();
        let gen = |i: usize| Word::generator(rank, i as Letter).unwrap();
        let images = (1..=rank).map(|i| g.concat(&gen(i)).concat(&gi)).collect();
        let inverse = (1..=rank).map(|i| gi.concat(&gen(i)).concat(g)).collect();
        EndoMap { rank, images, inverse_images: Some(inverse) }
    }

    /// Cyclic shift `x_1 ↦ x_2 ↦ … ↦ x_d ↦ x_1`.
    pub fn cycle(rank: usize) -> EndoMap {
        let images: Vec<Word> = (0..rank)
            .map(|i| Word::generator(rank, ((i + 1) % rank + 1) as Letter).unwrap())
            .collect();
        let inverse: Vec<Word> = (0..rank)
            .map(|i| Word::generator(rank, ((i + rank - 1) % rank + 1) as Letter).unwrap())
            .collect();
        EndoMap { rank, images, inverse_images: Some(inverse) }
    }

    /// Standard Nielsen generating set of `Aut(F_rank)`: a transposition, the
    /// cyclic shift, one inversion and one transvection `a ↦ ab`.
    pub fn nielsen_generators(rank: usize) -> Vec<EndoMap> {
        let mut gens = Vec::new();
        if rank >= 2 {
            gens.push(EndoMap::swap(rank, 1, 2).unwrap());
            if rank >= 3 {
                gens.push(EndoMap::cycle(rank));
            }
        }
        gens.push(EndoMap::inversion(rank, 1).unwrap());
        if rank >= 2 {
            gens.push(EndoMap::transvection(rank, 1, 2, 1).unwrap());
        }
        gens
    }

    /// Parses `"a->ab, b->b"`. Generators not mentioned are fixed.
    pub fn parse(s: &str, rank: usize) -> Result<EndoMap> {
        let mut images = EndoMap::identity(rank).images;
        let mut seen = vec![false; rank];
        let mut offset = 0usize;
        for part in s.split(',') {
            let part_start = offset;
            offset += part.chars().count() + 1;
            if part.trim().is_empty() {
                continue;
            }
            let Some(arrow) = part.find("->") else {
                return Err(Error::Parse {
                    position: part_start,
                    message: "expected `x->word`".into(),
                });
            };
            let lhs = &part[..arrow];
            let rhs = &part[arrow + 2..];
            let lhs_pos = part_start + lhs.chars().take_while(|c| c.is_whitespace()).count();
            let lhs = lhs.trim();
            let mut chars = lhs.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(Error::Parse {
                    position: lhs_pos,
                    message: format!("expected a single generator letter, found {lhs:?}"),
                });
            };
            if !c.is_ascii_lowercase() || (c as u8 - b'a') as usize >= rank {
                return Err(Error::Parse {
                    position: lhs_pos,
                    message: format!("generator {c:?} out of range for rank {rank}"),
                });
            }
            let index = (c as u8 - b'a') as usize;
            if seen[index] {
                return Err(Error::Parse {
                    position: lhs_pos,
                    message: format!("generator {c:?} assigned twice"),
                });
            }
            seen[index] = true;
            let rhs_pos = part_start + part[..arrow + 2].chars().count();
            images[index] = Word::parse(rhs, rank).map_err(|e| match e {
                Error::Parse { position, message } => {
                    Error::Parse { position: rhs_pos + position, message }
                }
                other => other,
            })?;
        }
        EndoMap::new(images)
    }
}

fn check_index(rank: usize, i: usize) -> Result<()> {
    if i == 0 || i > rank {
        return Err(Error::IndexOutOfRange { index: i as i64, rank });
    }
    Ok(())
}

impl fmt::Display for EndoMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let c = (b'a' + i as u8) as char;
            write!(f, "{c}->{w}")?;
        }
        Ok(())
    }
}
