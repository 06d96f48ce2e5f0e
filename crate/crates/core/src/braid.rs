//! Braid words and the Artin action on the free group.
//!
//! Convention: `σ_i` sends `x_i ↦ x_i x_{i+1} x_i⁻¹`, `x_{i+1} ↦ x_i` and fixes
//! the remaining generators. A braid word `σ_{i₁} ⋯ σ_{i_k}` maps to the
//! composite `σ_{i₁} ∘ ⋯ ∘ σ_{i_k}`, so matrix representations built from
//! Jacobians multiply in word order.

use std::fmt;

use crate::endo::EndoMap;
use crate::error::{Error, Result};
use crate::word::{Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self> {
        if strands < 2 {
            return Err(Error::InvalidBraid("need at least 2 strands".into()));
        }
        for &l in &letters {
            if l == 0 || l.unsigned_abs() as usize >= strands {
                return Err(Error::InvalidBraid(format!(
                    "generator {l} out of range for {strands} strands"
                )));
            }
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn identity(strands: usize) -> Result<Self> {
        BraidWord::new(strands, Vec::new())
    }

    /// Whitespace separated signed generator indices, e.g. `"1 2 -3"`. The
    /// strand count defaults to one more than the largest index used.
    pub fn parse(s: &str, strands: Option<usize>) -> Result<Self> {
        let mut letters = Vec::new();
        let mut pos = 0usize;
        for tok in s.split(|c: char| c.is_whitespace() || c == ',') {
            if !tok.is_empty() {
                let l: i32 = tok.parse().map_err(|_| Error::Parse {
                    position: pos,
                    message: format!("expected a signed integer, found {tok:?}"),
                })?;
                letters.push(l);
            }
            pos += tok.chars().count() + 1;
        }
        let n = strands.unwrap_or_else(|| {
            letters.iter().map(|l| l.unsigned_abs() as usize + 1).max().unwrap_or(2)
        });
        BraidWord::new(n, letters)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn concat(&self, other: &BraidWord) -> Result<BraidWord> {
        if self.strands != other.strands {
            return Err(Error::RankMismatch { expected: self.strands, found: other.strands });
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord { strands: self.strands, letters })
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", s.join(" "))
    }
}

/// The automorphism of `F_n` for a single Artin generator `σ_i^{sign}`.
pub fn artin_generator(strands: usize, letter: i32) -> Result<EndoMap> {
    if letter == 0 || letter.unsigned_abs() as usize >= strands {
        return Err(Error::InvalidBraid(format!("generator {letter} out of range")));
    }
    let n = strands;
    let i = letter.unsigned_abs() as Letter;
    let j = i + 1;
    let mut forward: Vec<Word> = EndoMap::identity(n).images().to_vec();
    let mut backward = forward.clone();
    forward[i as usize - 1] = Word::new(n, &[i, j, -i])?;
    forward[j as usize - 1] = Word::new(n, &[i])?;
    backward[i as usize - 1] = Word::new(n, &[j])?;
    backward[j as usize - 1] = Word::new(n, &[-j, i, j])?;
    let (images, inverse) = if letter > 0 { (forward, backward) } else { (backward, forward) };
    EndoMap::with_inverse(images, inverse)
}

pub fn braid_to_endo(beta: &BraidWord) -> EndoMap {
    beta.letters.iter().fold(EndoMap::identity(beta.strands), |acc, &l| {
        acc.compose(&artin_generator(beta.strands, l).expect("validated braid"))
            .expect("same rank")
    })
}
