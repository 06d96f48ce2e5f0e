//! Finite-type expansions: a word recorded level by level along a tower of
//! nested quotients as its BFS transversal representative `t` together with
//! the homology class of the tail `c = t⁻¹·w` in that level's cover.

use serde::Serialize;

use crate::catalog::QuotientCatalog;
use crate::error::{Error, Result};
use crate::homology::CoverHomology;
use crate::word::Word;

/// Nested quotients `Γ₁ ← Γ₂ ← …`, each kernel containing the next.
#[derive(Clone, Debug)]
pub struct Tower {
    rank: usize,
    levels: Vec<CoverHomology>,
}

impl Tower {
    /// Checks that every Schreier generator of level `i` maps to the identity
    /// in level `i − 1`.
    pub fn new(levels: Vec<CoverHomology>) -> Result<Self> {
        let Some(first) = levels.first() else {
            return Err(Error::InvalidArgument("a tower needs at least one level".into()));
        };
        let rank = first.quotient().rank();
        for (i, l) in levels.iter().enumerate() {
            if l.quotient().rank() != rank {
                return Err(Error::RankMismatch { expected: rank, found: l.quotient().rank() });
            }
            if i > 0 {
                let prev = levels[i - 1].quotient();
                if !l.schreier().generator_words().iter().all(|s| prev.in_kernel(s)) {
                    return Err(Error::NotNested(i));
                }
            }
        }
        Ok(Tower { rank, levels })
    }

    pub fn from_catalog(catalog: &QuotientCatalog, names: &[&str]) -> Result<Self> {
        let mut levels = Vec::with_capacity(names.len());
        for name in names {
            let entry = catalog
                .get(name)
                .ok_or_else(|| Error::InvalidCatalog(format!("no quotient named {name}")))?;
            levels.push(entry.cover()?.clone());
        }
        Tower::new(levels)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[CoverHomology] {
        &self.levels
    }

    pub fn names(&self) -> Vec<String> {
        self.levels.iter().map(|l| l.quotient().name().to_string()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionLevel {
    pub quotient: String,
    pub element: usize,
    pub transversal: Word,
    pub entry: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteTypeExpansion {
    pub word: Word,
    /// Level zero: the class of the word in the abelianisation.
    pub abelianization: Vec<i64>,
    pub levels: Vec<ExpansionLevel>,
}

impl FiniteTypeExpansion {
    /// Whether `t·c` reproduces the word at every level.
    pub fn reassembles(&self) -> bool {
        self.levels.iter().all(|l| {
            let tail = l.transversal.inverse().concat(&self.word);
            l.transversal.concat(&tail) == self.word
        })
    }
}

pub fn finite_type_expansion(w: &Word, tower: &Tower) -> Result<FiniteTypeExpansion> {
    if w.rank() != tower.rank {
        return Err(Error::RankMismatch { expected: tower.rank, found: w.rank() });
    }
    let mut levels = Vec::with_capacity(tower.depth());
    for cover in &tower.levels {
        let q = cover.quotient();
        let element = q.element_of(w)?;
        let t = q.element_word(element).clone();
        let c = t.inverse().concat(w);
        levels.push(ExpansionLevel {
            quotient: q.name().to_string(),
            element,
            entry: cover.class_of(&c)?,
            transversal: t,
        });
    }
    Ok(FiniteTypeExpansion { word: w.clone(), abelianization: w.abelianization(), levels })
}

/// True iff the two expansions differ at some level.
pub fn expansion_separates(w1: &Word, w2: &Word, tower: &Tower) -> Result<bool> {
    let a = finite_type_expansion(w1, tower)?;
    let b = finite_type_expansion(w2, tower)?;
    Ok(a.abelianization != b.abelianization
        || a.levels.iter().zip(&b.levels).any(|(x, y)| x.element != y.element || x.entry != y.entry))
}
