//! Schreier generators of the kernel of a finite quotient and abelianised
//! Reidemeister–Schreier rewriting.
//!
//! The spanning tree is the BFS tree of the quotient (generators in index
//! order, positive letter before its inverse). Every positive edge
//! `u --x--> u·x` outside the tree gives the free generator
//! `s = t_u · x · t_{u·x}⁻¹` of the kernel, enumerated in `(u, x)` order.

use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::quotient::FiniteQuotient;
use crate::word::{Letter, Word};

const TREE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct SchreierData {
    quotient: Arc<FiniteQuotient>,
    gens: Vec<(usize, Letter)>,
    words: Vec<Word>,
    /// Schreier generator index of edge `(u, x)` at `u·d + x − 1`, or `TREE`.
    edge: Vec<u32>,
}

impl SchreierData {
    pub fn new(quotient: Arc<FiniteQuotient>) -> Self {
        let k = quotient.order();
        let d = quotient.rank();
        let mut gens = Vec::with_capacity(1 + k * d.saturating_sub(1));
        let mut words = Vec::new();
        let mut edge = vec![TREE; k * d];
        for u in 0..k {
            for x in 1..=d as Letter {
                if quotient.is_tree_edge(u, x) {
                    continue;
                }
                let v = quotient.act(u, x);
                edge[u * d + x as usize - 1] = gens.len() as u32;
                gens.push((u, x));
                words.push(
                    quotient
                        .element_word(u)
                        .concat(&Word::generator(d, x).unwrap())
                        .concat(&quotient.element_word(v).inverse()),
                );
            }
        }
        SchreierData { quotient, gens, words, edge }
    }

    pub fn quotient(&self) -> &FiniteQuotient {
        &self.quotient
    }

    pub fn quotient_arc(&self) -> &Arc<FiniteQuotient> {
        &self.quotient
    }

    pub fn transversal(&self) -> &[Word] {
        self.quotient.element_words()
    }

    /// Number of Schreier generators, i.e. the rank of the kernel.
    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// `(point, generator)` pairs of the Schreier generators.
    pub fn generators(&self) -> &[(usize, Letter)] {
        &self.gens
    }

    pub fn generator_words(&self) -> &[Word] {
        &self.words
    }

    #[inline]
    fn edge_index(&self, u: usize, x: Letter) -> Option<usize> {
        let e = self.edge[u * self.quotient.rank() + x as usize - 1];
        (e != TREE).then_some(e as usize)
    }

    /// Adds `sign` times the rewrite of the path that reads `letters` from
    /// point `start` into `acc`, returning the end point.
    pub fn rewrite_path(
        &self,
        start: usize,
        letters: impl IntoIterator<Item = Letter>,
        sign: i64,
        acc: &mut [i64],
    ) -> usize {
        let q = &*self.quotient;
        let mut p = start;
        for l in letters {
            if l > 0 {
                if let Some(i) = self.edge_index(p, l) {
                    acc[i] += sign;
                }
                p = q.act(p, l);
            } else {
                let prev = q.act(p, l);
                if let Some(i) = self.edge_index(prev, -l) {
                    acc[i] -= sign;
                }
                p = prev;
            }
        }
        p
    }

    /// Exponent vector of a kernel word over the Schreier generators.
    pub fn rewrite(&self, w: &Word) -> Result<Vec<i64>> {
        self.rewrite_from(0, w)
    }

    /// Rewrite of the loop `w` read from point `start`. For a kernel word this
    /// is the rewrite of `g·w·g⁻¹` for any `g` mapping to `start`.
    pub fn rewrite_from(&self, start: usize, w: &Word) -> Result<Vec<i64>> {
        if w.rank() != self.quotient.rank() {
            return Err(Error::RankMismatch { expected: self.quotient.rank(), found: w.rank() });
        }
        let mut v = vec![0i64; self.len()];
        let end = self.rewrite_path(start, w.letters().iter().copied(), 1, &mut v);
        if end != start {
            return Err(Error::NotInKernel { end_point: end });
        }
        Ok(v)
    }

    /// Coordinate `j` of [`SchreierData::rewrite_from`] without allocating.
    pub fn rewrite_coordinate(&self, start: usize, w: &Word, j: usize) -> i64 {
        let q = &*self.quotient;
        let mut p = start;
        let mut c = 0i64;
        for &l in w.letters() {
            if l > 0 {
                if self.edge_index(p, l) == Some(j) {
                    c += 1;
                }
                p = q.act(p, l);
            } else {
                let prev = q.act(p, l);
                if self.edge_index(prev, -l) == Some(j) {
                    c -= 1;
                }
                p = prev;
            }
        }
        c
    }

    /// Stable digest of the quotient's generator images, transversal and
    /// Schreier generators.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.quotient.order().to_le_bytes());
        for p in self.quotient.gen_images() {
            for &x in p.images() {
                h.update(x.to_le_bytes());
            }
        }
        for w in self.transversal().iter().chain(&self.words) {
            for &l in w.letters() {
                h.update(l.to_le_bytes());
            }
            h.update([0xff]);
        }
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;
    use crate::quotient::{build_mod_m_abelian, DEFAULT_MAX_ORDER};
    use crate::word::Presentation;
    use proptest::prelude::*;

    fn z2sq() -> SchreierData {
        SchreierData::new(Arc::new(build_mod_m_abelian(2, 2, DEFAULT_MAX_ORDER).unwrap()))
    }

    #[test]
    fn trivial_quotient() {
        let q = FiniteQuotient::from_images(
            "1",
            Presentation::free(2).unwrap(),
            vec![Perm::identity(1), Perm::identity(1)],
            DEFAULT_MAX_ORDER,
        )
        .unwrap();
        let s = SchreierData::new(Arc::new(q));
        assert_eq!(s.generator_words(), &[Word::parse("a", 2).unwrap(), Word::parse("b", 2).unwrap()]);
        assert_eq!(s.transversal(), &[Word::identity(2)]);
    }

    #[test]
    fn nielsen_schreier_counts() {
        assert_eq!(z2sq().len(), 5);
        let swap = Perm::from_images(vec![1, 0]).unwrap();
        let q = FiniteQuotient::from_images(
            "parity",
            Presentation::free(3).unwrap(),
            vec![swap.clone(), swap.clone(), swap],
            DEFAULT_MAX_ORDER,
        )
        .unwrap();
        assert_eq!(SchreierData::new(Arc::new(q)).len(), 5);
    }

    #[test]
    fn generators_lie_in_kernel_and_rewrite_to_units() {
        let s = z2sq();
        assert!(s.transversal()[0].is_empty());
        for (i, w) in s.generator_words().iter().enumerate() {
            assert!(s.quotient().in_kernel(w));
            let v = s.rewrite(w).unwrap();
            let mut e = vec![0; s.len()];
            e[i] = 1;
            assert_eq!(v, e);
        }
    }

    #[test]
    fn a_squared() {
        let s = z2sq();
        let v = s.rewrite(&Word::parse("aa", 2).unwrap()).unwrap();
        let pa = s.quotient().element_of(&Word::parse("a", 2).unwrap()).unwrap();
        let i = s.generators().iter().position(|&g| g == (pa, 1)).unwrap();
        let mut e = vec![0; 5];
        e[i] = 1;
        assert_eq!(v, e);
        assert!(matches!(s.rewrite(&Word::parse("a", 2).unwrap()), Err(Error::NotInKernel { .. })));
    }

    /// Non-abelianised rewriting: the sequence of signed Schreier generators.
    fn rewrite_free(s: &SchreierData, w: &Word) -> Vec<(usize, i64)> {
        let q = s.quotient();
        let mut p = 0;
        let mut out = Vec::new();
        for &l in w.letters() {
            let (u, x, sign) = if l > 0 { (p, l, 1) } else { (q.act(p, l), -l, -1) };
            if let Some(i) = s.generators().iter().position(|&g| g == (u, x)) {
                out.push((i, sign));
            }
            p = q.act(p, l);
        }
        out
    }

    #[test]
    fn commutator_of_squares() {
        let s = z2sq();
        let w = Word::commutator(&Word::parse("aa", 2).unwrap(), &Word::parse("bb", 2).unwrap()).unwrap();
        let mut expected = vec![0i64; s.len()];
        for (i, sign) in rewrite_free(&s, &w) {
            expected[i] += sign;
        }
        assert_eq!(s.rewrite(&w).unwrap(), expected);
        assert_eq!(expected.iter().sum::<i64>(), 0);
    }

    fn word_strategy() -> impl Strategy<Value = Word> {
        prop::collection::vec(prop_oneof![1..=2i32, -2..=-1i32], 0..12)
            .prop_map(|l| Word::new(2, &l).unwrap())
    }

    proptest! {
        #[test]
        fn rewriting_is_additive(u in word_strategy(), v in word_strategy()) {
            let s = z2sq();
            let q = s.quotient();
            // force kernel membership by appending the transversal inverse
            let close = |w: &Word| w.concat(&q.element_word(q.element_of(w).unwrap()).inverse());
            let (a, b) = (close(&u), close(&v));
            let sum: Vec<i64> = s.rewrite(&a).unwrap().iter().zip(s.rewrite(&b).unwrap()).map(|(x, y)| x + y).collect();
            prop_assert_eq!(s.rewrite(&a.concat(&b)).unwrap(), sum);
        }
    }
}
