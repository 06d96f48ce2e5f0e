//! First homology of a finite cover and the integer matrices of lifted
//! automorphisms and deck transformations acting on it.
//!
//! For a free group the kernel is free on its Schreier generators, so `H₁` is
//! `Z^r` with the Schreier generators as basis. For a closed surface group the
//! relations are the rewrites of the relator conjugates `t·R·t⁻¹`, one per
//! transversal word; `H₁` is the cokernel, which is torsion free, and a basis
//! of it comes from the Smith normal form `A = U·S·V`: raw Schreier
//! coordinates `x` project to `(x·V⁻¹)[rank..]`, and basis vector `i` lifts to
//! row `rank + i` of `V`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::endo::EndoMap;
use crate::error::{Error, Result};
use crate::numerics::{smith_normal_form, IntMatrix, Smith};
use crate::quotient::FiniteQuotient;
use crate::schreier::SchreierData;
use crate::word::Word;

#[derive(Clone, Debug)]
struct SurfaceBasis {
    relations: IntMatrix,
    smith: Smith,
    /// `r0 × r` block of `V⁻¹` taking raw coordinates to `H₁` coordinates.
    projection: Vec<Vec<i64>>,
    /// `r × r0`: raw coordinates of each basis vector.
    lifts: Vec<Vec<i64>>,
}

#[derive(Clone, Debug)]
pub struct CoverHomology {
    schreier: SchreierData,
    rank: usize,
    surface: Option<SurfaceBasis>,
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::InvalidArgument(format!("coefficient {x} does not fit in 64 bits")))
}

impl CoverHomology {
    pub fn new(schreier: SchreierData) -> Result<Self> {
        let q = schreier.quotient();
        let r0 = schreier.len();
        if !q.presentation().is_surface() {
            return Ok(CoverHomology { rank: r0, schreier, surface: None });
        }
        let relator = q.presentation().relator();
        let k = q.order();
        let mut rows = Vec::with_capacity(k);
        for t in q.element_words() {
            let w = t.concat(relator).concat(&t.inverse());
            rows.push(schreier.rewrite(&w)?);
        }
        let relations = IntMatrix::from_rows(&rows);
        let smith = smith_normal_form(&relations);
        let factors = smith.invariant_factors();
        let torsion: Vec<String> =
            factors.iter().filter(|d| !d.is_one()).map(|d| d.to_string()).collect();
        if !torsion.is_empty() {
            return Err(Error::Torsion(torsion));
        }
        let rel_rank = factors.len();
        let rank = r0 - rel_rank;
        let mut projection = vec![vec![0i64; rank]; r0];
        for (i, row) in projection.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = to_i64(smith.v_inv.get(i, rel_rank + j))?;
            }
        }
        let mut lifts = vec![vec![0i64; r0]; rank];
        for (i, row) in lifts.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = to_i64(smith.v.get(rel_rank + i, j))?;
            }
        }
        Ok(CoverHomology {
            schreier,
            rank,
            surface: Some(SurfaceBasis { relations, smith, projection, lifts }),
        })
    }

    pub fn from_quotient(q: Arc<FiniteQuotient>) -> Result<Self> {
        CoverHomology::new(SchreierData::new(q))
    }

    pub fn schreier(&self) -> &SchreierData {
        &self.schreier
    }

    pub fn quotient(&self) -> &FiniteQuotient {
        self.schreier.quotient()
    }

    /// Rank of `H₁` of the cover.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Relation matrix and its Smith form, for the surface kind.
    pub fn relations(&self) -> Option<(&IntMatrix, &Smith)> {
        self.surface.as_ref().map(|s| (&s.relations, &s.smith))
    }

    /// Raw Schreier coordinates to `H₁` coordinates.
    pub fn project(&self, raw: &[i64]) -> Vec<i64> {
        match &self.surface {
            None => raw.to_vec(),
            Some(s) => {
                let mut out = vec![0i128; self.rank];
                for (x, row) in raw.iter().zip(&s.projection) {
                    if *x == 0 {
                        continue;
                    }
                    for (o, p) in out.iter_mut().zip(row) {
                        *o += *x as i128 * *p as i128;
                    }
                }
                out.into_iter().map(|x| i64::try_from(x).expect("projection overflow")).collect()
            }
        }
    }

    /// Homology class of a kernel word.
    pub fn class_of(&self, w: &Word) -> Result<Vec<i64>> {
        Ok(self.project(&self.schreier.rewrite(w)?))
    }

    /// Raw coordinates of basis vector `j`.
    fn lift(&self, j: usize) -> Vec<(usize, i64)> {
        match &self.surface {
            None => vec![(j, 1)],
            Some(s) => s.lifts[j].iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect(),
        }
    }

    /// Columns are `map(basis_j)`, with `map` applied to the raw Schreier
    /// generators and extended linearly.
    fn matrix_from(&self, mut image: impl FnMut(usize) -> Result<Vec<i64>>) -> Result<Vec<i64>> {
        let r = self.rank;
        let r0 = self.schreier.len();
        let mut cache: Vec<Option<Vec<i64>>> = vec![None; r0];
        let mut data = vec![0i64; r * r];
        for j in 0..r {
            let mut raw = vec![0i64; r0];
            for (i, c) in self.lift(j) {
                if cache[i].is_none() {
                    cache[i] = Some(image(i)?);
                }
                for (a, b) in raw.iter_mut().zip(cache[i].as_ref().unwrap()) {
                    *a += c * b;
                }
            }
            for (i, x) in self.project(&raw).into_iter().enumerate() {
                data[i * r + j] = x;
            }
        }
        Ok(data)
    }

    /// Checks that `f` maps the kernel into itself and, for surfaces, that
    /// the relator conjugates stay null-homologous.
    pub fn check_preserved(&self, f: &EndoMap) -> Result<()> {
        let q = self.quotient();
        if let Some((generator, end_point, _)) = q.kernel_violation(f)? {
            return Err(Error::KernelNotPreserved { generator, end_point });
        }
        if self.surface.is_some() {
            let relator = q.presentation().relator();
            for (u, t) in q.element_words().iter().enumerate() {
                let w = f.apply(&t.concat(relator).concat(&t.inverse()))?;
                if self.class_of(&w)?.iter().any(|&x| x != 0) {
                    return Err(Error::RelatorNotPreserved { transversal: u });
                }
            }
        }
        Ok(())
    }

    /// Matrix of the lift of a kernel-preserving endomorphism.
    pub fn induced_automorphism(&self, f: &EndoMap) -> Result<InducedMatrix> {
        self.check_preserved(f)?;
        let words = self.schreier.generator_words();
        let data = self.matrix_from(|i| self.schreier.rewrite(&f.apply(&words[i])?))?;
        Ok(InducedMatrix { dim: self.rank, data, label: MatrixLabel::Automorphism(f.to_string()) })
    }

    /// Matrix of the deck transformation `γ`, i.e. conjugation `s ↦ g·s·g⁻¹`
    /// by any lift `g`. Rewriting `g·s·g⁻¹` from `0` equals rewriting `s`
    /// from the point `γ`, so no lift is needed.
    pub fn induced_deck(&self, gamma: usize) -> InducedMatrix {
        let words = self.schreier.generator_words();
        let data = self
            .matrix_from(|i| self.schreier.rewrite_from(gamma, &words[i]))
            .expect("Schreier generators are kernel words");
        InducedMatrix { dim: self.rank, data, label: MatrixLabel::Deck(gamma) }
    }

    /// Conjugation by an explicit word, computed by rewriting `g·s·g⁻¹`.
    pub fn induced_conjugation(&self, g: &Word) -> Result<InducedMatrix> {
        let words = self.schreier.generator_words();
        let gi = g.inverse();
        let data = self.matrix_from(|i| self.schreier.rewrite(&g.mul(&words[i])?.mul(&gi)?))?;
        Ok(InducedMatrix { dim: self.rank, data, label: MatrixLabel::Automorphism(format!("conj({g})")) })
    }

    /// Trace of the deck matrix of `γ`, reading only diagonal coordinates.
    pub fn deck_trace(&self, gamma: usize) -> i64 {
        let words = self.schreier.generator_words();
        match &self.surface {
            None => (0..self.rank)
                .map(|j| self.schreier.rewrite_coordinate(gamma, &words[j], j))
                .sum(),
            Some(_) => self.induced_deck(gamma).trace(),
        }
    }

    /// Column `j` of the deck matrix of `γ`.
    pub fn deck_column(&self, gamma: usize, j: usize) -> Vec<i64> {
        let words = self.schreier.generator_words();
        let mut raw = vec![0i64; self.schreier.len()];
        for (i, c) in self.lift(j) {
            let end = self.schreier.rewrite_path(gamma, words[i].letters().iter().copied(), c, &mut raw);
            debug_assert_eq!(end, gamma);
        }
        self.project(&raw)
    }

    /// Column `j` of `Σ_γ D_γ`, accumulated in raw coordinates.
    pub fn deck_sum_column(&self, j: usize) -> Vec<i64> {
        let words = self.schreier.generator_words();
        let mut raw = vec![0i64; self.schreier.len()];
        for (i, c) in self.lift(j) {
            for gamma in 0..self.quotient().order() {
                self.schreier.rewrite_path(gamma, words[i].letters().iter().copied(), c, &mut raw);
            }
        }
        self.project(&raw)
    }

    /// Column `j` of the matrix of `f` (kernel preservation is not checked).
    pub fn automorphism_column(&self, f: &EndoMap, j: usize) -> Result<Vec<i64>> {
        let words = self.schreier.generator_words();
        let mut raw = vec![0i64; self.schreier.len()];
        for (i, c) in self.lift(j) {
            let w = f.apply(&words[i])?;
            let end = self.schreier.rewrite_path(0, w.letters().iter().copied(), c, &mut raw);
            if end != 0 {
                return Err(Error::KernelNotPreserved { generator: i, end_point: end });
            }
        }
        Ok(self.project(&raw))
    }
}

/// What an [`InducedMatrix`] represents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixLabel {
    Automorphism(String),
    Deck(usize),
    Product,
}

/// Dense square integer matrix acting on column vectors of `H₁`. Equality
/// ignores the label.
#[derive(Clone)]
pub struct InducedMatrix {
    dim: usize,
    data: Vec<i64>,
    label: MatrixLabel,
}

impl PartialEq for InducedMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.data == other.data
    }
}

impl Eq for InducedMatrix {}

impl InducedMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0i64; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1;
        }
        InducedMatrix { dim, data, label: MatrixLabel::Product }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let dim = rows.len();
        let data: Vec<i64> = rows.iter().flat_map(|r| {
            assert_eq!(r.len(), dim, "matrix must be square");
            r.iter().copied()
        }).collect();
        InducedMatrix { dim, data, label: MatrixLabel::Product }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &MatrixLabel {
        &self.label
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.dim.max(1)).take(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.get(i, j) == i64::from(i == j)))
    }

    pub fn trace(&self) -> i64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn mul(&self, other: &InducedMatrix) -> InducedMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = vec![0i128; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    acc[i * n + j] += a as i128 * other.data[k * n + j] as i128;
                }
            }
        }
        let data = acc.into_iter().map(|x| i64::try_from(x).expect("matrix entry overflow")).collect();
        InducedMatrix { dim: n, data, label: MatrixLabel::Product }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let s: i128 = (0..self.dim).map(|j| self.get(i, j) as i128 * v[j] as i128).sum();
                i64::try_from(s).expect("matrix entry overflow")
            })
            .collect()
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::from_fn(self.dim, self.dim, |i, j| BigInt::from(self.get(i, j)))
    }

    pub fn determinant(&self) -> BigInt {
        if self.dim == 0 {
            return BigInt::one();
        }
        self.to_int_matrix().determinant()
    }

    /// First `(row, column)` where two matrices differ.
    pub fn first_difference(&self, other: &InducedMatrix) -> Option<(usize, usize)> {
        assert_eq!(self.dim, other.dim);
        (0..self.dim)
            .flat_map(|j| (0..self.dim).map(move |i| (i, j)))
            .find(|&(i, j)| self.get(i, j) != other.get(i, j))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl Serialize for InducedMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl fmt::Debug for InducedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "InducedMatrix {:?} {}x{} [", self.label, self.dim, self.dim)?;
        for r in self.rows() {
            writeln!(f, "  {r:?}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use crate::perm::Perm;
    use crate::quotient::{build_heisenberg, build_mod_m_abelian, build_surface_z2, DEFAULT_MAX_ORDER};
    use crate::word::Presentation;
    use proptest::prelude::*;

    fn cover(q: FiniteQuotient) -> CoverHomology {
        CoverHomology::from_quotient(Arc::new(q)).unwrap()
    }

    fn z2sq() -> CoverHomology {
        cover(build_mod_m_abelian(2, 2, DEFAULT_MAX_ORDER).unwrap())
    }

    #[test]
    fn ranks() {
        let trivial = FiniteQuotient::from_images(
            "1",
            Presentation::free(2).unwrap(),
            vec![Perm::identity(1), Perm::identity(1)],
            DEFAULT_MAX_ORDER,
        )
        .unwrap();
        assert_eq!(cover(trivial).rank(), 2);
        assert_eq!(z2sq().rank(), 5);
        let s = cover(build_surface_z2(2).unwrap());
        assert_eq!(s.rank(), 6);
        let s3 = cover(build_surface_z2(3).unwrap());
        assert_eq!(s3.rank(), 2 + 2 * 2 * 2);
    }

    #[test]
    fn identity_and_swap() {
        let c = z2sq();
        assert!(c.induced_automorphism(&EndoMap::identity(2)).unwrap().is_identity());
        let m = c.induced_automorphism(&EndoMap::swap(2, 1, 2).unwrap()).unwrap();
        assert!(!m.is_identity());
        assert_eq!(m.dim(), 5);
        assert_eq!(m.determinant().abs(), BigInt::one());
    }

    #[test]
    fn inner_matches_deck() {
        let c = z2sq();
        let a = Word::parse("a", 2).unwrap();
        let m = c.induced_automorphism(&EndoMap::conjugation(&a)).unwrap();
        let gamma = c.quotient().element_of(&a).unwrap();
        assert_eq!(m.rows(), c.induced_deck(gamma).rows());
    }

    #[test]
    fn deck_traces_on_z2_squared() {
        let c = z2sq();
        assert!(c.induced_deck(0).is_identity());
        for g in 1..4 {
            assert_eq!(c.induced_deck(g).trace(), 1);
            assert_eq!(c.deck_trace(g), 1);
        }
    }

    #[test]
    fn lift_independence() {
        let c = cover(build_heisenberg(2, 3, DEFAULT_MAX_ORDER).unwrap());
        let q = c.quotient();
        let kernel_word = &c.schreier().generator_words()[3];
        for g in 0..q.order() {
            let t = q.element_word(g);
            let other = t.mul(kernel_word).unwrap();
            let d = c.induced_deck(g);
            assert_eq!(c.induced_conjugation(t).unwrap().rows(), d.rows());
            assert_eq!(c.induced_conjugation(&other).unwrap().rows(), d.rows());
        }
    }

    fn check_deck_homomorphism(c: &CoverHomology) {
        let q = c.quotient();
        let decks: Vec<InducedMatrix> = (0..q.order()).map(|g| c.induced_deck(g)).collect();
        for g in 0..q.order() {
            assert_eq!(decks[g].trace(), c.deck_trace(g));
            if g != 0 {
                assert!(!decks[g].is_identity(), "deck action not faithful at {g}");
            }
            for h in 0..q.order() {
                assert_eq!(decks[g].mul(&decks[h]).rows(), decks[q.mul(g, h)].rows());
            }
        }
    }

    #[test]
    fn deck_is_a_faithful_homomorphism() {
        check_deck_homomorphism(&z2sq());
        check_deck_homomorphism(&cover(build_heisenberg(2, 2, DEFAULT_MAX_ORDER).unwrap()));
        check_deck_homomorphism(&cover(build_mod_m_abelian(3, 2, DEFAULT_MAX_ORDER).unwrap()));
        check_deck_homomorphism(&cover(build_surface_z2(2).unwrap()));
    }

    #[test]
    fn surface_deck_traces() {
        let c = cover(build_surface_z2(2).unwrap());
        assert_eq!(c.induced_deck(1).trace(), 2);
        let (rel, smith) = c.relations().unwrap();
        assert_eq!(rel.rows(), 2);
        assert_eq!(smith.rank(), 1);
        // relator conjugates are null-homologous
        let r = c.quotient().presentation().relator().clone();
        assert!(c.class_of(&r).unwrap().iter().all(|&x| x == 0));
    }

    #[test]
    fn kernel_not_preserved() {
        let q = FiniteQuotient::from_images(
            "a-only",
            Presentation::free(2).unwrap(),
            vec![Perm::from_images(vec![1, 0]).unwrap(), Perm::identity(2)],
            DEFAULT_MAX_ORDER,
        )
        .unwrap();
        let c = cover(q);
        let r = c.induced_automorphism(&EndoMap::swap(2, 1, 2).unwrap());
        assert!(matches!(r, Err(Error::KernelNotPreserved { .. })));
    }

    fn aut_strategy() -> impl Strategy<Value = EndoMap> {
        prop::collection::vec(0..3usize, 0..5).prop_map(|idx| {
            let gens = EndoMap::nielsen_generators(2);
            idx.iter().fold(EndoMap::identity(2), |acc, &i| acc.compose(&gens[i]).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn automorphism_homomorphism_and_equivariance(f in aut_strategy(), g in aut_strategy()) {
            let c = cover(build_mod_m_abelian(2, 3, DEFAULT_MAX_ORDER).unwrap());
            let mf = c.induced_automorphism(&f).unwrap();
            let mg = c.induced_automorphism(&g).unwrap();
            let mfg = c.induced_automorphism(&f.compose(&g).unwrap()).unwrap();
            prop_assert_eq!(mfg.rows(), mf.mul(&mg).rows());
            let q = c.quotient();
            let alpha = q.induced_map(&f).unwrap().unwrap();
            for gamma in 0..q.order() {
                let lhs = mf.mul(&c.induced_deck(gamma));
                let rhs = c.induced_deck(alpha[gamma]).mul(&mf);
                prop_assert_eq!(lhs.rows(), rhs.rows());
            }
        }
    }
}
