//! The deck-group representation on `H₁` of a cover: its character, the
//! regular-plus-trivial decomposition, the fixed subspace and the invariant
//! subspaces it gives for lifted automorphisms.

use num_bigint::BigInt;
use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::endo::EndoMap;
use crate::error::Result;
use crate::homology::{CoverHomology, InducedMatrix};
use crate::numerics::{integer_nullspace, saturate_rows, IntMatrix};
use crate::quotient::{conjugacy_classes, ConjugacyClasses};

fn ser_ratio<S: Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Values of a class function, one per conjugacy class.
#[derive(Clone, Debug, Serialize)]
pub struct ClassFunction {
    pub representatives: Vec<usize>,
    pub sizes: Vec<usize>,
    pub values: Vec<i64>,
}

impl ClassFunction {
    pub fn order(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// `(1/|Γ|) Σ_γ χ(γ) ψ(γ)` for integer-valued (hence real) characters.
    pub fn inner(&self, other: &ClassFunction) -> Ratio<i64> {
        let s: i64 = self
            .values
            .iter()
            .zip(&other.values)
            .zip(&self.sizes)
            .map(|((a, b), &n)| a * b * n as i64)
            .sum();
        Ratio::new(s, self.order() as i64)
    }

    pub fn trivial_like(&self) -> ClassFunction {
        ClassFunction { values: vec![1; self.values.len()], ..self.clone() }
    }

    /// The regular character: `|Γ|` at the identity class, zero elsewhere.
    pub fn regular_like(&self) -> ClassFunction {
        let n = self.order() as i64;
        let values = self.representatives.iter().map(|&r| if r == 0 { n } else { 0 }).collect();
        ClassFunction { values, ..self.clone() }
    }
}

/// Character of the deck action on `H₁(cover; Q)`.
pub fn deck_character(c: &CoverHomology) -> ClassFunction {
    deck_character_with(c, &conjugacy_classes(c.quotient()))
}

pub fn deck_character_with(c: &CoverHomology, classes: &ConjugacyClasses) -> ClassFunction {
    let representatives: Vec<usize> = classes.classes.iter().map(|cl| cl.representative).collect();
    let sizes = classes.classes.iter().map(|cl| cl.members.len()).collect();
    let values = representatives.iter().map(|&g| c.deck_trace(g)).collect();
    ClassFunction { representatives, sizes, values }
}

#[derive(Clone, Debug, Serialize)]
pub struct Discrepancy {
    pub representative: usize,
    pub expected: i64,
    pub actual: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChevalleyWeilReport {
    pub holds: bool,
    pub order: usize,
    pub h1_rank: usize,
    /// Copies of the regular representation and of the trivial one.
    pub regular_copies: i64,
    pub trivial_copies: i64,
    pub character: ClassFunction,
    pub discrepancies: Vec<Discrepancy>,
    #[serde(serialize_with = "ser_ratio")]
    pub trivial_inner: Ratio<i64>,
    #[serde(serialize_with = "ser_ratio")]
    pub regular_inner: Ratio<i64>,
}

/// `(d−1)` regular plus one trivial (free of rank `d`), or `(2g−2)` regular
/// plus two trivial (closed surface of genus `g`).
pub fn expected_decomposition(c: &CoverHomology) -> (i64, i64) {
    let pres = c.quotient().presentation();
    match pres.genus() {
        None => (pres.rank() as i64 - 1, 1),
        Some(g) => (2 * g as i64 - 2, 2),
    }
}

pub fn verify_chevalley_weil(c: &CoverHomology) -> ChevalleyWeilReport {
    verify_chevalley_weil_with(c, &conjugacy_classes(c.quotient()))
}

pub fn verify_chevalley_weil_with(c: &CoverHomology, classes: &ConjugacyClasses) -> ChevalleyWeilReport {
    let chi = deck_character_with(c, classes);
    let (reg, triv) = expected_decomposition(c);
    let expected = |g: usize| if g == 0 { reg * chi.order() as i64 + triv } else { triv };
    let discrepancies: Vec<Discrepancy> = chi
        .representatives
        .iter()
        .zip(&chi.values)
        .filter(|(&g, &v)| expected(g) != v)
        .map(|(&g, &v)| Discrepancy { representative: g, expected: expected(g), actual: v })
        .collect();
    ChevalleyWeilReport {
        holds: discrepancies.is_empty(),
        order: chi.order(),
        h1_rank: c.rank(),
        regular_copies: reg,
        trivial_copies: triv,
        trivial_inner: chi.inner(&chi.trivial_like()),
        regular_inner: chi.inner(&chi.regular_like()),
        discrepancies,
        character: chi,
    }
}

/// Distinct nonzero columns of `Σ_γ D_γ`, whose span over `Q` is the fixed
/// subspace.
fn averaging_columns(c: &CoverHomology) -> IntMatrix {
    let mut columns: Vec<Vec<i64>> = (0..c.rank())
        .map(|j| c.deck_sum_column(j))
        .filter(|v| v.iter().any(|&x| x != 0))
        .collect();
    columns.sort_unstable();
    columns.dedup();
    if columns.is_empty() {
        return IntMatrix::zeros(0, c.rank());
    }
    IntMatrix::from_rows(&columns)
}

/// Integer basis, in Hermite form, of `{v : D_γ v = v for all γ}`.
///
/// Computed as the saturation of the image of `Σ_γ D_γ`, which over `Q` is
/// the projection onto the fixed vectors.
pub fn fixed_subspace(c: &CoverHomology) -> IntMatrix {
    saturate_rows(&averaging_columns(c))
}

/// The same subspace as the integer nullspace of the stacked `D_x − I` over
/// the generators of Γ. Dense and slow; meant for small covers.
pub fn fixed_subspace_by_nullspace(c: &CoverHomology) -> IntMatrix {
    let q = c.quotient();
    let r = c.rank();
    let blocks: Vec<IntMatrix> = (1..=q.rank())
        .map(|i| {
            let d = c.induced_deck(q.generator_element(i));
            IntMatrix::from_fn(r, r, |a, b| BigInt::from(d.get(a, b) - i64::from(a == b)))
        })
        .collect();
    integer_nullspace(&IntMatrix::stack(&blocks))
}

fn basis_vectors(basis: &IntMatrix) -> Vec<Vec<i64>> {
    basis.to_i64_rows().expect("fixed vectors fit in 64 bits")
}

/// Whether `v` is fixed by every generator of the deck group.
fn is_fixed(decks: &[InducedMatrix], v: &[i64]) -> bool {
    decks.iter().all(|d| d.apply(v) == v)
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducibilityReport {
    pub quotient: String,
    pub order: usize,
    pub h1_rank: usize,
    pub fixed_dimension: usize,
    pub fixed_basis: Vec<Vec<i64>>,
    /// One flag per supplied endomorphism: does its matrix keep the fixed
    /// subspace inside itself.
    pub invariant: Vec<bool>,
    #[serde(serialize_with = "ser_ratio")]
    pub trivial_inner: Ratio<i64>,
    #[serde(serialize_with = "ser_ratio")]
    pub regular_inner: Ratio<i64>,
    pub verdict: String,
}

/// Checks that the fixed subspace is invariant under each lifted `f`; when
/// Γ is nontrivial it is a proper invariant subspace, so the joint action is
/// reducible.
pub fn reducibility_report(c: &CoverHomology, fs: &[EndoMap]) -> Result<ReducibilityReport> {
    let q = c.quotient();
    let basis = basis_vectors(&fixed_subspace(c));
    let decks: Vec<InducedMatrix> =
        (1..=q.rank()).map(|i| c.induced_deck(q.generator_element(i))).collect();
    let mut invariant = Vec::with_capacity(fs.len());
    for f in fs {
        let m = c.induced_automorphism(f)?;
        invariant.push(basis.iter().all(|b| is_fixed(&decks, &m.apply(b))));
    }
    let chi = deck_character(c);
    let dim = basis.len();
    let verdict = if q.order() == 1 {
        "trivial quotient: no proper invariant subspace is exhibited".to_string()
    } else if dim < c.rank() && invariant.iter().all(|&x| x) {
        format!("reducible: the {dim}-dimensional fixed subspace is a proper invariant subspace of the {}-dimensional H1", c.rank())
    } else {
        "fixed subspace is not invariant under every supplied map".to_string()
    };
    Ok(ReducibilityReport {
        quotient: q.name().to_string(),
        order: q.order(),
        h1_rank: c.rank(),
        fixed_dimension: dim,
        fixed_basis: basis,
        invariant,
        trivial_inner: chi.inner(&chi.trivial_like()),
        regular_inner: chi.inner(&chi.regular_like()),
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerStabilisation {
    /// Order of the automorphism of Γ induced by `f`.
    pub power: usize,
    /// Whether the matrix of `f^power` commutes with every deck matrix.
    pub commutes: bool,
}

/// For `f` inducing `ᾱ` of order `n` on Γ, the matrix of `fⁿ` commutes with
/// the deck group. Returns `None` when `f` does not preserve the kernel.
pub fn power_stabilisation(c: &CoverHomology, f: &EndoMap) -> Result<Option<PowerStabilisation>> {
    let q = c.quotient();
    let Some(alpha) = q.induced_map(f)? else { return Ok(None) };
    let mut n = 1usize;
    let mut cur = alpha.clone();
    while cur.iter().enumerate().any(|(i, &x)| i != x) {
        cur = cur.iter().map(|&x| alpha[x]).collect();
        n += 1;
    }
    let m = c.induced_automorphism(f)?;
    let mut mn = InducedMatrix::identity(c.rank());
    for _ in 0..n {
        mn = mn.mul(&m);
    }
    let commutes = (1..=q.rank()).all(|i| {
        let d = c.induced_deck(q.generator_element(i));
        mn.mul(&d) == d.mul(&mn)
    });
    Ok(Some(PowerStabilisation { power: n, commutes }))
}
