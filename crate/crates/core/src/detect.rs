//! Finite-quotient witnesses: nontrivial action on the homology of a cover,
//! action differing from every deck transformation, and separation of
//! conjugacy classes.
//!
//! Catalogs are finite, so a search that finds nothing reports the catalog
//! as exhausted and never claims the opposite statement.

use serde::Serialize;

use crate::catalog::{CatalogEntry, QuotientCatalog};
use crate::endo::EndoMap;
use crate::error::{Error, Result};
use crate::homology::CoverHomology;
use crate::quotient::{ClassFingerprint, FiniteQuotient};
use crate::word::Word;

/// Default largest power of `f` examined by [`classify_witnesses`].
pub const DEFAULT_POWER_BOUND: usize = 12;

pub const OBSTRUCTION: &str = "reduction obstruction found";
pub const NO_OBSTRUCTION: &str = "no obstruction in catalog";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Faithfulness,
    NonInner,
    ConjugacySeparation,
    None,
}

/// Why the lift of `f` is not the deck transformation `γ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "by", rename_all = "snake_case")]
pub enum DeckDisagreement {
    /// `γ·x·γ⁻¹ ≠ ᾱ(x)` for the generator `x`, so the two maps already
    /// differ on Γ and therefore on the (faithful) deck module.
    Quotient { gamma: usize, generator: usize, conjugate: usize, image: usize },
    /// Entry `(row, column)` of the two matrices.
    Column { gamma: usize, column: usize, row: usize, automorphism_entry: i64, deck_entry: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WitnessDetail {
    Exhausted {
        examined: Vec<String>,
    },
    Faithfulness {
        rank: usize,
        automorphism: String,
        /// An element of Γ moved by the induced automorphism, and its image.
        moved: usize,
        image: usize,
        column: usize,
        row: usize,
        value: i64,
    },
    NonInner {
        rank: usize,
        automorphism: String,
        disagreements: Vec<DeckDisagreement>,
    },
    ConjugacySeparation {
        rank: usize,
        words: [String; 2],
        elements: [usize; 2],
        fingerprints: [ClassFingerprint; 2],
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub quotient: Option<String>,
    pub detail: WitnessDetail,
    pub note: String,
}

impl Witness {
    fn exhausted(examined: Vec<String>, note: &str) -> Self {
        Witness {
            kind: WitnessKind::None,
            quotient: None,
            detail: WitnessDetail::Exhausted { examined },
            note: note.to_string(),
        }
    }

    pub fn found(&self) -> bool {
        self.kind != WitnessKind::None
    }

    /// Rechecks the witness from its recorded detail and the catalog alone.
    /// A `None`-kind report carries no claim and replays trivially.
    pub fn replay(&self, catalog: &QuotientCatalog) -> Result<bool> {
        let entry = match &self.quotient {
            Some(name) => catalog
                .get(name)
                .ok_or_else(|| Error::InvalidCatalog(format!("no quotient named {name}")))?,
            None => return Ok(self.kind == WitnessKind::None),
        };
        let q = entry.quotient();
        match &self.detail {
            WitnessDetail::Exhausted { .. } => Ok(false),
            WitnessDetail::Faithfulness { rank, automorphism, moved, image, column, row, value } => {
                let f = EndoMap::parse(automorphism, *rank)?;
                let Some(alpha) = q.induced_map(&f)? else { return Ok(false) };
                let c = entry.cover()?;
                c.check_preserved(&f)?;
                let col = c.automorphism_column(&f, *column)?;
                Ok(alpha[*moved] == *image
                    && image != moved
                    && col[*row] == *value
                    && *value != i64::from(row == column))
            }
            WitnessDetail::NonInner { rank, automorphism, disagreements } => {
                let f = EndoMap::parse(automorphism, *rank)?;
                let Some(alpha) = q.induced_map(&f)? else { return Ok(false) };
                let c = entry.cover()?;
                c.check_preserved(&f)?;
                let mut covered = vec![false; q.order()];
                for d in disagreements {
                    let ok = match *d {
                        DeckDisagreement::Quotient { gamma, generator, conjugate, image } => {
                            let x = q.generator_element(generator);
                            deck_group_is_faithful(q)
                                && conjugate == q.mul(q.mul(gamma, x), q.inv(gamma))
                                && image == alpha[x]
                                && conjugate != image
                                && mark(&mut covered, gamma)
                        }
                        DeckDisagreement::Column { gamma, column, row, automorphism_entry, deck_entry } => {
                            c.automorphism_column(&f, column)?[row] == automorphism_entry
                                && c.deck_column(gamma, column)[row] == deck_entry
                                && automorphism_entry != deck_entry
                                && mark(&mut covered, gamma)
                        }
                    };
                    if !ok {
                        return Ok(false);
                    }
                }
                Ok(covered.iter().all(|&x| x))
            }
            WitnessDetail::ConjugacySeparation { rank, words, elements, .. } => {
                if *rank != q.rank() {
                    return Ok(false);
                }
                let e0 = q.element_of(&Word::parse(&words[0], *rank)?)?;
                let e1 = q.element_of(&Word::parse(&words[1], *rank)?)?;
                Ok([e0, e1] == *elements && !brute_force_conjugate(q, e0, e1))
            }
        }
    }
}

fn mark(covered: &mut [bool], gamma: usize) -> bool {
    match covered.get_mut(gamma) {
        Some(c) => {
            *c = true;
            true
        }
        None => false,
    }
}

/// The deck group acts faithfully on `H₁` once the cover carries at least
/// one copy of the regular representation: free rank ≥ 2 or a surface.
fn deck_group_is_faithful(q: &FiniteQuotient) -> bool {
    q.presentation().is_surface() || q.rank() >= 2
}

fn brute_force_conjugate(q: &FiniteQuotient, a: usize, b: usize) -> bool {
    (0..q.order()).any(|g| q.mul(q.mul(g, a), q.inv(g)) == b)
}

fn require_automorphism(f: &EndoMap) -> Result<()> {
    if f.is_automorphism() {
        return Ok(());
    }
    f.clone().invert().map(|_| ())
}

/// The cover of `entry` when `f` descends to it, with `ᾱ`.
fn descending<'a>(entry: &'a CatalogEntry, f: &EndoMap) -> Result<Option<(&'a CoverHomology, Vec<usize>)>> {
    let q = entry.quotient();
    if q.rank() != f.rank() {
        return Ok(None);
    }
    let Some(alpha) = q.induced_map(f)? else { return Ok(None) };
    let c = entry.cover()?;
    match c.check_preserved(f) {
        Ok(()) => Ok(Some((c, alpha))),
        Err(Error::KernelNotPreserved { .. } | Error::RelatorNotPreserved { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Scans the catalog in order for a quotient on which `f` induces a
/// nontrivial automorphism of Γ, and returns the first matrix entry showing
/// that the lift of `f` acts nontrivially on `H₁` of the cover.
pub fn faithfulness_witness(f: &EndoMap, catalog: &QuotientCatalog) -> Result<Witness> {
    require_automorphism(f)?;
    let mut examined = Vec::new();
    let mut any_nontrivial = false;
    for entry in catalog.entries() {
        let Some((c, alpha)) = descending(entry, f)? else { continue };
        examined.push(entry.name().to_string());
        let Some(moved) = (0..alpha.len()).find(|&g| alpha[g] != g) else { continue };
        any_nontrivial = true;
        for j in 0..c.rank() {
            let col = c.automorphism_column(f, j)?;
            if let Some(row) = (0..col.len()).find(|&i| col[i] != i64::from(i == j)) {
                return Ok(Witness {
                    kind: WitnessKind::Faithfulness,
                    quotient: Some(entry.name().to_string()),
                    detail: WitnessDetail::Faithfulness {
                        rank: f.rank(),
                        automorphism: f.to_string(),
                        moved,
                        image: alpha[moved],
                        column: j,
                        row,
                        value: col[row],
                    },
                    note: format!("induced automorphism of Γ is nontrivial and the lift moves basis vector {j}"),
                });
            }
        }
    }
    let note = if any_nontrivial {
        "catalog exhausted: every nontrivial induced automorphism examined acts as the identity on H1"
    } else {
        "induces trivial map everywhere: no catalog quotient sees a nontrivial induced automorphism"
    };
    Ok(Witness::exhausted(examined, note))
}

/// Disagreements of the lift of `f` with every deck matrix of `c`, or
/// `None` if some deck matrix equals it.
fn deck_disagreements(c: &CoverHomology, f: &EndoMap, alpha: &[usize]) -> Result<Option<Vec<DeckDisagreement>>> {
    let q = c.quotient();
    let r = c.rank();
    let faithful = deck_group_is_faithful(q);
    let gens: Vec<usize> = (1..=q.rank()).map(|i| q.generator_element(i)).collect();
    let mut columns: Vec<Option<Vec<i64>>> = vec![None; r];
    let mut out = Vec::with_capacity(q.order());
    'gamma: for gamma in 0..q.order() {
        if faithful {
            let gi = q.inv(gamma);
            for (i, &x) in gens.iter().enumerate() {
                let conjugate = q.mul(q.mul(gamma, x), gi);
                if conjugate != alpha[x] {
                    out.push(DeckDisagreement::Quotient { gamma, generator: i + 1, conjugate, image: alpha[x] });
                    continue 'gamma;
                }
            }
        }
        for j in 0..r {
            if columns[j].is_none() {
                columns[j] = Some(c.automorphism_column(f, j)?);
            }
            let a = columns[j].as_ref().unwrap();
            let d = c.deck_column(gamma, j);
            if let Some(row) = (0..r).find(|&i| a[i] != d[i]) {
                out.push(DeckDisagreement::Column {
                    gamma,
                    column: j,
                    row,
                    automorphism_entry: a[row],
                    deck_entry: d[row],
                });
                continue 'gamma;
            }
        }
        return Ok(None);
    }
    Ok(Some(out))
}

/// First catalog quotient on which the lift of `f` differs from the action
/// of every deck transformation.
pub fn non_inner_witness(f: &EndoMap, catalog: &QuotientCatalog) -> Result<Witness> {
    require_automorphism(f)?;
    let mut examined = Vec::new();
    for entry in catalog.entries() {
        let Some((c, alpha)) = descending(entry, f)? else { continue };
        examined.push(entry.name().to_string());
        if let Some(disagreements) = deck_disagreements(c, f, &alpha)? {
            return Ok(Witness {
                kind: WitnessKind::NonInner,
                quotient: Some(entry.name().to_string()),
                detail: WitnessDetail::NonInner { rank: f.rank(), automorphism: f.to_string(), disagreements },
                note: format!("the lift differs from all {} deck transformations", c.quotient().order()),
            });
        }
    }
    Ok(Witness::exhausted(examined, "catalog exhausted: the lift matches a deck transformation on every cover examined"))
}

/// First entry (of matching rank) on which the elements produced by
/// `images` are not conjugate.
fn first_separator<'a>(
    catalog: &'a QuotientCatalog,
    rank: usize,
    mut images: impl FnMut(&FiniteQuotient) -> Result<(usize, usize)>,
    examined: &mut Vec<String>,
) -> Result<Option<(&'a CatalogEntry, usize, usize)>> {
    for entry in catalog.entries() {
        let q = entry.quotient();
        if q.rank() != rank {
            continue;
        }
        examined.push(entry.name().to_string());
        let (a, b) = images(q)?;
        if !entry.classes().conjugate(a, b) {
            debug_assert!(!brute_force_conjugate(q, a, b));
            return Ok(Some((entry, a, b)));
        }
    }
    Ok(None)
}

fn separation_witness(entry: &CatalogEntry, w1: &Word, w2: &Word, a: usize, b: usize) -> Witness {
    let classes = entry.classes();
    let fp = |g: usize| classes.classes[classes.class_of[g]].fingerprint.clone();
    Witness {
        kind: WitnessKind::ConjugacySeparation,
        quotient: Some(entry.name().to_string()),
        detail: WitnessDetail::ConjugacySeparation {
            rank: w1.rank(),
            words: [w1.to_string(), w2.to_string()],
            elements: [a, b],
            fingerprints: [fp(a), fp(b)],
        },
        note: if fp(a) != fp(b) {
            "images have different class fingerprints".to_string()
        } else {
            "images have equal fingerprints but lie in different classes".to_string()
        },
    }
}

/// First catalog quotient in which the images of `w1` and `w2` are not
/// conjugate.
pub fn conjugacy_separation(w1: &Word, w2: &Word, catalog: &QuotientCatalog) -> Result<Witness> {
    if w1.rank() != w2.rank() {
        return Err(Error::RankMismatch { expected: w1.rank(), found: w2.rank() });
    }
    let mut examined = Vec::new();
    let found = first_separator(
        catalog,
        w1.rank(),
        |q| Ok((q.element_of(w1)?, q.element_of(w2)?)),
        &mut examined,
    )?;
    Ok(match found {
        Some((entry, a, b)) => separation_witness(entry, w1, w2, a, b),
        None => Witness::exhausted(examined, "catalog exhausted: the images are conjugate in every quotient examined"),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerOutcome {
    pub power: usize,
    pub outcome: &'static str,
    pub quotient: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateReport {
    pub candidate: String,
    /// `(peripheral index, exponent)` when the candidate is freely conjugate
    /// to a power of a peripheral word.
    pub peripheral: Option<(usize, i64)>,
    /// First quotient whose image of the candidate is conjugate to no power
    /// of any peripheral image.
    pub non_peripheral_in: Option<String>,
    pub powers: Vec<PowerOutcome>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub automorphism: String,
    pub power_bound: usize,
    pub candidates: Vec<CandidateReport>,
    pub note: String,
}

/// `π(fᵏ(x_i))` for `k = 1..=bound`, computed by evaluating `π∘f^{k−1}` on
/// `f(x_i)` so that no word is ever expanded.
fn power_images(q: &FiniteQuotient, f: &EndoMap, bound: usize) -> Result<Vec<Vec<usize>>> {
    let first = q.hom_images(f)?;
    let mut out = vec![first.clone()];
    for _ in 1..bound {
        let prev = out.last().unwrap();
        let next = f.images().iter().map(|w| q.eval_hom(prev, w)).collect();
        out.push(next);
    }
    Ok(out)
}

fn peripheral_exponent(c: &Word, peripheral: &[Word]) -> Option<(usize, i64)> {
    let cl = c.cyclic_reduce().len() as i64;
    for (i, p) in peripheral.iter().enumerate() {
        let pl = p.cyclic_reduce().len() as i64;
        if pl == 0 {
            if cl == 0 {
                return Some((i, 0));
            }
            continue;
        }
        if cl % pl != 0 {
            continue;
        }
        let m = cl / pl;
        for e in [m, -m] {
            if c.is_free_conjugate(&p.pow(e)) {
                return Some((i, e));
            }
        }
    }
    None
}

/// For each candidate `c` and `k ≤ power_bound`, looks for a quotient
/// separating the classes of `fᵏ(c)` and `c`. Finding one is an obstruction
/// to `fᵏ` fixing the class of `c`; finding none is not a proof of anything.
pub fn classify_witnesses(
    f: &EndoMap,
    candidates: &[Word],
    peripheral: &[Word],
    catalog: &QuotientCatalog,
    power_bound: usize,
) -> Result<ClassificationReport> {
    require_automorphism(f)?;
    if power_bound == 0 {
        return Err(Error::InvalidArgument("power bound must be positive".into()));
    }
    for w in candidates.iter().chain(peripheral) {
        if w.rank() != f.rank() {
            return Err(Error::RankMismatch { expected: f.rank(), found: w.rank() });
        }
    }
    let relevant: Vec<&CatalogEntry> =
        catalog.entries().iter().filter(|e| e.quotient().rank() == f.rank()).collect();
    let mut powers_by_entry = Vec::with_capacity(relevant.len());
    for e in &relevant {
        powers_by_entry.push(power_images(e.quotient(), f, power_bound)?);
    }
    let mut reports = Vec::with_capacity(candidates.len());
    for c in candidates {
        let base: Vec<usize> = relevant.iter().map(|e| e.quotient().element_of(c)).collect::<Result<_>>()?;
        let mut powers = Vec::with_capacity(power_bound);
        for k in 0..power_bound {
            let sep = relevant.iter().enumerate().find(|(i, e)| {
                let img = e.quotient().eval_hom(&powers_by_entry[*i][k], c);
                !e.classes().conjugate(img, base[*i])
            });
            powers.push(PowerOutcome {
                power: k + 1,
                outcome: if sep.is_some() { OBSTRUCTION } else { NO_OBSTRUCTION },
                quotient: sep.map(|(_, e)| e.name().to_string()),
            });
        }
        let periph = peripheral_exponent(c, peripheral);
        let non_peripheral_in = if periph.is_none() && !peripheral.is_empty() {
            relevant.iter().zip(&base).find_map(|(e, &g)| {
                let q = e.quotient();
                let classes = e.classes();
                let hit = peripheral.iter().any(|p| {
                    let pe = q.element_of(p).expect("rank checked");
                    let mut x = 0;
                    for _ in 0..q.element_order(pe) {
                        if classes.conjugate(x, g) {
                            return true;
                        }
                        x = q.mul(x, pe);
                    }
                    false
                });
                (!hit).then(|| e.name().to_string())
            })
        } else {
            None
        };
        reports.push(CandidateReport {
            candidate: c.to_string(),
            peripheral: periph,
            non_peripheral_in,
            powers,
        });
    }
    Ok(ClassificationReport {
        automorphism: f.to_string(),
        power_bound,
        candidates: reports,
        note: format!(
            "\"{OBSTRUCTION}\" means some quotient separates the classes of f^k(c) and c; \
             \"{NO_OBSTRUCTION}\" is consistent with f^k fixing the class of c and is not a proof. \
             No Nielsen-Thurston type is certified."
        ),
    })
}
