//! Fox calculus, the Burau and Lawrence–Krammer representations of braid
//! groups, and spectral-radius suprema over the unit circle and torus.
//!
//! The unreduced Burau matrix of `β` is the Fox Jacobian
//! `J_{ij} = φ(∂β(x_j)/∂x_i)` with `φ(x_k) = t`; it multiplies in braid word
//! order. The reduced matrix is its restriction to the invariant subspace of
//! vectors with coordinate sum zero, in the basis `b_k = e_k − e_{k+1}`.
//!
//! Lawrence–Krammer generators act on `v_{j,k}` (`j < k`, lexicographic) by
//!
//! ```text
//! σ_i v_{j,k} = v_{j,k}                                   i ∉ {j−1, j, k−1, k}
//!             = q v_{i,k} + (q²−q) v_{i,j} + (1−q) v_{j,k} i = j−1
//!             = v_{j+1,k}                                 i = j ≠ k−1
//!             = q v_{j,i} + (1−q) v_{j,k} − (q²−q) t v_{i,k} i = k−1 ≠ j
//!             = v_{j,k+1}                                 i = k
//!             = −t q² v_{j,k}                             i = j = k−1
//! ```

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::braid::{artin_generator, BraidWord};
use crate::error::{Error, Result};
use crate::numerics::cpoly::{spectral_radius, CMatrix};
use crate::numerics::{LaurentMatrix, LaurentPoly};
use crate::word::Word;

const UNIT_TOL: f64 = 1e-12;
pub const MIN_MESH: usize = 16;

/// Image of `∂w/∂x_i` under `x_k ↦ t`.
pub fn fox_derivative(w: &Word, i: usize) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    let mut e = 0i32;
    for &l in w.letters() {
        let hit = l.unsigned_abs() as usize == i;
        if l > 0 {
            if hit {
                out.add_term((0, e), BigInt::from(1));
            }
            e += 1;
        } else {
            e -= 1;
            if hit {
                out.add_term((0, e), BigInt::from(-1));
            }
        }
    }
    out
}

/// Fox Jacobian of an endomorphism's images: column `j` holds the
/// derivatives of the `j`-th image.
pub fn fox_jacobian(images: &[Word]) -> LaurentMatrix {
    let n = images.len();
    LaurentMatrix::from_fn(n, |i, j| fox_derivative(&images[j], i + 1))
}

fn product(n: usize, factors: impl Iterator<Item = LaurentMatrix>) -> LaurentMatrix {
    factors.fold(LaurentMatrix::identity(n), |acc, m| acc.mul(&m))
}

pub fn burau_unreduced(beta: &BraidWord) -> LaurentMatrix {
    let n = beta.strands();
    product(
        n,
        beta.letters().iter().map(|&l| {
            fox_jacobian(artin_generator(n, l).expect("validated braid").images())
        }),
    )
}

/// Restriction of the unreduced matrix to `span{e_k − e_{k+1}}`. The
/// coordinate of `v` on `b_k` is `Σ_{j≤k} v_j`.
pub fn reduce(b: &LaurentMatrix) -> LaurentMatrix {
    let n = b.dim();
    LaurentMatrix::from_fn(n - 1, |k, l| {
        // (B b_l)_j = B[j][l] − B[j][l+1]
        (0..=k).fold(LaurentPoly::zero(), |acc, j| &acc + &(b.get(j, l) - b.get(j, l + 1)))
    })
}

pub fn burau_reduced(beta: &BraidWord) -> LaurentMatrix {
    reduce(&burau_unreduced(beta))
}

/// Index of `v_{j,k}` (1-based, `j < k`) in the lexicographic basis.
fn lk_index(n: usize, j: usize, k: usize) -> usize {
    (j - 1) * n - (j - 1) * j / 2 + (k - j - 1)
}

fn lk_generator(n: usize, i: usize) -> LaurentMatrix {
    let dim = n * (n - 1) / 2;
    let q = LaurentPoly::q();
    let t = LaurentPoly::t();
    let one = LaurentPoly::one();
    let q2_q = &(&q * &q) - &q;
    let one_q = &one - &q;
    let mut m = LaurentMatrix::zeros(dim);
    for j in 1..n {
        for k in j + 1..=n {
            let col = lk_index(n, j, k);
            let mut put = |a: usize, b: usize, c: LaurentPoly| {
                let slot = m.entry_mut(lk_index(n, a, b), col);
                *slot = &*slot + &c;
            };
            if i + 1 == j {
                put(i, k, q.clone());
                put(i, j, q2_q.clone());
                put(j, k, one_q.clone());
            } else if i == j && i + 1 == k {
                put(j, k, LaurentPoly::monomial(-1, 2, 1));
            } else if i == j {
                put(j + 1, k, one.clone());
            } else if i + 1 == k {
                put(j, i, q.clone());
                put(j, k, one_q.clone());
                put(i, k, -&(&q2_q * &t));
            } else if i == k {
                put(j, k + 1, one.clone());
            } else {
                put(j, k, one.clone());
            }
        }
    }
    m
}

/// Lawrence–Krammer matrix over `Z[q^±1, t^±1]`, of dimension `n(n−1)/2`.
pub fn lk_matrix(beta: &BraidWord) -> LaurentMatrix {
    let n = beta.strands();
    let gens: Vec<LaurentMatrix> = (1..n).map(|i| lk_generator(n, i)).collect();
    let mut inverses: Vec<Option<LaurentMatrix>> = vec![None; n - 1];
    let mut out = LaurentMatrix::identity(n * (n - 1) / 2);
    for &l in beta.letters() {
        let i = l.unsigned_abs() as usize - 1;
        let g = if l > 0 {
            &gens[i]
        } else {
            inverses[i].get_or_insert_with(|| {
                gens[i].inverse().expect("generator determinant is a unit")
            })
        };
        out = out.mul(g);
    }
    out
}

fn check_unit(z: Complex64) -> Result<()> {
    let r = z.norm();
    if (r - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit(r));
    }
    Ok(())
}

/// Evaluates at `t` (and `q`, default 1) on the unit circle.
pub fn specialize(m: &LaurentMatrix, t: Complex64, q: Option<Complex64>) -> Result<CMatrix> {
    check_unit(t)?;
    let q = q.unwrap_or(Complex64::new(1.0, 0.0));
    check_unit(q)?;
    Ok(CMatrix::new(m.dim(), m.eval(q, t)))
}

/// The point `e^{2πik/mesh}`, exact at `±1` and `±i`.
fn circle_point(k: usize, mesh: usize) -> (f64, Complex64) {
    let angle = 2.0 * PI * k as f64 / mesh as f64;
    let z = match (4 * k) % mesh {
        0 => match 4 * k / mesh {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        },
        _ => Complex64::new(angle.cos(), angle.sin()),
    };
    (angle, z)
}

/// Sample angles (with their points) of a mesh, always containing `1` and `−1`.
fn circle_mesh(mesh: usize) -> Vec<(f64, Complex64)> {
    let mut pts: Vec<(f64, Complex64)> = (0..mesh).map(|k| circle_point(k, mesh)).collect();
    if mesh % 2 == 1 {
        pts.push((PI, Complex64::new(-1.0, 0.0)));
    }
    pts
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    /// Argument of `t`.
    pub t_angle: f64,
    /// Argument of `q` on the torus.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_angle: Option<f64>,
    /// The sampled value: the spectral radius, or its square root on the torus.
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralSupremum {
    pub mesh: usize,
    pub matrix_dim: usize,
    pub square_root: bool,
    pub sup: f64,
    pub argmax: Sample,
    #[serde(skip)]
    pub samples: Vec<Sample>,
}

impl SpectralSupremum {
    fn from_samples(mesh: usize, matrix_dim: usize, square_root: bool, samples: Vec<Sample>) -> Self {
        let argmax = samples
            .iter()
            .copied()
            .fold(None::<Sample>, |best, s| match best {
                Some(b) if b.value >= s.value => Some(b),
                _ => Some(s),
            })
            .expect("mesh is nonempty");
        SpectralSupremum { mesh, matrix_dim, square_root, sup: argmax.value, argmax, samples }
    }

    /// Tab separated `angle(s) value` lines.
    pub fn samples_tsv(&self) -> String {
        let mut out = String::new();
        for s in &self.samples {
            match s.q_angle {
                Some(qa) => out.push_str(&format!("{:.12}\t{:.12}\t{:.12}\n", s.t_angle, qa, s.value)),
                None => out.push_str(&format!("{:.12}\t{:.12}\n", s.t_angle, s.value)),
            }
        }
        out
    }
}

fn check_mesh(mesh: usize) -> Result<()> {
    if mesh < MIN_MESH {
        return Err(Error::InvalidArgument(format!("mesh must be at least {MIN_MESH}")));
    }
    Ok(())
}

/// Maximum spectral radius of a one-variable matrix over the circle mesh.
pub fn circle_supremum(m: &LaurentMatrix, mesh: usize) -> Result<SpectralSupremum> {
    check_mesh(mesh)?;
    if m.variable_count() > 1 {
        return Err(Error::InvalidArgument("circle supremum needs a one-variable matrix".into()));
    }
    let samples = circle_mesh(mesh)
        .into_par_iter()
        .map(|(angle, t)| {
            Ok(Sample { t_angle: angle, q_angle: None, value: spectral_radius(&specialize(m, t, None)?)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralSupremum::from_samples(mesh, m.dim(), false, samples))
}

/// Maximum of `√ρ` over the `mesh × mesh` grid of `(q, t)` on the torus.
pub fn torus_supremum(m: &LaurentMatrix, mesh: usize) -> Result<SpectralSupremum> {
    check_mesh(mesh)?;
    let pts = circle_mesh(mesh);
    let grid: Vec<((f64, Complex64), (f64, Complex64))> =
        pts.iter().flat_map(|&qp| pts.iter().map(move |&tp| (qp, tp))).collect();
    let samples = grid
        .into_par_iter()
        .map(|((qa, q), (ta, t))| {
            let rho = spectral_radius(&specialize(m, t, Some(q))?)?;
            Ok(Sample { t_angle: ta, q_angle: Some(qa), value: rho.sqrt() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralSupremum::from_samples(mesh, m.dim(), true, samples))
}

/// Whether two coefficient lists (in the eigenvalue variable) agree after
/// multiplying one by `±t^k` for a single `k`.
pub fn equal_up_to_unit(a: &[LaurentPoly], b: &[LaurentPoly]) -> bool {
    let trim = |p: &[LaurentPoly]| {
        let mut n = p.len();
        while n > 0 && p[n - 1].is_zero() {
            n -= 1;
        }
        n
    };
    let (na, nb) = (trim(a), trim(b));
    if na != nb {
        return false;
    }
    let Some(i) = (0..na).find(|&i| !a[i].is_zero()) else { return true };
    let (Some((lo_a, _)), Some((lo_b, _))) = (a[i].t_degree_range(), b[i].t_degree_range()) else {
        return false;
    };
    let k = lo_b - lo_a;
    [1i64, -1].iter().any(|&s| {
        let s = BigInt::from(s);
        (0..na).all(|j| a[j].shift(0, k).scale(&s) == b[j])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::braid_to_endo;
    use crate::numerics::cpoly::eval_poly;
    use crate::numerics::{char_poly, roots};
    use proptest::prelude::*;

    fn braid(s: &str, n: usize) -> BraidWord {
        BraidWord::parse(s, Some(n)).unwrap()
    }

    fn t_pow(e: i32) -> LaurentPoly {
        LaurentPoly::monomial(1, 0, e)
    }

    #[test]
    fn fox_axioms() {
        let xy = Word::parse("ab", 2).unwrap();
        assert_eq!(fox_derivative(&xy, 1), LaurentPoly::one());
        assert_eq!(fox_derivative(&xy, 2), LaurentPoly::t());
        let xi = Word::parse("a'", 1).unwrap();
        assert_eq!(fox_derivative(&xi, 1), LaurentPoly::monomial(-1, 0, -1));
    }

    fn word_strategy() -> impl Strategy<Value = Word> {
        (2usize..=4).prop_flat_map(|r| {
            let r = r as i32;
            prop::collection::vec(prop_oneof![1..=r, -r..=-1], 0..=20)
                .prop_map(move |l| Word::new(r as usize, &l).unwrap())
        })
    }

    proptest! {
        #[test]
        fn fundamental_identity(w in word_strategy()) {
            let tm1 = &LaurentPoly::t() - &LaurentPoly::one();
            let lhs = (1..=w.rank()).fold(LaurentPoly::zero(), |acc, i| &acc + &(&fox_derivative(&w, i) * &tm1));
            let rhs = &t_pow(w.exponent_sum() as i32) - &LaurentPoly::one();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn burau_is_multiplicative(a in prop::collection::vec(prop_oneof![1..=3i32, -3..=-1i32], 0..6),
                                   b in prop::collection::vec(prop_oneof![1..=3i32, -3..=-1i32], 0..6)) {
            let (x, y) = (BraidWord::new(4, a).unwrap(), BraidWord::new(4, b).unwrap());
            let xy = x.concat(&y).unwrap();
            prop_assert_eq!(burau_unreduced(&xy), burau_unreduced(&x).mul(&burau_unreduced(&y)));
            prop_assert_eq!(burau_unreduced(&xy), fox_jacobian(braid_to_endo(&xy).images()));
            let det = burau_unreduced(&xy).char_poly()[0].clone();
            prop_assert!(det.as_unit().is_some());
        }

        #[test]
        fn specialization_commutes_with_products(a in prop::collection::vec(prop_oneof![1..=2i32, -2..=-1i32], 0..5),
                                                 b in prop::collection::vec(prop_oneof![1..=2i32, -2..=-1i32], 0..5),
                                                 theta in 0.0..(2.0 * PI)) {
            let (x, y) = (BraidWord::new(3, a).unwrap(), BraidWord::new(3, b).unwrap());
            let t = Complex64::new(theta.cos(), theta.sin());
            let whole = specialize(&burau_reduced(&x.concat(&y).unwrap()), t, None).unwrap();
            let parts = specialize(&burau_reduced(&x), t, None).unwrap().mul(&specialize(&burau_reduced(&y), t, None).unwrap());
            prop_assert!(whole.max_abs_diff(&parts) < 1e-9);
        }
    }

    #[test]
    fn burau_examples() {
        assert!(burau_unreduced(&BraidWord::identity(3).unwrap()).is_identity());
        assert!(burau_reduced(&BraidWord::identity(4).unwrap()).is_identity());
        let s = burau_unreduced(&braid("1", 2));
        let at1: Vec<Complex64> = s.eval(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        assert_eq!(at1, vec![0.0, 1.0, 1.0, 0.0].into_iter().map(|x| Complex64::new(x, 0.0)).collect::<Vec<_>>());
        let b = braid("1 2 -3 2 1", 4);
        assert!(burau_unreduced(&b).mul(&burau_unreduced(&b.inverse())).is_identity());
        // det of the reduced σ₁ in B₃ is −t
        let r = burau_reduced(&braid("1", 3));
        assert_eq!(r.char_poly()[0], LaurentPoly::monomial(-1, 0, 1));
    }

    /// Reduction against an explicit change of basis `P⁻¹ B P` with the
    /// first `n−1` columns of `P` the vectors `e_k − e_{k+1}` and the last
    /// `e_n`; the reduced block is the top-left corner.
    #[test]
    fn reduction_matches_change_of_basis() {
        let n = 4;
        let b = burau_unreduced(&braid("1 2 -3 1", n));
        let p = LaurentMatrix::from_fn(n, |i, j| {
            let v = if j + 1 < n { i64::from(i == j) - i64::from(i == j + 1) } else { i64::from(i == n - 1) };
            LaurentPoly::constant(v)
        });
        let conj = p.inverse().unwrap().mul(&b).mul(&p);
        let r = burau_reduced(&braid("1 2 -3 1", n));
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                assert_eq!(conj.get(i, j), r.get(i, j));
            }
            assert!(conj.get(n - 1, i).is_zero());
        }
    }

    #[test]
    fn hironaka_kin_char_poly() {
        let cp = burau_reduced(&braid("1 2 -3", 4)).char_poly();
        let expected = vec![
            LaurentPoly::t(),
            LaurentPoly::from_t_coeffs(0, &[1, -1, 1]),
            LaurentPoly::from_t_coeffs(-1, &[1, -1, 1]),
            LaurentPoly::one(),
        ];
        assert!(equal_up_to_unit(&cp, &expected));
        let shifted: Vec<LaurentPoly> = expected.iter().map(|p| p.shift(0, 1).scale(&BigInt::from(-1))).collect();
        assert!(equal_up_to_unit(&cp, &shifted));
        let mut wrong = expected.clone();
        wrong[0] = LaurentPoly::constant(2);
        assert!(!equal_up_to_unit(&cp, &wrong));
    }

    #[test]
    fn specialize_at_minus_one() {
        let m = specialize(&burau_reduced(&braid("1 2 -3", 4)), Complex64::new(-1.0, 0.0), None).unwrap();
        let p = char_poly(&m).unwrap();
        // the characteristic polynomial at t = −1 is (λ − 1)³
        let expected = [-1.0, 3.0, -3.0, 1.0];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - Complex64::new(b, 0.0)).norm() < 1e-12);
        }
        for r in roots(&p).unwrap() {
            assert!(eval_poly(&p, r).norm() < 1e-8);
        }
        assert!(matches!(
            specialize(&burau_reduced(&braid("1", 3)), Complex64::new(1.1, 0.0), None),
            Err(Error::NotUnit(_))
        ));
    }

    #[test]
    fn circle_examples() {
        let id = circle_supremum(&LaurentMatrix::identity(3), 16).unwrap();
        assert!((id.sup - 1.0).abs() < 1e-9);
        let m = burau_reduced(&braid("1 -2", 3));
        let s = circle_supremum(&m, 64).unwrap();
        let golden_sq = (3.0 + 5f64.sqrt()) / 2.0;
        let at_minus_one = s.samples.iter().find(|x| x.t_angle == PI).unwrap();
        assert!((at_minus_one.value - golden_sq).abs() < 1e-9);
        assert!(s.sup <= golden_sq + 1e-9);
        assert!(circle_supremum(&m, 8).is_err());
        assert_eq!(circle_supremum(&m, 17).unwrap().samples.len(), 18);
    }

    #[test]
    fn nested_meshes_are_monotone() {
        let m = burau_reduced(&braid("1 2 -3", 4));
        let a = circle_supremum(&m, 64).unwrap().sup;
        let b = circle_supremum(&m, 128).unwrap().sup;
        let c = circle_supremum(&m, 256).unwrap().sup;
        assert!(a <= b && b <= c);
    }

    #[test]
    fn lk_relations() {
        assert!(lk_matrix(&BraidWord::identity(4).unwrap()).is_identity());
        assert_eq!(lk_matrix(&braid("1 2 1", 3)), lk_matrix(&braid("2 1 2", 3)));
        assert_eq!(lk_matrix(&braid("1 3", 4)), lk_matrix(&braid("3 1", 4)));
        assert!(lk_matrix(&braid("1 -1 2 -2", 3)).is_identity());
        assert_eq!(lk_matrix(&braid("1 2 -3", 4)).dim(), 6);
        assert!(torus_supremum(&LaurentMatrix::identity(2), 16).unwrap().sup - 1.0 < 1e-9);
    }

    #[test]
    fn lk_basis_indexing() {
        let n = 5;
        let mut seen = Vec::new();
        for j in 1..n {
            for k in j + 1..=n {
                seen.push(lk_index(n, j, k));
            }
        }
        assert_eq!(seen, (0..10).collect::<Vec<_>>());
    }
}
