//! Dense matrices over arbitrary-precision integers with Smith and Hermite
//! normal forms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.data[i * c + j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Vertical concatenation.
    pub fn stack(blocks: &[IntMatrix]) -> IntMatrix {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        IntMatrix { rows, cols, data }
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// `row_dst += k · row_src`
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self.data[src * self.cols + c] * k;
            if !v.is_zero() {
                self.data[dst * self.cols + c] += v;
            }
        }
    }

    /// `col_dst += k · col_src`
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self.data[r * self.cols + src] * k;
            if !v.is_zero() {
                self.data[r * self.cols + dst] += v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let x = &mut self.data[i * self.cols + c];
            *x = -std::mem::take(x);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let x = &mut self.data[r * self.cols + j];
            *x = -std::mem::take(x);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `A = U·S·V` with `S` diagonal and `d_i | d_{i+1}`. `u_inv` and `v_inv`
/// are the inverses of `U` and `V`, so `u_inv·A·v_inv = S`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Smith {
    /// Nonzero diagonal entries in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.get(i, i).clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn min_abs_entry(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            if best.map_or(true, |(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                best = Some((i, j));
                if x.abs().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

/// Rounded quotient so that remainders are as small as possible.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if (&r * 2u8).abs() > b.abs() {
        q + 1
    } else {
        q
    }
}

/// Smith normal form with minimal-absolute-value pivoting.
pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut p = IntMatrix::identity(m);
    let mut p_inv = IntMatrix::identity(m);
    let mut q = IntMatrix::identity(n);
    let mut q_inv = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = min_abs_entry(&s, t) else {
                return Smith { u: p_inv, s, v: q_inv, u_inv: p, v_inv: q };
            };
            s.swap_rows(t, pi);
            p.swap_rows(t, pi);
            p_inv.swap_cols(t, pi);
            s.swap_cols(t, pj);
            q.swap_cols(t, pj);
            q_inv.swap_rows(t, pj);

            let pivot = s.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..m {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let k = round_div(s.get(i, t), &pivot);
                let neg = -&k;
                s.add_row(i, t, &neg);
                p.add_row(i, t, &neg);
                p_inv.add_col(t, i, &k);
                dirty |= !s.get(i, t).is_zero();
            }
            for j in t + 1..n {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let k = round_div(s.get(t, j), &pivot);
                let neg = -&k;
                s.add_col(j, t, &neg);
                q.add_col(j, t, &neg);
                q_inv.add_row(t, j, &k);
                dirty |= !s.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let offender = (t + 1..m)
                .find(|&i| (t + 1..n).any(|j| !s.get(i, j).is_multiple_of(&pivot)));
            if let Some(i) = offender {
                let one = BigInt::one();
                s.add_row(t, i, &one);
                p.add_row(t, i, &one);
                p_inv.add_col(i, t, &-one);
                continue;
            }
            if s.get(t, t).is_negative() {
                s.negate_row(t);
                p.negate_row(t);
                p_inv.negate_col(t);
            }
            break;
        }
    }
    Smith { u: p_inv, s, v: q_inv, u_inv: p, v_inv: q }
}

/// Row-style Hermite normal form: rows in echelon form, positive pivots, and
/// entries above each pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hermite_rows(a: &IntMatrix) -> IntMatrix {
    let mut h = a.clone();
    let (m, n) = (h.rows, h.cols);
    let mut r = 0usize;
    let mut pivots = Vec::new();
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let Some(best) = (r..m)
                .filter(|&i| !h.get(i, c).is_zero())
                .min_by(|&x, &y| h.get(x, c).abs().cmp(&h.get(y, c).abs()))
            else {
                break;
            };
            h.swap_rows(r, best);
            let pivot = h.get(r, c).clone();
            let mut clean = true;
            for i in r + 1..m {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let k = -round_div(h.get(i, c), &pivot);
                h.add_row(i, r, &k);
                clean &= h.get(i, c).is_zero();
            }
            if clean {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
        }
        let pivot = h.get(r, c).clone();
        for i in 0..r {
            let k = -h.get(i, c).div_floor(&pivot);
            h.add_row(i, r, &k);
        }
        pivots.push(c);
        r += 1;
    }
    IntMatrix { rows: r, cols: n, data: h.data[..r * n].to_vec() }
}

/// Primitive basis, in Hermite form, of the rational span of the rows of
/// `b` intersected with the integer lattice.
pub fn saturate_rows(b: &IntMatrix) -> IntMatrix {
    let sm = smith_normal_form(b);
    let r = sm.rank();
    let basis = IntMatrix::from_fn(r, b.cols, |i, j| sm.v.get(i, j).clone());
    hermite_rows(&basis)
}

/// Integer basis of `{v ∈ Zⁿ : A·v = 0}`, returned as the rows of a matrix in
/// Hermite normal form. The basis is primitive: it spans every integer
/// solution, not just a finite-index sublattice.
pub fn integer_nullspace(a: &IntMatrix) -> IntMatrix {
    let n = a.cols;
    // column reduction of A tracked by a unimodular Q: A·Q = [H | 0]
    let mut h = a.clone();
    let mut q = IntMatrix::identity(n);
    let mut c = 0usize;
    for r in 0..h.rows {
        if c == n {
            break;
        }
        loop {
            let Some(best) = (c..n)
                .filter(|&j| !h.get(r, j).is_zero())
                .min_by(|&x, &y| h.get(r, x).abs().cmp(&h.get(r, y).abs()))
            else {
                break;
            };
            h.swap_cols(c, best);
            q.swap_cols(c, best);
            let pivot = h.get(r, c).clone();
            let mut clean = true;
            for j in c + 1..n {
                if h.get(r, j).is_zero() {
                    continue;
                }
                let k = -round_div(h.get(r, j), &pivot);
                h.add_col(j, c, &k);
                q.add_col(j, c, &k);
                clean &= h.get(r, j).is_zero();
            }
            if clean {
                break;
            }
        }
        if !h.get(r, c).is_zero() {
            c += 1;
        }
    }
    let basis = IntMatrix::from_fn(n - c, n, |i, j| q.get(j, c + i).clone());
    hermite_rows(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize, bound: i64) -> IntMatrix {
        IntMatrix::from_fn(r, c, |_, _| BigInt::from(rng.gen_range(-bound..=bound)))
    }

    fn check_smith(a: &IntMatrix) {
        let sm = smith_normal_form(a);
        assert_eq!(sm.u.mul(&sm.s).mul(&sm.v), *a);
        assert_eq!(sm.u_inv.mul(a).mul(&sm.v_inv), sm.s);
        assert!(sm.u.determinant().abs().is_one());
        assert!(sm.v.determinant().abs().is_one());
        for i in 0..sm.s.rows() {
            for j in 0..sm.s.cols() {
                if i != j {
                    assert!(sm.s.get(i, j).is_zero());
                }
            }
        }
        let f = sm.invariant_factors();
        for w in f.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        for d in &f {
            assert!(d.is_positive());
        }
    }

    #[test]
    fn smith_identity() {
        let id = IntMatrix::identity(4);
        let sm = smith_normal_form(&id);
        assert_eq!(sm.s, id);
        assert_eq!(sm.u, id);
        assert_eq!(sm.v, id);
    }

    #[test]
    fn smith_gcd_lcm() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let sm = smith_normal_form(&a);
        assert_eq!(sm.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
        check_smith(&a);
    }

    #[test]
    fn smith_random_reassembles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            check_smith(&random_matrix(&mut rng, 6, 6, 9));
        }
        for (r, c) in [(3, 7), (7, 3), (1, 5), (5, 1), (4, 4)] {
            check_smith(&random_matrix(&mut rng, r, c, 9));
        }
        // rank-deficient
        let b = random_matrix(&mut rng, 5, 2, 5);
        let c = random_matrix(&mut rng, 2, 5, 5);
        let a = b.mul(&c);
        check_smith(&a);
        assert!(smith_normal_form(&a).rank() <= 2);
    }

    /// Kernel over Q by plain rational row reduction.
    fn rational_kernel_dim(a: &IntMatrix) -> usize {
        let (m, n) = (a.rows(), a.cols());
        let mut rows: Vec<Vec<BigRational>> = (0..m)
            .map(|i| a.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        let mut rank = 0;
        for c in 0..n {
            let Some(p) = (rank..m).find(|&i| !rows[i][c].is_zero()) else { continue };
            rows.swap(rank, p);
            let pivot = rows[rank][c].clone();
            for i in 0..m {
                if i != rank && !rows[i][c].is_zero() {
                    let f = &rows[i][c] / &pivot;
                    for j in 0..n {
                        let d = &f * &rows[rank][j];
                        rows[i][j] -= d;
                    }
                }
            }
            rank += 1;
        }
        n - rank
    }

    #[test]
    fn nullspace_of_zero_is_standard_basis() {
        let k = integer_nullspace(&IntMatrix::zeros(2, 3));
        assert_eq!(k, IntMatrix::identity(3));
    }

    #[test]
    fn nullspace_single_row() {
        let k = integer_nullspace(&IntMatrix::from_rows(&[vec![1, 1]]));
        assert_eq!(k, IntMatrix::from_rows(&[vec![1, -1]]));
    }

    #[test]
    fn nullspace_is_saturated() {
        // 2x = 0 mod nothing: kernel of [2, 4] is spanned by (2, -1), not (4, -2)
        let k = integer_nullspace(&IntMatrix::from_rows(&[vec![2, 4]]));
        assert_eq!(k, IntMatrix::from_rows(&[vec![2, -1]]));
    }

    #[test]
    fn nullspace_random_against_rational_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..30 {
            let r = rng.gen_range(1..6);
            let c = rng.gen_range(2..8);
            let inner = rng.gen_range(1..=r.min(c));
            let a = random_matrix(&mut rng, r, inner, 4).mul(&random_matrix(&mut rng, inner, c, 4));
            let k = integer_nullspace(&a);
            assert_eq!(k.rows(), rational_kernel_dim(&a), "trial {trial}");
            for i in 0..k.rows() {
                assert!(a.mul_vec(k.row(i)).iter().all(Zero::is_zero));
            }
            if k.rows() > 0 {
                // primitive: all invariant factors of the basis are 1
                let f = smith_normal_form(&k).invariant_factors();
                assert_eq!(f.len(), k.rows());
                assert!(f.iter().all(One::is_one));
                assert_eq!(hermite_rows(&k), k);
            }
        }
    }

    #[test]
    fn saturation() {
        let b = IntMatrix::from_rows(&[vec![2, 4, 6], vec![4, 8, 12], vec![0, 0, 3]]);
        assert_eq!(saturate_rows(&b), IntMatrix::from_rows(&[vec![1, 2, 0], vec![0, 0, 1]]));
    }

    #[test]
    fn determinant_small() {
        let a = IntMatrix::from_rows(&[vec![0, 2, 1], vec![1, 0, 0], vec![3, 1, 4]]);
        assert_eq!(a.determinant(), BigInt::from(-7));
    }
}
