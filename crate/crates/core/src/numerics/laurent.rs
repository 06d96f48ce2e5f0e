//! Laurent polynomials in `q` and `t` with integer coefficients, and square
//! matrices over them.
//!
//! One-variable polynomials are the ones that never use `q`. Exponents are
//! stored as `(q, t)` pairs; terms with a zero coefficient are never kept.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Exponent = (i32, i32);

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Exponent, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(1, 0, 0)
    }

    pub fn constant(c: i64) -> Self {
        LaurentPoly::monomial(c, 0, 0)
    }

    /// `c·q^eq·t^et`
    pub fn monomial(c: impl Into<BigInt>, eq: i32, et: i32) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((eq, et), c);
        }
        LaurentPoly { terms }
    }

    pub fn t() -> Self {
        LaurentPoly::monomial(1, 0, 1)
    }

    pub fn q() -> Self {
        LaurentPoly::monomial(1, 1, 0)
    }

    /// `Σ coeffs[i]·t^(low+i)`
    pub fn from_t_coeffs(low: i32, coeffs: &[i64]) -> Self {
        let mut p = LaurentPoly::zero();
        for (i, &c) in coeffs.iter().enumerate() {
            p.add_term((0, low + i as i32), BigInt::from(c));
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, eq: i32, et: i32) -> BigInt {
        self.terms.get(&(eq, et)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// 1 when `q` never occurs, otherwise 2.
    pub fn variable_count(&self) -> usize {
        if self.terms.keys().any(|&(eq, _)| eq != 0) { 2 } else { 1 }
    }

    pub fn add_term(&mut self, e: Exponent, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(&e, c)| (e, c * k)).collect() }
    }

    /// Multiplication by the monomial `q^eq·t^et`.
    pub fn shift(&self, eq: i32, et: i32) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(&(a, b), c)| ((a + eq, b + et), c.clone())).collect() }
    }

    /// Exact division by an integer; `None` if some coefficient is not
    /// divisible.
    pub fn div_exact_int(&self, k: &BigInt) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (&e, c) in &self.terms {
            let (quo, rem) = c.div_rem(k);
            if !rem.is_zero() {
                return None;
            }
            terms.insert(e, quo);
        }
        Some(LaurentPoly { terms })
    }

    /// `Some((±1, eq, et))` when the polynomial is a unit `±q^eq·t^et`.
    pub fn as_unit(&self) -> Option<(i64, i32, i32)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&(eq, et), c) = self.terms.iter().next()?;
        if c.abs().is_one() {
            Some((c.signum().to_i64()?, eq, et))
        } else {
            None
        }
    }

    pub fn inverse_unit(&self) -> Option<Self> {
        let (s, eq, et) = self.as_unit()?;
        Some(LaurentPoly::monomial(s, -eq, -et))
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(LaurentPoly::one(), |acc, _| &acc * self)
    }

    /// Sum of coefficients, the value at `q = t = 1`.
    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn eval(&self, q: Complex64, t: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(eq, et), c) in &self.terms {
            let c = c.to_f64().unwrap_or(f64::NAN);
            acc += q.powi(eq) * t.powi(et) * c;
        }
        acc
    }

    /// Smallest and largest `t` exponents.
    pub fn t_degree_range(&self) -> Option<(i32, i32)> {
        let mut it = self.terms.keys().map(|&(_, et)| et);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect() }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(eq, et), c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mut factors = Vec::new();
            for (name, e) in [("q", eq), ("t", et)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

/// Square matrix over `Z[q^±1, t^±1]`, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentMatrix {
    dim: usize,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zeros(dim: usize) -> Self {
        LaurentMatrix { dim, entries: vec![LaurentPoly::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = LaurentMatrix::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = LaurentPoly::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> LaurentPoly) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        LaurentMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: LaurentPoly) {
        self.entries[i * self.dim + j] = p;
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut LaurentPoly {
        &mut self.entries[i * self.dim + j]
    }

    pub fn variable_count(&self) -> usize {
        self.entries.iter().map(LaurentPoly::variable_count).max().unwrap_or(1)
    }

    pub fn is_identity(&self) -> bool {
        *self == LaurentMatrix::identity(self.dim)
    }

    pub fn mul(&self, other: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = LaurentMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let prod = a * b;
                        let slot = out.entry_mut(i, j);
                        *slot = &*slot + &prod;
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> LaurentPoly {
        (0..self.dim).fold(LaurentPoly::zero(), |acc, i| &acc + self.get(i, i))
    }

    fn add_scalar_identity(&mut self, c: &LaurentPoly) {
        for i in 0..self.dim {
            let slot = self.entry_mut(i, i);
            *slot = &*slot + c;
        }
    }

    fn scaled(&self, c: &LaurentPoly) -> LaurentMatrix {
        LaurentMatrix { dim: self.dim, entries: self.entries.iter().map(|e| e * c).collect() }
    }

    /// Exact characteristic polynomial `det(λI − M)` by Faddeev–LeVerrier,
    /// as coefficients of `λ⁰ … λⁿ`. The integer divisions are exact.
    pub fn char_poly(&self) -> Vec<LaurentPoly> {
        self.faddeev_leverrier().0
    }

    fn faddeev_leverrier(&self) -> (Vec<LaurentPoly>, LaurentMatrix) {
        let n = self.dim;
        let mut coeffs = vec![LaurentPoly::zero(); n + 1];
        coeffs[n] = LaurentPoly::one();
        // m holds M_k; adj accumulates M_n for the inverse
        let mut m = LaurentMatrix::zeros(n);
        let mut last = LaurentMatrix::identity(n);
        for k in 1..=n {
            let mut next = self.mul(&m);
            next.add_scalar_identity(&coeffs[n - k + 1]);
            let tr = self.mul(&next).trace();
            coeffs[n - k] = (-&tr)
                .div_exact_int(&BigInt::from(k as i64))
                .expect("Faddeev-LeVerrier division is exact over Z");
            last = next.clone();
            m = next;
        }
        (coeffs, last)
    }

    /// Exact inverse when the determinant is a unit `±q^a t^b`.
    pub fn inverse(&self) -> Result<LaurentMatrix> {
        let n = self.dim;
        let (coeffs, mn) = self.faddeev_leverrier();
        // M·M_n + c_0 I = 0  ⇒  M⁻¹ = −M_n / c_0
        let c0 = &coeffs[0];
        let unit_inv = c0.inverse_unit().ok_or_else(|| {
            Error::NotInvertible(format!("determinant {} is not a unit", if n % 2 == 0 { c0.clone() } else { -c0 }))
        })?;
        Ok(mn.scaled(&-&unit_inv))
    }

    /// Entrywise evaluation.
    pub fn eval(&self, q: Complex64, t: Complex64) -> Vec<Complex64> {
        self.entries.iter().map(|p| p.eval(q, t)).collect()
    }
}

impl fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly_strategy() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec(((-3i32..=3), (-3i32..=3), (-5i64..=5)), 0..6).prop_map(|ts| {
            let mut p = LaurentPoly::zero();
            for (a, b, c) in ts {
                p.add_term((a, b), BigInt::from(c));
            }
            p
        })
    }

    #[test]
    fn unit_cancels() {
        let t = LaurentPoly::t();
        let tinv = LaurentPoly::monomial(1, 0, -1);
        assert_eq!(&t * &tinv, LaurentPoly::one());
        assert_eq!(t.inverse_unit().unwrap(), tinv);
        assert!(LaurentPoly::constant(2).as_unit().is_none());
    }

    #[test]
    fn no_zero_terms_stored() {
        let p = &LaurentPoly::t() - &LaurentPoly::t();
        assert!(p.is_zero());
        assert_eq!(p.terms().count(), 0);
    }

    #[test]
    fn display_format() {
        let p = LaurentPoly::from_t_coeffs(-1, &[1, -1, 0, 2]);
        assert_eq!(p.to_string(), "2*t^2 - 1 + t^-1");
    }

    #[test]
    fn char_poly_and_inverse_of_burau_generator() {
        // reduced Burau style 2x2 block [[-t, 1], [0, 1]]
        let t = LaurentPoly::t();
        let m = LaurentMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => -&t,
            (0, 1) => LaurentPoly::one(),
            (1, 1) => LaurentPoly::one(),
            _ => LaurentPoly::zero(),
        });
        let cp = m.char_poly();
        // (λ + t)(λ − 1) = λ² + (t − 1)λ − t
        assert_eq!(cp[2], LaurentPoly::one());
        assert_eq!(cp[1], LaurentPoly::from_t_coeffs(0, &[-1, 1]));
        assert_eq!(cp[0], LaurentPoly::from_t_coeffs(1, &[-1]));
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
    }

    #[test]
    fn non_unit_determinant_rejected() {
        let m = LaurentMatrix::from_fn(1, |_, _| LaurentPoly::constant(2));
        assert!(m.inverse().is_err());
    }

    proptest! {
        #[test]
        fn ring_axioms(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn evaluation_is_ring_homomorphism(a in poly_strategy(), b in poly_strategy(), x in 0.0..6.3f64, y in 0.0..6.3f64) {
            let q = Complex64::from_polar(1.0, x);
            let t = Complex64::from_polar(1.0, y);
            let lhs = (&a * &b).eval(q, t);
            let rhs = a.eval(q, t) * b.eval(q, t);
            prop_assert!((lhs - rhs).norm() < 1e-9);
        }
    }
}
