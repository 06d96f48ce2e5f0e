//! Characteristic polynomials of complex matrices, simultaneous root finding
//! and spectral radii.
//!
//! Coefficient vectors are in ascending order: `p[i]` multiplies `λ^i`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest matrix dimension accepted by [`char_poly`] and [`spectral_radius`].
pub const MAX_DIM: usize = 64;

const ABERTH_MAX_ITER: usize = 1000;
const RESIDUAL_TOL: f64 = 1e-8;
const CLUSTER_TOL: f64 = 1e-4;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), dim * dim);
        CMatrix { dim, data }
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0))).collect();
        CMatrix::new(dim, data)
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        CMatrix { dim, data }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        let n = self.dim;
        assert_eq!(n, other.dim);
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        CMatrix { dim: n, data }
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Neumaier-compensated complex sum.
fn compensated_sum(values: impl Iterator<Item = Complex64>) -> Complex64 {
    let (mut sum_re, mut c_re, mut sum_im, mut c_im) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for v in values {
        for (sum, c, x) in [(&mut sum_re, &mut c_re, v.re), (&mut sum_im, &mut c_im, v.im)] {
            let t = *sum + x;
            if sum.abs() >= x.abs() {
                *c += (*sum - t) + x;
            } else {
                *c += (x - t) + *sum;
            }
            *sum = t;
        }
    }
    Complex64::new(sum_re + c_re, sum_im + c_im)
}

/// `det(λI − A)` by Faddeev–LeVerrier with compensated traces.
pub fn char_poly(a: &CMatrix) -> Result<Vec<Complex64>> {
    let n = a.dim;
    if n > MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: n, limit: MAX_DIM });
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut coeffs = vec![zero; n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut m = CMatrix { dim: n, data: vec![zero; n * n] };
    for k in 1..=n {
        let mut next = a.mul(&m);
        for i in 0..n {
            next.data[i * n + i] += coeffs[n - k + 1];
        }
        let am = a.mul(&next);
        let tr = compensated_sum((0..n).map(|i| am.data[i * n + i]));
        coeffs[n - k] = -tr / k as f64;
        m = next;
    }
    Ok(coeffs)
}

pub fn eval_poly(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn eval_with_derivative(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut val = zero;
    let mut der = zero;
    for &c in p.iter().rev() {
        der = der * z + val;
        val = val * z + c;
    }
    (val, der)
}

/// `Σ |p_i| |z|^i`, the scale against which residuals are measured.
fn residual_scale(p: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    p.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

fn trim(p: &[Complex64]) -> &[Complex64] {
    let mut n = p.len();
    while n > 0 && p[n - 1] == Complex64::new(0.0, 0.0) {
        n -= 1;
    }
    &p[..n]
}

/// All complex roots by Aberth–Ehrlich iteration.
///
/// Each returned root satisfies `|p(r)| ≤ 1e-8 · Σ|p_i||r|^i`.
pub fn roots(p: &[Complex64]) -> Result<Vec<Complex64>> {
    let p = trim(p);
    if p.len() <= 1 {
        return Ok(Vec::new());
    }
    // zero roots factor out exactly
    let zeros = p.iter().take_while(|c| c.norm() == 0.0).count();
    let p = &p[zeros..];
    let deg = p.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    if deg == 0 {
        return Ok(out);
    }
    let lead = p[deg];
    let monic: Vec<Complex64> = p.iter().map(|c| c / lead).collect();

    // start on a circle of the Fujiwara-type radius
    let radius = (0..deg)
        .map(|i| monic[i].norm().powf(1.0 / (deg - i) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    let mut converged = vec![false; deg];
    for _ in 0..ABERTH_MAX_ITER {
        let mut all = true;
        for k in 0..deg {
            if converged[k] {
                continue;
            }
            let (val, der) = eval_with_derivative(&monic, z[k]);
            if val.norm() <= f64::EPSILON * residual_scale(&monic, z[k]) {
                converged[k] = true;
                continue;
            }
            let ratio = val / der;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { d.inv() }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() == 0.0 || !denom.is_finite() { ratio } else { ratio / denom };
            if !step.is_finite() {
                continue;
            }
            z[k] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[k].norm().max(1e-300) {
                converged[k] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    for &r in &z {
        let res = eval_poly(&monic, r).norm();
        if !(res <= RESIDUAL_TOL * residual_scale(&monic, r)) {
            return Err(Error::NoConvergence(ABERTH_MAX_ITER));
        }
    }
    out.extend(z);
    Ok(out)
}

/// Groups roots closer than `CLUSTER_TOL` (relative) and replaces each group
/// by its centroid. A k-fold root perturbs into a k-cycle around the true
/// value whose mean is far better conditioned than any single member.
pub fn cluster_roots(rs: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut assigned = vec![false; rs.len()];
    let mut out = Vec::new();
    for i in 0..rs.len() {
        if assigned[i] {
            continue;
        }
        let mut members = vec![i];
        assigned[i] = true;
        let mut k = 0;
        while k < members.len() {
            let c = rs[members[k]];
            for j in 0..rs.len() {
                if !assigned[j] && (rs[j] - c).norm() <= CLUSTER_TOL * c.norm().max(1.0) {
                    assigned[j] = true;
                    members.push(j);
                }
            }
            k += 1;
        }
        let centroid = members.iter().map(|&m| rs[m]).sum::<Complex64>() / members.len() as f64;
        out.push((centroid, members.len()));
    }
    out
}

fn newton_polish(p: &[Complex64], mut z: Complex64) -> Complex64 {
    for _ in 0..8 {
        let (v, d) = eval_with_derivative(p, z);
        if d.norm() == 0.0 {
            break;
        }
        let step = v / d;
        let next = z - step;
        if !next.is_finite() || eval_poly(p, next).norm() > v.norm() {
            break;
        }
        z = next;
        if step.norm() <= f64::EPSILON * z.norm() {
            break;
        }
    }
    z
}

fn derivative(p: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut d = p.to_vec();
    for _ in 0..order {
        if d.len() <= 1 {
            return vec![Complex64::new(0.0, 0.0)];
        }
        d = d.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect();
    }
    d
}

/// Largest eigenvalue modulus through the characteristic polynomial.
pub fn spectral_radius(a: &CMatrix) -> Result<f64> {
    let p = char_poly(a)?;
    spectral_radius_of_poly(&p)
}

/// Distinct roots with multiplicities, each refined by Newton's method on
/// the derivative that makes it simple.
pub fn distinct_roots(p: &[Complex64]) -> Result<Vec<(Complex64, usize)>> {
    let rs = roots(p)?;
    Ok(cluster_roots(&rs)
        .into_iter()
        .map(|(c, mult)| (newton_polish(&derivative(p, mult - 1), c), mult))
        .collect())
}

/// Largest root modulus of a polynomial.
pub fn spectral_radius_of_poly(p: &[Complex64]) -> Result<f64> {
    Ok(distinct_roots(p)?.iter().map(|(r, _)| r.norm()).fold(0.0, f64::max))
}

/// Largest real root of an integer polynomial given in ascending order,
/// located from the complex roots then refined by bisection and Newton.
pub fn dilatation_root(coeffs: &[i64]) -> Result<f64> {
    let p: Vec<f64> = coeffs.iter().map(|&c| c as f64).collect();
    let mut n = p.len();
    while n > 0 && p[n - 1] == 0.0 {
        n -= 1;
    }
    if n == 0 {
        return Err(Error::InvalidArgument("zero polynomial".into()));
    }
    let p = &p[..n];
    let eval = |x: f64| p.iter().rev().fold(0.0, |acc, &c| acc * x + c);
    let deriv = |x: f64| {
        p.iter().enumerate().skip(1).rev().fold(0.0, |acc, (i, &c)| acc * x + c * i as f64)
    };
    // every real root lies below the Cauchy bound
    let lead = p[n - 1];
    let bound = 1.0 + p[..n - 1].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);

    let cp: Vec<Complex64> = p.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let rs = roots(&cp)?;
    let mut candidates: Vec<f64> = rs
        .iter()
        .filter(|r| r.im.abs() <= 1e-6 * r.norm().max(1.0) && r.re > 0.0)
        .map(|r| r.re)
        .collect();
    candidates.sort_by(|a, b| b.partial_cmp(a).unwrap());

    for c in candidates {
        // widen until the sign changes, then bisect
        let mut h = 1e-6 * c.max(1.0);
        let (mut lo, mut hi) = (c - h, c + h);
        while eval(lo).signum() == eval(hi).signum() && h < bound {
            h *= 2.0;
            lo = (c - h).max(0.0);
            hi = (c + h).min(bound);
        }
        if eval(lo).signum() == eval(hi).signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if eval(mid) == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if eval(mid).signum() == eval(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi.abs().max(1.0) {
                break;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..4 {
            let d = deriv(x);
            if d == 0.0 {
                break;
            }
            let next = x - eval(x) / d;
            if next.is_finite() && eval(next).abs() <= eval(x).abs() {
                x = next;
            } else {
                break;
            }
        }
        if x > 0.0 {
            return Ok(x);
        }
    }
    Err(Error::NoPositiveRoot)
}
