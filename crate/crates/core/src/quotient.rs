//! Finite quotients of free and surface groups, held as permutation groups in
//! their regular representation.
//!
//! Points are identified with group elements: point `j` is the element `g`
//! with `0·g = j`, and the right action of a word on points is the right
//! multiplication of elements. The kernel of the quotient map is therefore the
//! stabiliser of point `0`.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::endo::EndoMap;
use crate::error::{Error, Result};
use crate::homology::CoverHomology;
use crate::perm::Perm;
use crate::word::{Letter, Presentation, Word};

pub const DEFAULT_MAX_ORDER: usize = 20000;

/// Orders up to this size keep a full multiplication table.
const TABLE_LIMIT: usize = 2048;

/// Record of how a two-level tower quotient sits over its parent. Points are
/// encoded as `j + k·v` with `j` a parent point and `k` the parent order, so
/// the projection to the parent is `point % k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerInfo {
    pub parent: String,
    pub parent_order: usize,
    pub prime: u32,
    pub kernel_rank: usize,
}

#[derive(Clone, Debug)]
pub struct FiniteQuotient {
    name: String,
    presentation: Presentation,
    gens: Vec<Perm>,
    gen_inverses: Vec<Perm>,
    /// BFS tree: `parent[j] = (p, l)` with `p·l = j`.
    parent: Vec<Option<(usize, Letter)>>,
    order_bfs: Vec<usize>,
    words: Vec<Word>,
    table: Option<Vec<u32>>,
    tower: Option<TowerInfo>,
}

impl FiniteQuotient {
    /// Closes the generator images, checks the action is regular, and for the
    /// surface kind that the relator acts trivially.
    pub fn from_images(
        name: &str,
        presentation: Presentation,
        images: Vec<Perm>,
        max_order: usize,
    ) -> Result<Self> {
        let d = presentation.rank();
        if images.len() != d {
            return Err(Error::RankMismatch { expected: d, found: images.len() });
        }
        let k = images.first().map_or(1, Perm::degree);
        if k == 0 {
            return Err(Error::InvalidQuotient("empty point set".into()));
        }
        if images.iter().any(|p| p.degree() != k) {
            return Err(Error::InvalidQuotient("generator images act on different point sets".into()));
        }
        if k > max_order {
            return Err(Error::OrderOverflow { order: k as u128, max: max_order });
        }
        let gen_inverses: Vec<Perm> = images.iter().map(Perm::inverse).collect();
        let mut q = FiniteQuotient {
            name: name.to_string(),
            presentation,
            gens: images,
            gen_inverses,
            parent: vec![None; k],
            order_bfs: Vec::with_capacity(k),
            words: Vec::new(),
            table: None,
            tower: None,
        };
        q.build_tree()?;
        q.check_regular()?;
        if q.presentation.is_surface() && q.point_after(0, q.presentation.relator()) != 0 {
            return Err(Error::RelatorNotKilled);
        }
        if k <= TABLE_LIMIT {
            let mut table = vec![0u32; k * k];
            for i in 0..k {
                for j in 0..k {
                    table[i * k + j] = q.point_after(i, &q.words[j]) as u32;
                }
            }
            q.table = Some(table);
        }
        Ok(q)
    }

    fn build_tree(&mut self) -> Result<()> {
        let k = self.order();
        let d = self.rank();
        let mut seen = vec![false; k];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(p) = queue.pop_front() {
            self.order_bfs.push(p);
            for x in 1..=d as Letter {
                for l in [x, -x] {
                    let c = self.act(p, l);
                    if !seen[c] {
                        seen[c] = true;
                        self.parent[c] = Some((p, l));
                        queue.push_back(c);
                    }
                }
            }
        }
        if self.order_bfs.len() != k {
            return Err(Error::NotRegular(format!(
                "action is not transitive: orbit of 0 has {} of {k} points",
                self.order_bfs.len()
            )));
        }
        let mut words = vec![Word::identity(d); k];
        for &p in &self.order_bfs[1..] {
            let (par, l) = self.parent[p].unwrap();
            let mut letters = words[par].letters().to_vec();
            letters.push(l);
            words[p] = Word::new(d, &letters)?;
        }
        self.words = words;
        Ok(())
    }

    /// A transitive group whose centraliser is also transitive acts regularly.
    /// For each generator `x` the map `0·w ↦ 0·x·w` is built along the tree;
    /// it is well defined exactly when it commutes with every generator.
    fn check_regular(&self) -> Result<()> {
        let k = self.order();
        let d = self.rank();
        for x in 1..=d as Letter {
            let mut f = vec![usize::MAX; k];
            f[0] = self.act(0, x);
            for &p in &self.order_bfs[1..] {
                let (par, l) = self.parent[p].unwrap();
                f[p] = self.act(f[par], l);
            }
            for p in 0..k {
                for y in 1..=d as Letter {
                    if f[self.act(p, y)] != self.act(f[p], y) {
                        return Err(Error::NotRegular(format!(
                            "point stabiliser is nontrivial (detected at point {p})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rename(&mut self, name: &str) {
        self.name = name.to_string();
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn rank(&self) -> usize {
        self.presentation.rank()
    }

    pub fn order(&self) -> usize {
        self.parent.len()
    }

    pub fn gen_images(&self) -> &[Perm] {
        &self.gens
    }

    pub fn tower(&self) -> Option<&TowerInfo> {
        self.tower.as_ref()
    }

    /// Image of point `p` under a single letter.
    #[inline]
    pub fn act(&self, p: usize, l: Letter) -> usize {
        if l > 0 {
            self.gens[l as usize - 1].apply(p)
        } else {
            self.gen_inverses[(-l) as usize - 1].apply(p)
        }
    }

    pub fn point_after(&self, p: usize, w: &Word) -> usize {
        w.letters().iter().fold(p, |p, &l| self.act(p, l))
    }

    /// The element a word maps to.
    pub fn element_of(&self, w: &Word) -> Result<usize> {
        if w.rank() != self.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), found: w.rank() });
        }
        Ok(self.point_after(0, w))
    }

    /// BFS transversal word of element `j`; the empty word for the identity.
    pub fn element_word(&self, j: usize) -> &Word {
        &self.words[j]
    }

    pub fn element_words(&self) -> &[Word] {
        &self.words
    }

    /// Tree edge into `j`: `(p, l)` with `p·l = j`.
    pub fn tree_parent(&self, j: usize) -> Option<(usize, Letter)> {
        self.parent[j]
    }

    pub fn bfs_order(&self) -> &[usize] {
        &self.order_bfs
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        match &self.table {
            Some(t) => t[i * self.order() + j] as usize,
            None => self.point_after(i, &self.words[j]),
        }
    }

    pub fn inv(&self, j: usize) -> usize {
        self.point_after(0, &self.words[j].inverse())
    }

    /// Element of the `i`-th generator (1-based).
    pub fn generator_element(&self, i: usize) -> usize {
        self.gens[i - 1].apply(0)
    }

    pub fn element_order(&self, j: usize) -> usize {
        let mut x = j;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, j);
            n += 1;
        }
        n
    }

    /// Permutation of points given by right multiplication with element `j`.
    pub fn element_perm(&self, j: usize) -> Perm {
        Perm::from_images((0..self.order()).map(|i| self.mul(i, j) as u32).collect())
            .expect("right multiplication is a bijection")
    }

    pub fn is_abelian(&self) -> bool {
        let gs: Vec<usize> = (1..=self.rank()).map(|i| self.generator_element(i)).collect();
        gs.iter().all(|&x| gs.iter().all(|&y| self.mul(x, y) == self.mul(y, x)))
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn in_kernel(&self, w: &Word) -> bool {
        self.point_after(0, w) == 0
    }

    /// Images in Γ of `f(x_i)`, i.e. the homomorphism `F → Γ` given by
    /// `π ∘ f` on generators.
    pub fn hom_images(&self, f: &EndoMap) -> Result<Vec<usize>> {
        f.images().iter().map(|w| self.element_of(w)).collect()
    }

    /// Evaluates the homomorphism `F → Γ` with the given generator images.
    pub fn eval_hom(&self, gen_images: &[usize], w: &Word) -> usize {
        let inv: Vec<usize> = gen_images.iter().map(|&g| self.inv(g)).collect();
        w.letters().iter().fold(0, |acc, &l| {
            let i = l.unsigned_abs() as usize - 1;
            self.mul(acc, if l > 0 { gen_images[i] } else { inv[i] })
        })
    }

    /// Whether `f` sends the kernel into itself: every Schreier generator of
    /// the kernel must map to the identity. Returns the first violating
    /// Schreier generator otherwise.
    pub fn kernel_violation(&self, f: &EndoMap) -> Result<Option<(usize, usize, Word)>> {
        if f.rank() != self.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), found: f.rank() });
        }
        let images = self.hom_images(f)?;
        let inv: Vec<usize> = images.iter().map(|&g| self.inv(g)).collect();
        let letter_image = |l: Letter| {
            let i = l.unsigned_abs() as usize - 1;
            if l > 0 { images[i] } else { inv[i] }
        };
        // image of each transversal word under π∘f
        let mut t_img = vec![0usize; self.order()];
        for &p in &self.order_bfs[1..] {
            let (par, l) = self.parent[p].unwrap();
            t_img[p] = self.mul(t_img[par], letter_image(l));
        }
        let mut index = 0;
        for u in 0..self.order() {
            for x in 1..=self.rank() as Letter {
                let v = self.act(u, x);
                if self.is_tree_edge(u, x) {
                    continue;
                }
                let e = self.mul(self.mul(t_img[u], letter_image(x)), self.inv(t_img[v]));
                if e != 0 {
                    let w = self.words[u]
                        .concat(&Word::generator(self.rank(), x).unwrap())
                        .concat(&self.words[v].inverse());
                    return Ok(Some((index, e, w)));
                }
                index += 1;
            }
        }
        Ok(None)
    }

    /// Whether the edge `u --x--> u·x` (`x > 0`) belongs to the BFS tree.
    pub fn is_tree_edge(&self, u: usize, x: Letter) -> bool {
        let v = self.act(u, x);
        self.parent[v] == Some((u, x)) || self.parent[u] == Some((v, -x))
    }

    /// The automorphism of Γ induced by a kernel-preserving `f`, as an
    /// element permutation; `None` when `f` does not preserve the kernel.
    pub fn induced_map(&self, f: &EndoMap) -> Result<Option<Vec<usize>>> {
        if self.kernel_violation(f)?.is_some() {
            return Ok(None);
        }
        let images = self.hom_images(f)?;
        let inv: Vec<usize> = images.iter().map(|&g| self.inv(g)).collect();
        let mut out = vec![0usize; self.order()];
        for &p in &self.order_bfs[1..] {
            let (par, l) = self.parent[p].unwrap();
            let i = l.unsigned_abs() as usize - 1;
            out[p] = self.mul(out[par], if l > 0 { images[i] } else { inv[i] });
        }
        Ok(Some(out))
    }

    /// Projects a point of a tower quotient to its parent.
    pub fn project_to_parent(&self, point: usize) -> Option<usize> {
        self.tower.as_ref().map(|t| point % t.parent_order)
    }

    pub fn set_tower(&mut self, info: TowerInfo) {
        self.tower = Some(info);
    }
}

/// Result of [`verify_characteristic`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacteristicCertificate {
    pub characteristic: bool,
    /// `(automorphism index, Schreier generator index, generator word)` of
    /// the first kernel element whose image leaves the kernel.
    pub violation: Option<(usize, usize, Word)>,
}

/// Checks that every supplied automorphism maps each Schreier generator of
/// the kernel back into the kernel. With the Nielsen generators of `Aut(F_d)`
/// this decides whether the kernel is characteristic.
pub fn verify_characteristic(
    q: &FiniteQuotient,
    aut_gens: &[EndoMap],
) -> Result<CharacteristicCertificate> {
    for (ai, f) in aut_gens.iter().enumerate() {
        let mut maps = vec![f.clone()];
        if let Some(inv) = f.inverse() {
            maps.push(inv);
        }
        for g in &maps {
            if let Some((si, _, w)) = q.kernel_violation(g)? {
                return Ok(CharacteristicCertificate {
                    characteristic: false,
                    violation: Some((ai, si, w)),
                });
            }
        }
    }
    Ok(CharacteristicCertificate { characteristic: true, violation: None })
}

/// `F_d → (Z/m)^d`. Element `(v_1, …, v_d)` is the point `Σ v_i m^{i−1}`.
pub fn build_mod_m_abelian(d: usize, m: usize, max_order: usize) -> Result<FiniteQuotient> {
    if d == 0 || m < 2 {
        return Err(Error::InvalidArgument("need d ≥ 1 and m ≥ 2".into()));
    }
    let order = (m as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if order > max_order as u128 {
        return Err(Error::OrderOverflow { order, max: max_order });
    }
    let k = order as usize;
    let images = (0..d)
        .map(|i| {
            let step = m.pow(i as u32);
            let imgs = (0..k)
                .map(|p| {
                    let digit = (p / step) % m;
                    let next = if digit + 1 == m { p - digit * step } else { p + step };
                    next as u32
                })
                .collect();
            Perm::from_images(imgs).unwrap()
        })
        .collect();
    let name = format!("Z{m}^{d}");
    FiniteQuotient::from_images(&name, Presentation::free(d)?, images, max_order)
}

/// The Heisenberg group of unitriangular 3×3 matrices over `Z/p`, with
/// elements `(x, y, z)` and product `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`.
/// Generators `(1,0,0)` and `(0,1,0)`; for rank 3 the third generator is the
/// central `(0,0,1)`.
pub fn build_heisenberg(d: usize, p: usize, max_order: usize) -> Result<FiniteQuotient> {
    if !(2..=3).contains(&d) || p < 2 {
        return Err(Error::InvalidArgument("Heisenberg quotient needs rank 2 or 3 and p ≥ 2".into()));
    }
    let k = p * p * p;
    if k > max_order {
        return Err(Error::OrderOverflow { order: k as u128, max: max_order });
    }
    let index = |x: usize, y: usize, z: usize| x + p * y + p * p * z;
    let gens: [(usize, usize, usize); 3] = [(1, 0, 0), (0, 1, 0), (0, 0, 1)];
    let images = gens[..d]
        .iter()
        .map(|&(a, b, c)| {
            let mut imgs = vec![0u32; k];
            for z in 0..p {
                for y in 0..p {
                    for x in 0..p {
                        let nz = (z + c + x * b) % p;
                        imgs[index(x, y, z)] = index((x + a) % p, (y + b) % p, nz) as u32;
                    }
                }
            }
            Perm::from_images(imgs).unwrap()
        })
        .collect();
    let name = if d == 2 { format!("Heis{p}") } else { format!("Heis{p}-F{d}") };
    FiniteQuotient::from_images(&name, Presentation::free(d)?, images, max_order)
}

/// The surface group of genus `g` onto `Z/2` with `a₁` acting as the swap
/// and every other generator trivially.
pub fn build_surface_z2(genus: usize) -> Result<FiniteQuotient> {
    let pres = Presentation::surface(genus)?;
    let mut images = vec![Perm::identity(2); 2 * genus];
    images[0] = Perm::from_images(vec![1, 0]).unwrap();
    FiniteQuotient::from_images(&format!("S{genus}-Z2"), pres, images, DEFAULT_MAX_ORDER)
}

/// The quotient of the group by `[K,K]·K^p` for `K` the kernel of `q1`.
///
/// A coset is `c·t_j` with `t_j` a transversal word and `c ∈ K` taken modulo
/// `[K,K]K^p`, i.e. a pair `(j, v)` with `v ∈ H₁(K; Z/p)`. A generator `x`
/// sends `(j, v)` to `(j·x, v + [t_j x t_{j·x}⁻¹])`. The point of `(j, v)` is
/// `j + k·Σ v_i p^i`.
pub fn compose_tower(q1: &Arc<FiniteQuotient>, p: u32, max_order: usize) -> Result<FiniteQuotient> {
    if p < 2 || (2..p).take_while(|i| i * i <= p).any(|i| p % i == 0) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let cover = CoverHomology::from_quotient(Arc::clone(q1))?;
    let k = q1.order();
    let r = cover.rank();
    let order = (p as u128)
        .checked_pow(r as u32)
        .and_then(|x| x.checked_mul(k as u128))
        .unwrap_or(u128::MAX);
    if order > max_order as u128 {
        return Err(Error::OrderOverflow { order, max: max_order });
    }
    let n = order as usize;
    let levels = n / k;
    let pu = p as usize;
    let d = q1.rank();
    let schreier = cover.schreier();
    // H₁ class mod p of each edge (j, x)
    let mut edge_class = vec![vec![0usize; r]; k * d];
    for (idx, &(u, x)) in schreier.generators().iter().enumerate() {
        let mut raw = vec![0i64; schreier.len()];
        raw[idx] = 1;
        let v = cover.project(&raw);
        edge_class[u * d + x as usize - 1] =
            v.iter().map(|c| c.rem_euclid(p as i64) as usize).collect();
    }
    let images = (1..=d as Letter)
        .map(|x| {
            let mut imgs = vec![0u32; n];
            let mut digits = vec![0usize; r];
            for level in 0..levels {
                let mut rest = level;
                for dgt in digits.iter_mut() {
                    *dgt = rest % pu;
                    rest /= pu;
                }
                for j in 0..k {
                    let add = &edge_class[j * d + x as usize - 1];
                    let mut code = 0usize;
                    for i in (0..r).rev() {
                        code = code * pu + (digits[i] + add[i]) % pu;
                    }
                    imgs[j + k * level] = (q1.act(j, x) + k * code) as u32;
                }
            }
            Perm::from_images(imgs).expect("tower generator is a bijection")
        })
        .collect();
    let name = format!("{}/{}", q1.name(), p);
    let mut q = FiniteQuotient::from_images(&name, q1.presentation().clone(), images, max_order)?;
    q.set_tower(TowerInfo {
        parent: q1.name().to_string(),
        parent_order: k,
        prime: p,
        kernel_rank: r,
    });
    Ok(q)
}

/// A conjugacy class with its canonical (smallest) representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugacyClass {
    pub representative: usize,
    pub members: Vec<usize>,
    pub fingerprint: ClassFingerprint,
}

/// Cycle type of the regular permutation (all cycles have the element's
/// order) together with the class size.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClassFingerprint {
    pub cycle_type: Vec<usize>,
    pub size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyClasses {
    pub classes: Vec<ConjugacyClass>,
    /// Class index of every element.
    pub class_of: Vec<usize>,
}

impl ConjugacyClasses {
    pub fn conjugate(&self, g: usize, h: usize) -> bool {
        self.class_of[g] == self.class_of[h]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Orbits of conjugation by the generators, in order of smallest member.
pub fn conjugacy_classes(q: &FiniteQuotient) -> ConjugacyClasses {
    let k = q.order();
    let gens: Vec<(usize, usize)> = (1..=q.rank())
        .map(|i| {
            let g = q.generator_element(i);
            (g, q.inv(g))
        })
        .collect();
    let mut class_of = vec![usize::MAX; k];
    let mut classes = Vec::new();
    for start in 0..k {
        if class_of[start] != usize::MAX {
            continue;
        }
        let id = classes.len();
        class_of[start] = id;
        let mut members = vec![start];
        let mut i = 0;
        while i < members.len() {
            let e = members[i];
            for &(g, gi) in &gens {
                let c = q.mul(q.mul(gi, e), g);
                if class_of[c] == usize::MAX {
                    class_of[c] = id;
                    members.push(c);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        let ord = q.element_order(start);
        let fingerprint =
            ClassFingerprint { cycle_type: vec![ord; k / ord], size: members.len() };
        classes.push(ConjugacyClass { representative: members[0], members, fingerprint });
    }
    ConjugacyClasses { classes, class_of }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[u32]) -> Perm {
        Perm::from_images(v.to_vec()).unwrap()
    }

    #[test]
    fn abelian_orders() {
        let q = build_mod_m_abelian(2, 2, DEFAULT_MAX_ORDER).unwrap();
        assert_eq!(q.order(), 4);
        let (a, b) = (&q.gen_images()[0], &q.gen_images()[1]);
        assert_eq!(a.then(b), b.then(a));
        assert_eq!(a.then(a), Perm::identity(4));
        assert_eq!(build_mod_m_abelian(2, 3, DEFAULT_MAX_ORDER).unwrap().order(), 9);
        let q3 = build_mod_m_abelian(3, 2, DEFAULT_MAX_ORDER).unwrap();
        assert_eq!(q3.order(), 8);
        assert!((1..8).all(|j| q3.element_order(j) == 2));
        assert!(matches!(
            build_mod_m_abelian(5, 10, DEFAULT_MAX_ORDER),
            Err(Error::OrderOverflow { .. })
        ));
    }

    #[test]
    fn from_images_examples() {
        let q = FiniteQuotient::from_images(
            "trivial",
            Presentation::free(2).unwrap(),
            vec![Perm::identity(1), Perm::identity(1)],
            DEFAULT_MAX_ORDER,
        )
        .unwrap();
        assert_eq!(q.order(), 1);
        let s = perm(&[1, 0]);
        let q = FiniteQuotient::from_images(
            "z2",
            Presentation::free(2).unwrap(),
            vec![s.clone(), s],
            DEFAULT_MAX_ORDER,
        )
        .unwrap();
        assert_eq!(q.order(), 2);
        let h = build_heisenberg(2, 2, DEFAULT_MAX_ORDER).unwrap();
        assert_eq!(h.order(), 8);
        assert!(!h.is_abelian());
    }

    #[test]
    fn rejects_non_regular() {
        // S3 on three points is transitive but not regular
        let r = FiniteQuotient::from_images(
            "s3",
            Presentation::free(2).unwrap(),
            vec![perm(&[1, 2, 0]), perm(&[1, 0, 2])],
            DEFAULT_MAX_ORDER,
        );
        assert!(matches!(r, Err(Error::NotRegular(_))));
        let r = FiniteQuotient::from_images(
            "split",
            Presentation::free(1).unwrap(),
            vec![perm(&[1, 0, 2])],
            DEFAULT_MAX_ORDER,
        );
        assert!(matches!(r, Err(Error::NotRegular(_))));
    }

    #[test]
    fn surface_relator_checked() {
        let q = build_surface_z2(2).unwrap();
        assert_eq!(q.order(), 2);
        // a1 and b1 acting as non-commuting elements of S3, regular on 6 points
        let elems: Vec<Perm> = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]]
            .iter()
            .map(|v| perm(v))
            .collect();
        let right = |g: &Perm| {
            perm(&elems
                .iter()
                .map(|e| elems.iter().position(|x| *x == e.then(g)).unwrap() as u32)
                .collect::<Vec<_>>())
        };
        let rot = right(&elems[1]);
        let refl = right(&elems[3]);
        let id = Perm::identity(6);
        let r = FiniteQuotient::from_images(
            "bad",
            Presentation::surface(2).unwrap(),
            vec![rot, refl, id.clone(), id],
            DEFAULT_MAX_ORDER,
        );
        assert!(matches!(r, Err(Error::RelatorNotKilled)));
    }

    #[test]
    fn characteristic_examples() {
        let nielsen = EndoMap::nielsen_generators(2);
        let q = build_mod_m_abelian(2, 2, DEFAULT_MAX_ORDER).unwrap();
        assert!(verify_characteristic(&q, &nielsen).unwrap().characteristic);
        let z2 = FiniteQuotient::from_images(
            "a-only",
            Presentation::free(2).unwrap(),
            vec![perm(&[1, 0]), Perm::identity(2)],
            DEFAULT_MAX_ORDER,
        )
        .unwrap();
        let cert = verify_characteristic(&z2, &nielsen).unwrap();
        assert!(!cert.characteristic);
        assert_eq!(cert.violation.unwrap().0, 0, "violated by the swap");
        let trivial = build_mod_m_abelian(1, 2, DEFAULT_MAX_ORDER).unwrap();
        assert!(verify_characteristic(&trivial, &EndoMap::nielsen_generators(1)).unwrap().characteristic);
    }

    fn brute_force_class_count(q: &FiniteQuotient) -> usize {
        let k = q.order();
        let mut seen = vec![false; k];
        let mut count = 0;
        for g in 0..k {
            if seen[g] {
                continue;
            }
            count += 1;
            for h in 0..k {
                seen[q.mul(q.mul(q.inv(h), g), h)] = true;
            }
        }
        count
    }

    #[test]
    fn conjugacy_class_examples() {
        let q = build_mod_m_abelian(2, 3, DEFAULT_MAX_ORDER).unwrap();
        let cc = conjugacy_classes(&q);
        assert_eq!(cc.len(), 9);
        for (d, p) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let h = build_heisenberg(d, p, DEFAULT_MAX_ORDER).unwrap();
            let cc = conjugacy_classes(&h);
            assert_eq!(cc.len(), brute_force_class_count(&h));
            assert_eq!(cc.classes.iter().map(|c| c.members.len()).sum::<usize>(), h.order());
        }
        // D4 has 5 classes
        assert_eq!(conjugacy_classes(&build_heisenberg(2, 2, DEFAULT_MAX_ORDER).unwrap()).len(), 5);
    }

    #[test]
    fn tower_orders() {
        let trivial = Arc::new(
            FiniteQuotient::from_images(
                "1",
                Presentation::free(2).unwrap(),
                vec![Perm::identity(1), Perm::identity(1)],
                DEFAULT_MAX_ORDER,
            )
            .unwrap(),
        );
        let t = compose_tower(&trivial, 2, DEFAULT_MAX_ORDER).unwrap();
        assert_eq!(t.order(), 4);
        assert!(t.is_abelian());
        let z = Arc::new(build_mod_m_abelian(2, 2, DEFAULT_MAX_ORDER).unwrap());
        let t2 = compose_tower(&z, 2, DEFAULT_MAX_ORDER).unwrap();
        assert_eq!(t2.order(), 128);
        let t3 = compose_tower(&z, 3, DEFAULT_MAX_ORDER).unwrap();
        assert_eq!(t3.order(), 972);
        for t in [&t2, &t3] {
            // forgetting the second level gives back the parent
            for (g, pg) in t.gen_images().iter().zip(z.gen_images()) {
                for point in 0..t.order() {
                    assert_eq!(t.project_to_parent(g.apply(point)), Some(pg.apply(point % 4)));
                }
            }
            assert!(verify_characteristic(t, &EndoMap::nielsen_generators(2)).unwrap().characteristic);
        }
        assert!(matches!(compose_tower(&z, 4, DEFAULT_MAX_ORDER), Err(Error::InvalidArgument(_))));
        assert!(matches!(compose_tower(&Arc::new(t2.clone()), 2, DEFAULT_MAX_ORDER), Err(Error::OrderOverflow { .. })));
    }

    #[test]
    fn regular_table_matches_element_perms() {
        let h = build_heisenberg(2, 3, DEFAULT_MAX_ORDER).unwrap();
        for i in 0..h.order() {
            for j in 0..h.order() {
                assert_eq!(h.element_perm(i).then(&h.element_perm(j)), h.element_perm(h.mul(i, j)));
            }
            // exactly one element sends 0 to i
            assert_eq!(h.element_perm(i).apply(0), i);
        }
    }
}
