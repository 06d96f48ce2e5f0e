//! Ordered catalogs of finite quotients and their JSON form.
//!
//! ```json
//! {"quotients": [{"name": "Z2^2", "kind": "free", "rank": 2,
//!                 "images": [[1,0,3,2],[2,3,0,1]],
//!                 "flags": {"p_group": 2, "solvable": true}}]}
//! ```
//!
//! Tower quotients may carry `"tower": {"parent": name, "prime": p}`; the
//! parent must appear earlier and is checked to be the projection.

use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::endo::EndoMap;
use crate::error::{Error, Result};
use crate::homology::CoverHomology;
use crate::perm::Perm;
use crate::quotient::{
    build_heisenberg, build_mod_m_abelian, build_surface_z2, compose_tower, conjugacy_classes,
    verify_characteristic, ConjugacyClasses, FiniteQuotient, TowerInfo, DEFAULT_MAX_ORDER,
};
use crate::word::Presentation;

const SHIPPED: &str = include_str!("../data/default_catalog.json");

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientFlags {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_group: Option<u32>,
    #[serde(default)]
    pub solvable: bool,
    /// Recomputed on load; never read from the file.
    #[serde(skip)]
    pub characteristic: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TowerRecord {
    parent: String,
    prime: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct QuotientRecord {
    name: String,
    kind: String,
    rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    genus: Option<usize>,
    images: Vec<Vec<u32>>,
    #[serde(default)]
    flags: QuotientFlags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tower: Option<TowerRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CatalogFile {
    quotients: Vec<QuotientRecord>,
}

/// A quotient together with lazily built cover data.
#[derive(Debug)]
pub struct CatalogEntry {
    quotient: Arc<FiniteQuotient>,
    flags: QuotientFlags,
    cover: OnceLock<Result<CoverHomology>>,
    classes: OnceLock<ConjugacyClasses>,
}

impl CatalogEntry {
    pub fn new(quotient: FiniteQuotient, flags: QuotientFlags) -> Result<Self> {
        let mut flags = flags;
        let nielsen = EndoMap::nielsen_generators(quotient.rank());
        flags.characteristic = !quotient.presentation().is_surface()
            && verify_characteristic(&quotient, &nielsen)?.characteristic;
        Ok(CatalogEntry {
            quotient: Arc::new(quotient),
            flags,
            cover: OnceLock::new(),
            classes: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        self.quotient.name()
    }

    pub fn quotient(&self) -> &FiniteQuotient {
        &self.quotient
    }

    pub fn quotient_arc(&self) -> &Arc<FiniteQuotient> {
        &self.quotient
    }

    pub fn flags(&self) -> &QuotientFlags {
        &self.flags
    }

    pub fn cover(&self) -> Result<&CoverHomology> {
        self.cover
            .get_or_init(|| CoverHomology::from_quotient(Arc::clone(&self.quotient)))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn classes(&self) -> &ConjugacyClasses {
        self.classes.get_or_init(|| conjugacy_classes(&self.quotient))
    }
}

#[derive(Debug, Default)]
pub struct QuotientCatalog {
    entries: Vec<CatalogEntry>,
}

impl QuotientCatalog {
    pub fn new() -> Self {
        QuotientCatalog::default()
    }

    pub fn push(&mut self, entry: CatalogEntry) -> Result<()> {
        if self.get(entry.name()).is_some() {
            return Err(Error::InvalidCatalog(format!("duplicate quotient name {:?}", entry.name())));
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name() == name)
    }

    /// The catalog shipped with the crate.
    pub fn shipped() -> Result<Self> {
        QuotientCatalog::from_json(SHIPPED)
    }

    /// JSON text of the shipped catalog.
    pub fn shipped_json() -> &'static str {
        SHIPPED
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        QuotientCatalog::load_with(path, DEFAULT_MAX_ORDER)
    }

    /// Loads a catalog, rejecting quotients of order above `max_order`.
    pub fn load_with(path: impl AsRef<Path>, max_order: usize) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidCatalog(format!("{}: {e}", path.display())))?;
        QuotientCatalog::from_json_with(&text, max_order)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        QuotientCatalog::from_json_with(text, DEFAULT_MAX_ORDER)
    }

    pub fn from_json_with(text: &str, max_order: usize) -> Result<Self> {
        let file: CatalogFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidCatalog(e.to_string()))?;
        let mut catalog = QuotientCatalog::new();
        for rec in file.quotients {
            let ctx = |e: Error| Error::InvalidCatalog(format!("{}: {e}", rec.name));
            let pres = match (rec.kind.as_str(), rec.genus) {
                ("free", _) => Presentation::free(rec.rank).map_err(ctx)?,
                ("surface", Some(g)) if 2 * g == rec.rank => Presentation::surface(g).map_err(ctx)?,
                ("surface", _) => {
                    return Err(Error::InvalidCatalog(format!(
                        "{}: surface entries need genus with rank = 2·genus",
                        rec.name
                    )))
                }
                (k, _) => return Err(Error::InvalidCatalog(format!("{}: unknown kind {k:?}", rec.name))),
            };
            let images = rec
                .images
                .iter()
                .map(|v| {
                    Perm::from_images(v.clone()).ok_or_else(|| {
                        Error::InvalidCatalog(format!("{}: image is not a permutation", rec.name))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut q = FiniteQuotient::from_images(&rec.name, pres, images, max_order)
                .map_err(ctx)?;
            if let Some(t) = &rec.tower {
                let parent = catalog.get(&t.parent).ok_or_else(|| {
                    Error::InvalidCatalog(format!("{}: tower parent {:?} not found", rec.name, t.parent))
                })?;
                let info = tower_info(parent.quotient(), &q, t.prime)
                    .ok_or_else(|| Error::InvalidCatalog(format!("{}: does not project to {}", rec.name, t.parent)))?;
                q.set_tower(info);
            }
            catalog.push(CatalogEntry::new(q, rec.flags)?)?;
        }
        Ok(catalog)
    }

    pub fn to_json(&self) -> String {
        let file = CatalogFile {
            quotients: self
                .entries
                .iter()
                .map(|e| {
                    let q = e.quotient();
                    let pres = q.presentation();
                    QuotientRecord {
                        name: q.name().to_string(),
                        kind: if pres.is_surface() { "surface" } else { "free" }.to_string(),
                        rank: q.rank(),
                        genus: pres.genus(),
                        images: q.gen_images().iter().map(|p| p.images().to_vec()).collect(),
                        flags: e.flags.clone(),
                        tower: q.tower().map(|t| TowerRecord { parent: t.parent.clone(), prime: t.prime }),
                    }
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("catalog serialises")
    }

    /// Builds the default catalog from scratch: mod-m abelian quotients of
    /// `F_2` and `F_3`, the mod-2 and mod-3 Heisenberg groups, the two tower
    /// quotients over `(Z/2)²`, the parity quotient of `F_2` and the genus-2
    /// surface onto `Z/2`.
    pub fn default_catalog() -> Result<Self> {
        let mut c = QuotientCatalog::new();
        let flags = |p: Option<u32>| QuotientFlags { p_group: p, solvable: true, characteristic: false };
        let prime_power = |m: usize| {
            let p = (2..=m).find(|p| m % p == 0).unwrap();
            let mut x = m;
            while x % p == 0 {
                x /= p;
            }
            (x == 1).then_some(p as u32)
        };
        let swap = Perm::from_images(vec![1, 0]).unwrap();
        let parity = FiniteQuotient::from_images(
            "Z2-F2",
            Presentation::free(2)?,
            vec![swap.clone(), swap],
            DEFAULT_MAX_ORDER,
        )?;
        c.push(CatalogEntry::new(parity, flags(Some(2)))?)?;
        for d in [2, 3] {
            for m in [2, 3, 4, 5] {
                c.push(CatalogEntry::new(build_mod_m_abelian(d, m, DEFAULT_MAX_ORDER)?, flags(prime_power(m)))?)?;
            }
        }
        for d in [2, 3] {
            for p in [2u32, 3] {
                c.push(CatalogEntry::new(build_heisenberg(d, p as usize, DEFAULT_MAX_ORDER)?, flags(Some(p)))?)?;
            }
        }
        let base = Arc::clone(c.get("Z2^2").unwrap().quotient_arc());
        c.push(CatalogEntry::new(compose_tower(&base, 2, DEFAULT_MAX_ORDER)?, flags(Some(2)))?)?;
        c.push(CatalogEntry::new(compose_tower(&base, 3, DEFAULT_MAX_ORDER)?, flags(None))?)?;
        c.push(CatalogEntry::new(build_surface_z2(2)?, flags(Some(2)))?)?;
        Ok(c)
    }
}

/// Tower record for `q` over `parent` when `point % |parent|` is a
/// projection of actions.
fn tower_info(parent: &FiniteQuotient, q: &FiniteQuotient, prime: u32) -> Option<TowerInfo> {
    let k = parent.order();
    if q.rank() != parent.rank() || q.order() % k != 0 {
        return None;
    }
    for (g, pg) in q.gen_images().iter().zip(parent.gen_images()) {
        if (0..q.order()).any(|x| g.apply(x) % k != pg.apply(x % k)) {
            return None;
        }
    }
    let mut levels = q.order() / k;
    let mut r = 0;
    while levels > 1 {
        if levels % prime as usize != 0 {
            return None;
        }
        levels /= prime as usize;
        r += 1;
    }
    Some(TowerInfo { parent: parent.name().to_string(), parent_order: k, prime, kernel_rank: r })
}
