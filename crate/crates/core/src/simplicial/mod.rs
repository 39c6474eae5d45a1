//! Nerves of covers, simplicial sheaves of DGLAs, their Čech/cosimplicial
//! complexes, descent data with deviation cocycles, Sullivan polynomial
//! forms, totalization, and De Rham–Sullivan assembly.

mod descent;
mod drs;
mod sullivan;
mod tot;

pub use descent::{
    descent_verify, deviation_cocycle, iso_deviation, two_iso_deviation, whitney_form,
    DescentDatum, DescentReport, DeviationTuple, IsoData, TotalCochain,
};
pub use drs::{drs_validate, DrsCollection, DrsElement, DrsReport};
pub use sullivan::{monotone_inclusion, SullivanForm, SullivanMonomial};
pub use tot::{totalize, TotPresentation};

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::dgla::{DglaBuilder, DglaPresentation, GradedElement};
use crate::linalg::Matrix;
use crate::scalars::ExactScalar;
use crate::Error;

/// The nerve of a finite cover: an abstract downward-closed collection of
/// nonempty index subsets (the declared nonempty intersections).
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Nerve {
    pub index_count: usize,
    simplices: BTreeSet<Vec<usize>>,
}

impl Nerve {
    /// Downward closure of the given generating simplices.
    pub fn from_simplices(index_count: usize, generators: &[Vec<usize>]) -> Result<Nerve, Error> {
        let mut simplices = BTreeSet::new();
        for g in generators {
            let mut sorted = g.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.is_empty() {
                return Err(Error::Domain("empty simplex in nerve".into()));
            }
            if sorted.iter().any(|i| *i >= index_count) {
                return Err(Error::Domain("nerve vertex out of range".into()));
            }
            // all nonempty subsets
            let n = sorted.len();
            for mask in 1u32..(1 << n) {
                let subset: Vec<usize> = (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| sorted[i])
                    .collect();
                simplices.insert(subset);
            }
        }
        Ok(Nerve { index_count, simplices })
    }

    /// The full nerve: every nonempty subset of 0..n intersects.
    pub fn full(index_count: usize) -> Nerve {
        let all: Vec<usize> = (0..index_count).collect();
        Nerve::from_simplices(index_count, &[all]).expect("full nerve")
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        self.simplices.contains(simplex)
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.simplices.iter()
    }

    /// Dimension of the nerve: largest simplex size minus one.
    pub fn dimension(&self) -> usize {
        self.simplices.iter().map(|s| s.len() - 1).max().unwrap_or(0)
    }

    pub fn is_downward_closed(&self) -> bool {
        self.simplices.iter().all(|s| {
            let n = s.len();
            (1u32..(1 << n)).all(|mask| {
                let subset: Vec<usize> =
                    (0..n).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect();
                self.simplices.contains(&subset)
            })
        })
    }
}

/// A degree-preserving linear map between DGLA presentations, stored as
/// one exact matrix per degree (absent degrees map to zero).
#[derive(Clone)]
pub struct DglaMap {
    pub source: Arc<DglaPresentation>,
    pub target: Arc<DglaPresentation>,
    mats: BTreeMap<i64, Matrix>,
}

impl DglaMap {
    pub fn zero(source: &Arc<DglaPresentation>, target: &Arc<DglaPresentation>) -> Self {
        DglaMap { source: source.clone(), target: target.clone(), mats: BTreeMap::new() }
    }

    pub fn identity(l: &Arc<DglaPresentation>) -> Self {
        let mut m = DglaMap::zero(l, l);
        for deg in l.degrees() {
            if l.dim(deg) > 0 {
                m.mats.insert(deg, Matrix::identity(l.dim(deg)));
            }
        }
        m
    }

    pub fn set_matrix(&mut self, degree: i64, m: Matrix) {
        assert_eq!(m.cols, self.source.dim(degree));
        assert_eq!(m.rows, self.target.dim(degree));
        self.mats.insert(degree, m);
    }

    pub fn matrix(&self, degree: i64) -> Option<&Matrix> {
        self.mats.get(&degree)
    }

    pub fn apply(&self, x: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero(&self.target, x.truncation_order());
        for deg in x.degrees_present() {
            let Some(m) = self.mats.get(&deg) else { continue };
            let comp = x.component(deg);
            for r in 0..m.rows {
                let mut acc = crate::scalars::ArtinianSeries::zero(x.truncation_order());
                for (c, val) in comp.iter().enumerate() {
                    if val.is_zero() || m.at(r, c).is_zero() {
                        continue;
                    }
                    acc = acc.add(&val.scale(m.at(r, c)));
                }
                if !acc.is_zero() {
                    out.set_coeff((deg, r), acc);
                }
            }
        }
        out
    }

    /// self ∘ other.
    pub fn compose(&self, other: &DglaMap) -> DglaMap {
        assert_eq!(other.target.name, self.source.name, "maps are not composable");
        let mut out = DglaMap::zero(&other.source, &self.target);
        for deg in other.source.degrees() {
            let (Some(m1), Some(m2)) = (other.mats.get(&deg), self.mats.get(&deg)) else {
                continue;
            };
            out.mats.insert(deg, m2.mul(m1));
        }
        out
    }

    pub fn eq_map(&self, other: &DglaMap) ->бool_alias {
        for deg in self.source.degrees() {
            let dim_s = self.source.dim(deg);
            let dim_t = self.target.dim(deg);
            if dim_s == 0 || dim_t == 0 {
                continue;
            }
            let z = Matrix::zero(dim_t, dim_s);
            let a = self.mats.get(&deg).unwrap_or(&z);
            let b = other.mats.get(&deg).unwrap_or(&z);
            if a != b {
                return false;
            }
        }
        true
    }

    /// Check on all basis vectors that the map commutes with d and brackets.
    pub fn is_dgla_morphism(&self) -> bool {
        let s = &self.source;
        // commutes with d
        for deg in s.degrees() {
            for idx in 0..s.dim(deg) {
                let mut e = GradedElement::zero(s, 0);
                e.set_coeff((deg, idx), crate::scalars::ArtinianSeries::one(0));
                let lhs = self.apply(&e.d());
                let rhs = self.apply(&e).d();
                if !lhs.eq_value(&rhs) {
                    return false;
                }
            }
        }
        // commutes with brackets
        let basis: Vec<(i64, usize)> =
            s.degrees().flat_map(|d| (0..s.dim(d)).map(move |i| (d, i))).collect();
        for &a in &basis {
            for &b in &basis {
                let mut ea = GradedElement::zero(s, 0);
                ea.set_coeff(a, crate::scalars::ArtinianSeries::one(0));
                let mut eb = GradedElement::zero(s, 0);
                eb.set_coeff(b, crate::scalars::ArtinianSeries::one(0));
                let lhs = self.apply(&ea.bracket(&eb));
                let rhs = self.apply(&ea).bracket(&self.apply(&eb));
                if !lhs.eq_value(&rhs) {
                    return false;
                }
            }
        }
        true
    }
}

/// A simplicial sheaf of DGLAs in the finite model: one DGLA per simplex,
/// with restriction maps r_{στ}: L_τ → L_σ for every σ ⊂ τ.
#[derive(Clone)]
pub struct SimplicialDglaSheaf {
    pub nerve: Nerve,
    local: BTreeMap<Vec<usize>, Arc<DglaPresentation>>,
    restrictions: BTreeMap<(Vec<usize>, Vec<usize>), DglaMap>,
}

impl SimplicialDglaSheaf {
    /// The constant sheaf: the same DGLA on all simplices, identity
    /// restrictions.
    pub fn constant(nerve: Nerve, l: &Arc<DglaPresentation>) -> Self {
        let mut local = BTreeMap::new();
        let mut restrictions = BTreeMap::new();
        for s in nerve.simplices() {
            local.insert(s.clone(), l.clone());
        }
        let simplices: Vec<Vec<usize>> = nerve.simplices().cloned().collect();
        for s in &simplices {
            for t in &simplices {
                if s != t && is_subset(s, t) {
                    restrictions.insert((s.clone(), t.clone()), DglaMap::identity(l));
                }
            }
        }
        SimplicialDglaSheaf { nerve, local, restrictions }
    }

    pub fn new(
        nerve: Nerve,
        local: BTreeMap<Vec<usize>, Arc<DglaPresentation>>,
        restrictions: BTreeMap<(Vec<usize>, Vec<usize>), DglaMap>,
    ) -> Self {
        SimplicialDglaSheaf { nerve, local, restrictions }
    }

    pub fn local(&self, simplex: &[usize]) -> &Arc<DglaPresentation> {
        &self.local[simplex]
    }

    /// r_{στ} for σ ⊆ τ (identity when σ = τ).
    pub fn restriction(&self, sigma: &[usize], tau: &[usize]) -> DglaMap {
        if sigma == tau {
            return DglaMap::identity(&self.local[sigma]);
        }
        self.restrictions[&(sigma.to_vec(), tau.to_vec())].clone()
    }

    /// Functoriality r_{στ} r_{τθ} = r_{σθ} on all chains σ ⊂ τ ⊂ θ, and
    /// the morphism property of every restriction.
    pub fn validate(&self) -> Result<(), Error> {
        let simplices: Vec<Vec<usize>> = self.nerve.simplices().cloned().collect();
        for ((s, t), map) in &self.restrictions {
            if !is_subset(s, t) {
                return Err(Error::Domain(format!("restriction for non-face {s:?} ⊄ {t:?}")));
            }
            if !map.is_dgla_morphism() {
                return Err(Error::Domain(format!("restriction {s:?} ⊂ {t:?} is not a morphism")));
            }
        }
        for s in &simplices {
            for t in &simplices {
                for u in &simplices {
                    if s != t && t != u && is_subset(s, t) && is_subset(t, u) {
                        let left = self.restriction(s, t).compose(&self.restriction(t, u));
                        let right = self.restriction(s, u);
                        if !left.eq_map(&right) {
                            return Err(Error::Domain(format!(
                                "restrictions fail functoriality on {s:?} ⊂ {t:?} ⊂ {u:?}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// A cosimplicial DGLA with levels 0..=cap, coface maps d_i and
/// codegeneracies s_i.
#[derive(Clone)]
pub struct CosimplicialDgla {
    levels: Vec<Arc<DglaPresentation>>,
    /// cofaces[n][i]: level n → n+1 for 0 ≤ i ≤ n+1
    cofaces: Vec<Vec<DglaMap>>,
    /// codegeneracies[n][i]: level n+1 → n for 0 ≤ i ≤ n
    codegeneracies: Vec<Vec<DglaMap>>,
}

impl CosimplicialDgla {
    pub fn new(
        levels: Vec<Arc<DglaPresentation>>,
        cofaces: Vec<Vec<DglaMap>>,
        codegeneracies: Vec<Vec<DglaMap>>,
    ) -> Self {
        assert_eq!(cofaces.len() + 1, levels.len());
        assert_eq!(codegeneracies.len() + 1, levels.len());
        CosimplicialDgla { levels, cofaces, codegeneracies }
    }

    /// The constant cosimplicial DGLA on one presentation.
    pub fn constant(l: &Arc<DglaPresentation>, cap: usize) -> Self {
        let levels = vec![l.clone(); cap + 1];
        let cofaces = (0..cap).map(|n| vec![DglaMap::identity(l); n + 2]).collect();
        let codegeneracies = (0..cap).map(|n| vec![DglaMap::identity(l); n + 1]).collect();
        CosimplicialDgla { levels, cofaces, codegeneracies }
    }

    pub fn cap(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &Arc<DglaPresentation> {
        &self.levels[n]
    }

    pub fn coface(&self, n: usize, i: usize) -> &DglaMap {
        &self.cofaces[n][i]
    }

    pub fn codegeneracy(&self, n: usize, i: usize) -> &DglaMap {
        &self.codegeneracies[n][i]
    }

    /// Čech differential ∂ = Σ (−1)^i d_i out of level n.
    pub fn cech_d(&self, x: &GradedElement, n: usize) -> GradedElement {
        let mut out = GradedElement::zero(&self.levels[n + 1], x.truncation_order());
        for i in 0..=(n + 1) {
            let img = self.cofaces[n][i].apply(x);
            out = if i % 2 == 0 { out.add(&img) } else { out.sub(&img) };
        }
        out
    }

    /// Image of a level-k element in level n under the monotone injection
    /// with the given image positions (the x_{i₀…i_k} notation).
    pub fn image_at(
        &self,
        x: &GradedElement,
        from_level: usize,
        to_level: usize,
        positions: &[usize],
    ) -> GradedElement {
        assert_eq!(positions.len(), from_level + 1);
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "positions must increase");
        assert!(*positions.last().unwrap() <= to_level);
        // missing positions, ascending; apply the corresponding cofaces
        // smallest first (later insertions land above earlier ones)
        let mut current = x.clone();
        let mut level = from_level;
        let present: BTreeSet<usize> = positions.iter().copied().collect();
        for m in 0..=to_level {
            if !present.contains(&m) {
                current = self.cofaces[level][m].apply(&current);
                level += 1;
            }
        }
        assert_eq!(level, to_level);
        current
    }

    /// Cosimplicial identities, ∂² = 0 (implied but checked directly on a
    /// basis), and the morphism property of all structure maps.
    pub fn validate(&self) -> Result<(), Error> {
        let cap = self.cap();
        for (n, maps) in self.cofaces.iter().enumerate() {
            if maps.len() != n + 2 {
                return Err(Error::Domain(format!("level {n} must have {} cofaces", n + 2)));
            }
            for m in maps {
                if !m.is_dgla_morphism() {
                    return Err(Error::Domain(format!("a coface at level {n} is not a morphism")));
                }
            }
        }
        for (n, maps) in self.codegeneracies.iter().enumerate() {
            if maps.len() != n + 1 {
                return Err(Error::Domain(format!(
                    "level {} must have {} codegeneracies",
                    n + 1,
                    n + 1
                )));
            }
            for m in maps {
                if !m.is_dgla_morphism() {
                    return Err(Error::Domain(format!(
                        "a codegeneracy at level {n} is not a morphism"
                    )));
                }
            }
        }
        // d_j d_i = d_i d_{j−1} for i < j
        for n in 0..cap.saturating_sub(1) {
            for j in 0..=(n + 2) {
                for i in 0..j {
                    let left = self.cofaces[n + 1][j].compose(&self.cofaces[n][i]);
                    let right = self.cofaces[n + 1][i].compose(&self.cofaces[n][j - 1]);
                    if !left.eq_map(&right) {
                        return Err(Error::Domain(format!(
                            "coface identity fails at level {n}: d_{j} d_{i} ≠ d_{i} d_{}",
                            j - 1
                        )));
                    }
                }
            }
        }
        // s_j d_i relations
        for n in 0..cap {
            for j in 0..=n {
                for i in 0..=(n + 1) {
                    let comp = self.codegeneracies[n][j].compose(&self.cofaces[n][i]);
                    let expected: Option<DglaMap> = if i < j {
                        if n == 0 {
                            None // s_{j−1} out of range at the bottom level
                        } else {
                            Some(
                                self.cofaces[n - 1][i]
                                    .compose(&self.codegeneracies[n - 1][j - 1]),
                            )
                        }
                    } else if i == j || i == j + 1 {
                        Some(DglaMap::identity(&self.levels[n]))
                    } else if n >= 1 {
                        Some(self.cofaces[n - 1][i - 1].compose(&self.codegeneracies[n - 1][j]))
                    } else {
                        None
                    };
                    if let Some(e) = expected {
                        if !comp.eq_map(&e) {
                            return Err(Error::Domain(format!(
                                "simplicial identity fails: s_{j} d_{i} at level {n}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The Čech complex of a simplicial sheaf of DGLAs over its nerve: level p
/// is the product of L_{σ₀} over weak inclusion chains σ₀ ⊆ … ⊆ σ_p.
pub struct CechComplex {
    pub cosimplicial: Arc<CosimplicialDgla>,
    /// chains indexing each level's product factors
    pub chains: Vec<Vec<Vec<Vec<usize>>>>,
    pub sheaf: SimplicialDglaSheaf,
}

/// Enumerate weak chains σ₀ ⊆ σ₁ ⊆ … ⊆ σ_p of nerve simplices.
pub fn enumerate_chains(nerve: &Nerve, p: usize) -> Vec<Vec<Vec<usize>>> {
    let simplices: Vec<Vec<usize>> = nerve.simplices().cloned().collect();
    let mut chains: Vec<Vec<Vec<usize>>> = simplices.iter().map(|s| vec![s.clone()]).collect();
    for _ in 0..p {
        let mut next = Vec::new();
        for c in &chains {
            let last = c.last().unwrap();
            for s in &simplices {
                if is_subset(last, s) {
                    let mut ext = c.clone();
                    ext.push(s.clone());
                    next.push(ext);
                }
            }
        }
        chains = next;
    }
    chains
}

/// Build the Čech cosimplicial DGLA of a simplicial sheaf up to level cap.
pub fn cech_complex(sheaf: &SimplicialDglaSheaf, cap: usize) -> Result<CechComplex, Error> {
    let mut all_chains = Vec::with_capacity(cap + 1);
    for p in 0..=cap {
        all_chains.push(enumerate_chains(&sheaf.nerve, p));
    }

    // every level shares the degree window of the local DGLAs
    let a_simplex = sheaf.nerve.simplices().next().ok_or_else(|| {
        Error::Domain("empty nerve".into())
    })?;
    let (lo, hi) = sheaf.local(a_simplex).degree_range();

    // basis offsets per level: chain index ↦ per-degree offset
    let mut levels: Vec<Arc<DglaPresentation>> = Vec::new();
    let mut offsets: Vec<Vec<BTreeMap<i64, usize>>> = Vec::new();
    for (p, chains) in all_chains.iter().enumerate() {
        let mut dims: BTreeMap<i64, usize> = (lo..=hi).map(|d| (d, 0usize)).collect();
        let mut level_offsets = Vec::with_capacity(chains.len());
        for chain in chains {
            let l0 = sheaf.local(&chain[0]);
            let mut per_degree = BTreeMap::new();
            for deg in lo..=hi {
                per_degree.insert(deg, dims[&deg]);
                *dims.get_mut(&deg).unwrap() += l0.dim(deg);
            }
            level_offsets.push(per_degree);
        }
        offsets.push(level_offsets);
        let dims_vec: Vec<usize> = (lo..=hi).map(|d| dims[&d]).collect();
        let mut b = DglaBuilder::new(&format!("cech-level-{p}"), lo, hi, &dims_vec);
        // differential matrices per degree (block diagonal)
        for deg in lo..hi {
            let rows = dims_vec[(deg + 1 - lo) as usize];
            let cols = dims_vec[(deg - lo) as usize];
            let mut m = Matrix::zero(rows, cols);
            for (ci, chain) in chains.iter().enumerate() {
                let l0 = sheaf.local(&chain[0]);
                if let Some(dm) = l0.differential_matrix(deg) {
                    let ro = offsets[p][ci][&(deg + 1)];
                    let co = offsets[p][ci][&deg];
                    for r in 0..dm.rows {
                        for c in 0..dm.cols {
                            if !dm.at(r, c).is_zero() {
                                *m.at_mut(ro + r, co + c) = dm.at(r, c).clone();
                            }
                        }
                    }
                }
            }
            b = b.set_differential(deg, m);
        }
        // brackets (block diagonal per chain)
        for (ci, chain) in chains.iter().enumerate() {
            let l0 = sheaf.local(&chain[0]);
            for da in lo..=hi {
                for ia in 0..l0.dim(da) {
                    for db in lo..=hi {
                        if da + db < lo || da + db > hi {
                            continue;
                        }
                        for ib in 0..l0.dim(db) {
                            for (k, c) in l0.bracket_basis((da, ia), (db, ib)) {
                                b = b.add_bracket(
                                    (da, offsets[p][ci][&da] + ia),
                                    (db, offsets[p][ci][&db] + ib),
                                    offsets[p][ci][&(da + db)] + *k,
                                    c.clone(),
                                );
                            }
                        }
                    }
                }
            }
        }
        levels.push(b.build());
    }

    // cofaces and codegeneracies as block maps between levels
    let chain_index = |p: usize, chain: &Vec<Vec<usize>>| -> usize {
        all_chains[p].iter().position(|c| c == chain).expect("chain present")
    };

    let mut cofaces = Vec::new();
    for n in 0..cap {
        let mut maps = Vec::new();
        for i in 0..=(n + 1) {
            let mut map = DglaMap::zero(&levels[n], &levels[n + 1]);
            for deg in lo..=hi {
                let rows = levels[n + 1].dim(deg);
                let cols = levels[n].dim(deg);
                if rows == 0 || cols == 0 {
                    map.set_matrix(deg, Matrix::zero(rows, cols));
                    continue;
                }
                let mut m = Matrix::zero(rows, cols);
                for (ti, tchain) in all_chains[n + 1].iter().enumerate() {
                    // source chain: drop σ_i
                    let mut source: Vec<Vec<usize>> = tchain.clone();
                    source.remove(i);
                    let si = chain_index(n, &source);
                    let target_l0 = sheaf.local(&tchain[0]);
                    let ro = offsets[n + 1][ti][&deg];
                    let co = offsets[n][si][&deg];
                    if i == 0 {
                        // the value sheaf shrinks from σ₁ to σ₀: restrict
                        let r = sheaf.restriction(&tchain[0], &tchain[1]);
                        if let Some(rm) = r.matrix(deg) {
                            for rr in 0..rm.rows {
                                for cc in 0..rm.cols {
                                    if !rm.at(rr, cc).is_zero() {
                                        *m.at_mut(ro + rr, co + cc) = rm.at(rr, cc).clone();
                                    }
                                }
                            }
                        }
                    } else {
                        for idx in 0..target_l0.dim(deg) {
                            *m.at_mut(ro + idx, co + idx) = ExactScalar::one();
                        }
                    }
                }
                map.set_matrix(deg, m);
            }
            maps.push(map);
        }
        cofaces.push(maps);
    }

    let mut codegeneracies = Vec::new();
    for n in 0..cap {
        // maps level n+1 → n
        let mut maps = Vec::new();
        for i in 0..=n {
            let mut map = DglaMap::zero(&levels[n + 1], &levels[n]);
            for deg in lo..=hi {
                let rows = levels[n].dim(deg);
                let cols = levels[n + 1].dim(deg);
                if rows == 0 || cols == 0 {
                    map.set_matrix(deg, Matrix::zero(rows, cols));
                    continue;
                }
                let mut m = Matrix::zero(rows, cols);
                for (ti, tchain) in all_chains[n].iter().enumerate() {
                    // source chain: repeat σ_i
                    let mut source: Vec<Vec<usize>> = tchain.clone();
                    source.insert(i, tchain[i].clone());
                    let si = chain_index(n + 1, &source);
                    let l0 = sheaf.local(&tchain[0]);
                    let ro = offsets[n][ti][&deg];
                    let co = offsets[n + 1][si][&deg];
                    for idx in 0..l0.dim(deg) {
                        *m.at_mut(ro + idx, co + idx) = ExactScalar::one();
                    }
                }
                map.set_matrix(deg, m);
            }
            maps.push(map);
        }
        codegeneracies.push(maps);
    }

    Ok(CechComplex {
        cosimplicial: Arc::new(CosimplicialDgla::new(levels, cofaces, codegeneracies)),
        chains: all_chains,
        sheaf: sheaf.clone(),
    })
}
