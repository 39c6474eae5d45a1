//! Finite-dimensional graded Lie algebras with differential, presented by
//! exact structure constants per degree.
//!
//! Degree bookkeeping is cohomological throughout: the differential raises
//! degree by one. Brackets whose degree leaves the declared window are
//! truncated to zero; all axiom checks below are aware of the window, so a
//! truncated presentation of an honest DGLA always validates.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::scalars::{rational_from_string, rational_to_string, ArtinianSeries, ExactScalar};
use crate::Error;

/// A basis slot: (degree, index within that degree).
pub type BasisRef = (i64, usize);

/// Presentation of a finite-dimensional DGLA by structure constants.
#[derive(Clone)]
pub struct DglaPresentation {
    pub name: String,
    lo: i64,
    hi: i64,
    dims: Vec<usize>,
    /// differential matrices, keyed by source degree; absent ⇒ zero map
    differential: BTreeMap<i64, Matrix>,
    /// sparse structure constants: (a, b) ↦ Σ c·e_out in degree |a|+|b|
    bracket: BTreeMap<(BasisRef, BasisRef), Vec<(usize, ExactScalar)>>,
}

impl DglaPresentation {
    pub fn degree_range(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn dim(&self, degree: i64) -> usize {
        if degree < self.lo || degree > self.hi {
            0
        } else {
            self.dims[(degree - self.lo) as usize]
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Differential of a basis vector, as a sparse vector in degree+1.
    pub fn d_basis(&self, at: BasisRef) -> Vec<(usize, ExactScalar)> {
        let (deg, idx) = at;
        let Some(m) = self.differential.get(&deg) else { return Vec::new() };
        (0..m.rows).filter_map(|r| {
            let c = m.at(r, idx);
            (!c.is_zero()).then(|| (r, c.clone()))
        }).collect()
    }

    /// Bracket of two basis vectors, as a sparse vector in the sum degree.
    pub fn bracket_basis(&self, a: BasisRef, b: BasisRef) -> &[(usize, ExactScalar)] {
        self.bracket.get(&(a, b)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn differential_matrix(&self, degree: i64) -> Option<&Matrix> {
        self.differential.get(&degree)
    }

    /// Extend by one formal degree-1 basis vector δ with [δ, x] = dx and
    /// [δ, δ] = 0, realizing the cross product with the one-dimensional
    /// graded Lie algebra spanned by the differential symbol.
    ///
    /// The gauge action `exp ad X (d + λ)` is then ordinary exponential
    /// arithmetic in the extended algebra, with no special cases.
    pub fn with_formal_differential(self: &Arc<Self>) -> Arc<DglaPresentation> {
        assert!(
            self.lo <= 1 && self.hi >= 1,
            "formal differential extension requires degree 1 in range"
        );
        let mut ext = (**self).clone();
        ext.name = format!("{}+d", self.name);
        let delta_idx = self.dim(1);
        ext.dims[(1 - self.lo) as usize] += 1;

        // widen existing matrices touching degree 1
        if let Some(m0) = ext.differential.get_mut(&0) {
            let mut grown = Matrix::zero(m0.rows + 1, m0.cols);
            for r in 0..m0.rows {
                for c in 0..m0.cols {
                    *grown.at_mut(r, c) = m0.at(r, c).clone();
                }
            }
            *m0 = grown;
        }
        if let Some(m1) = ext.differential.get_mut(&1) {
            let mut grown = Matrix::zero(m1.rows, m1.cols + 1);
            for r in 0..m1.rows {
                for c in 0..m1.cols {
                    *grown.at_mut(r, c) = m1.at(r, c).clone();
                }
            }
            *m1 = grown;
        }

        // [δ, e] = d e  and  [e, δ] = −(−1)^{|e|} d e
        for deg in self.lo..=self.hi {
            for idx in 0..self.dim(deg) {
                let de = self.d_basis((deg, idx));
                if de.is_empty() {
                    continue;
                }
                ext.bracket.insert(((1, delta_idx), (deg, idx)), de.clone());
                let sign = if deg.rem_euclid(2) == 0 { -1 } else { 1 };
                let back: Vec<(usize, ExactScalar)> =
                    de.iter().map(|(k, c)| (*k, c.scale_int(sign))).collect();
                ext.bracket.insert(((deg, idx), (1, delta_idx)), back);
            }
        }
        Arc::new(ext)
    }
}

/// Incremental constructor for [`DglaPresentation`].
pub struct DglaBuilder {
    p: DglaPresentation,
}

impl DglaBuilder {
    pub fn new(name: &str, lo: i64, hi: i64, dims: &[usize]) -> Self {
        assert!(hi >= lo && dims.len() as i64 == hi - lo + 1);
        DglaBuilder {
            p: DglaPresentation {
                name: name.to_string(),
                lo,
                hi,
                dims: dims.to_vec(),
                differential: BTreeMap::new(),
                bracket: BTreeMap::new(),
            },
        }
    }

    pub fn set_differential(mut self, degree: i64, m: Matrix) -> Self {
        assert_eq!(m.cols, self.p.dim(degree), "differential source dimension");
        assert_eq!(m.rows, self.p.dim(degree + 1), "differential target dimension");
        self.p.differential.insert(degree, m);
        self
    }

    /// Record a single structure constant [a, b] += c·e_out (one direction).
    pub fn add_bracket(mut self, a: BasisRef, b: BasisRef, out_idx: usize, c: ExactScalar) -> Self {
        self.push_bracket(a, b, out_idx, c);
        self
    }

    /// Record [a, b] += c·e_out together with the graded-antisymmetric
    /// mirror [b, a] −= (−1)^{|a||b|} c·e_out.
    pub fn add_bracket_sym(
        mut self,
        a: BasisRef,
        b: BasisRef,
        out_idx: usize,
        c: ExactScalar,
    ) -> Self {
        self.push_bracket(a, b, out_idx, c.clone());
        if a != b {
            let sign = if (a.0 * b.0).rem_euclid(2) == 0 { -1 } else { 1 };
            self.push_bracket(b, a, out_idx, c.scale_int(sign));
        }
        self
    }

    fn push_bracket(&mut self, a: BasisRef, b: BasisRef, out_idx: usize, c: ExactScalar) {
        let out_deg = a.0 + b.0;
        if out_deg < self.p.lo || out_deg > self.p.hi {
            return;
        }
        assert!(a.1 < self.p.dim(a.0) && b.1 < self.p.dim(b.0), "basis index out of range");
        assert!(out_idx < self.p.dim(out_deg), "output index out of range");
        let entry = self.p.bracket.entry((a, b)).or_default();
        if let Some(slot) = entry.iter_mut().find(|(k, _)| *k == out_idx) {
            slot.1 = &slot.1 + &c;
        } else {
            entry.push((out_idx, c));
        }
        entry.retain(|(_, c)| !c.is_zero());
    }

    pub fn build(self) -> Arc<DglaPresentation> {
        Arc::new(self.p)
    }
}

/// One axiom's outcome in a validation report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    fn pass() -> Self {
        Check { pass: true, witness: None }
    }

    fn fail(witness: String) -> Self {
        Check { pass: false, witness: Some(witness) }
    }
}

/// Axiom report for [`validate_dgla`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DglaReport {
    pub d_squared: Check,
    pub antisymmetry: Check,
    pub jacobi: Check,
    pub leibniz: Check,
}

impl DglaReport {
    pub fn all_pass(&self) -> bool {
        self.d_squared.pass && self.antisymmetry.pass && self.jacobi.pass && self.leibniz.pass
    }
}

fn sparse_axpy(acc: &mut Vec<ExactScalar>, scale: &ExactScalar, sparse: &[(usize, ExactScalar)]) {
    for (k, c) in sparse {
        let p = scale * c;
        acc[*k] += &p;
    }
}

/// Check d² = 0, graded antisymmetry, graded Jacobi and graded Leibniz on
/// all basis tuples whose brackets stay inside the presented degree window.
/// Failures are reported with a witness tuple, not as errors.
pub fn validate_dgla(l: &DglaPresentation) -> DglaReport {
    let (lo, hi) = l.degree_range();
    let in_range = |d: i64| d >= lo && d <= hi;

    // d² = 0
    let mut d_squared = Check::pass();
    'dd: for deg in lo..hi {
        let (Some(m1), Some(m2)) = (l.differential_matrix(deg), l.differential_matrix(deg + 1))
        else {
            continue;
        };
        let prod = m2.mul(m1);
        if !prod.is_zero() {
            d_squared = Check::fail(format!("d∘d ≠ 0 out of degree {deg}"));
            break 'dd;
        }
    }

    let basis: Vec<BasisRef> =
        l.degrees().flat_map(|d| (0..l.dim(d)).map(move |i| (d, i))).collect();

    // graded antisymmetry: [a,b] + (−1)^{|a||b|}[b,a] = 0
    let mut antisymmetry = Check::pass();
    'anti: for &a in &basis {
        for &b in &basis {
            if !in_range(a.0 + b.0) {
                continue;
            }
            let dim_out = l.dim(a.0 + b.0);
            let mut acc = vec![ExactScalar::zero(); dim_out];
            sparse_axpy(&mut acc, &ExactScalar::one(), l.bracket_basis(a, b));
            let sign = if (a.0 * b.0).rem_euclid(2) == 0 { 1 } else { -1 };
            sparse_axpy(&mut acc, &ExactScalar::from_int(sign), l.bracket_basis(b, a));
            if acc.iter().any(|c| !c.is_zero()) {
                antisymmetry = Check::fail(format!("antisymmetry fails on ({a:?}, {b:?})"));
                break 'anti;
            }
        }
    }

    // graded Jacobi in Leibniz form: [a,[b,c]] = [[a,b],c] + (−1)^{|a||b|}[b,[a,c]].
    // Degrees below the window are structural zeros and evaluate as such;
    // degrees above it are truncated, so triples with an intermediate
    // bracket beyond the top are not evaluable and are skipped.
    let mut jacobi = Check::pass();
    'jac: for &a in &basis {
        for &b in &basis {
            for &c in &basis {
                let total = a.0 + b.0 + c.0;
                if total > hi || b.0 + c.0 > hi || a.0 + b.0 > hi || a.0 + c.0 > hi {
                    continue;
                }
                if !in_range(total) {
                    // every term lands below the window: structurally zero
                    continue;
                }
                let dim_out = l.dim(total);
                let mut acc = vec![ExactScalar::zero(); dim_out];
                for (k, s) in l.bracket_basis(b, c) {
                    sparse_axpy(&mut acc, s, l.bracket_basis(a, (b.0 + c.0, *k)));
                }
                for (k, s) in l.bracket_basis(a, b) {
                    sparse_axpy(&mut acc, &-s, l.bracket_basis((a.0 + b.0, *k), c));
                }
                let sign = if (a.0 * b.0).rem_euclid(2) == 0 { -1 } else { 1 };
                for (k, s) in l.bracket_basis(a, c) {
                    sparse_axpy(&mut acc, &s.scale_int(sign), l.bracket_basis(b, (a.0 + c.0, *k)));
                }
                if acc.iter().any(|x| !x.is_zero()) {
                    jacobi = Check::fail(format!("Jacobi fails on ({a:?}, {b:?}, {c:?})"));
                    break 'jac;
                }
            }
        }
    }

    // graded Leibniz: d[a,b] = [da,b] + (−1)^{|a|}[a,db]. As with Jacobi,
    // pairs whose intermediates (the bracket or a differential image)
    // leave the top of the window are not evaluable in the truncation.
    let mut leibniz = Check::pass();
    'leib: for &a in &basis {
        for &b in &basis {
            let out_deg = a.0 + b.0 + 1;
            if out_deg > hi || a.0 + b.0 > hi || a.0 + 1 > hi || b.0 + 1 > hi {
                continue;
            }
            if !in_range(out_deg) {
                continue;
            }
            let dim_out = l.dim(out_deg);
            let mut acc = vec![ExactScalar::zero(); dim_out];
            for (k, s) in l.bracket_basis(a, b) {
                sparse_axpy(&mut acc, s, &l.d_basis((a.0 + b.0, *k)));
            }
            for (k, s) in l.d_basis(a) {
                sparse_axpy(&mut acc, &-&s, l.bracket_basis((a.0 + 1, k), b));
            }
            let sign = if a.0.rem_euclid(2) == 0 { -1 } else { 1 };
            for (k, s) in l.d_basis(b) {
                sparse_axpy(&mut acc, &s.scale_int(sign), l.bracket_basis(a, (b.0 + 1, k)));
            }
            if acc.iter().any(|x| !x.is_zero()) {
                leibniz = Check::fail(format!("Leibniz fails on ({a:?}, {b:?})"));
                break 'leib;
            }
        }
    }

    DglaReport { d_squared, antisymmetry, jacobi, leibniz }
}

/// Element of L ⊗ 𝔞: one coefficient vector of truncated series per degree.
#[derive(Clone)]
pub struct GradedElement {
    pub owner: Arc<DglaPresentation>,
    trunc: i64,
    components: BTreeMap<i64, Vec<ArtinianSeries>>,
}

impl GradedElement {
    pub fn zero(owner: &Arc<DglaPresentation>, trunc: i64) -> Self {
        GradedElement { owner: owner.clone(), trunc, components: BTreeMap::new() }
    }

    pub fn truncation_order(&self) -> i64 {
        self.trunc
    }

    pub fn from_component(
        owner: &Arc<DglaPresentation>,
        degree: i64,
        coeffs: Vec<ArtinianSeries>,
    ) -> Self {
        let trunc = coeffs.first().map(|c| c.truncation_order()).expect("nonempty coefficients");
        assert_eq!(coeffs.len(), owner.dim(degree), "component dimension mismatch");
        let mut e = GradedElement::zero(owner, trunc);
        e.components.insert(degree, coeffs);
        e
    }

    pub fn component(&self, degree: i64) -> Vec<ArtinianSeries> {
        self.components
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| vec![ArtinianSeries::zero(self.trunc); self.owner.dim(degree)])
    }

    pub fn set_coeff(&mut self, at: BasisRef, value: ArtinianSeries) {
        assert_eq!(value.truncation_order(), self.trunc, "mixed truncation orders");
        let dim = self.owner.dim(at.0);
        assert!(at.1 < dim, "basis index out of range");
        let comp = self
            .components
            .entry(at.0)
            .or_insert_with(|| vec![ArtinianSeries::zero(self.trunc); dim]);
        comp[at.1] = value;
    }

    pub fn coeff(&self, at: BasisRef) -> ArtinianSeries {
        self.components
            .get(&at.0)
            .map(|v| v[at.1].clone())
            .unwrap_or_else(|| ArtinianSeries::zero(self.trunc))
    }

    pub fn degrees_present(&self) -> Vec<i64> {
        self.components.keys().copied().collect()
    }

    /// True when the element is homogeneous of the given degree (or zero).
    pub fn is_homogeneous(&self, degree: i64) -> bool {
        self.components
            .iter()
            .all(|(d, v)| *d == degree || v.iter().all(|c| c.is_zero()))
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(|v| v.iter().all(|c| c.is_zero()))
    }

    pub fn in_maximal_ideal(&self) -> bool {
        self.components.values().all(|v| v.iter().all(|c| c.in_maximal_ideal()))
    }

    fn check_compatible(&self, other: &GradedElement) {
        assert_eq!(self.owner.name, other.owner.name, "elements of different DGLAs");
        assert_eq!(self.trunc, other.trunc, "mixed truncation orders");
    }

    pub fn add(&self, other: &GradedElement) -> GradedElement {
        self.check_compatible(other);
        let mut out = self.clone();
        for (deg, v) in &other.components {
            let dim = out.owner.dim(*deg);
            let comp = out
                .components
                .entry(*deg)
                .or_insert_with(|| vec![ArtinianSeries::zero(self.trunc); dim]);
            for (i, c) in v.iter().enumerate() {
                comp[i] = comp[i].add(c);
            }
        }
        out
    }

    pub fn sub(&self, other: &GradedElement) -> GradedElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedElement {
        let mut out = self.clone();
        for v in out.components.values_mut() {
            for c in v.iter_mut() {
                *c = c.neg();
            }
        }
        out
    }

    pub fn scale(&self, s: &ArtinianSeries) -> GradedElement {
        let mut out = self.clone();
        for v in out.components.values_mut() {
            for c in v.iter_mut() {
                *c = c.mul(s);
            }
        }
        out
    }

    pub fn scale_scalar(&self, s: &ExactScalar) -> GradedElement {
        let mut out = self.clone();
        for v in out.components.values_mut() {
            for c in v.iter_mut() {
                *c = c.scale(s);
            }
        }
        out
    }

    /// Apply the differential.
    pub fn d(&self) -> GradedElement {
        let mut out = GradedElement::zero(&self.owner, self.trunc);
        for (deg, v) in &self.components {
            for (idx, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (k, s) in self.owner.d_basis((*deg, idx)) {
                    let cur = out.coeff((deg + 1, k));
                    out.set_coeff((deg + 1, k), cur.add(&c.scale(&s)));
                }
            }
        }
        out
    }

    /// Graded bracket, truncated to the presented degree window.
    pub fn bracket(&self, other: &GradedElement) -> GradedElement {
        self.check_compatible(other);
        let mut out = GradedElement::zero(&self.owner, self.trunc);
        for (da, va) in &self.components {
            for (ia, ca) in va.iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                for (db, vb) in &other.components {
                    for (ib, cb) in vb.iter().enumerate() {
                        if cb.is_zero() {
                            continue;
                        }
                        let terms = self.owner.bracket_basis((*da, ia), (*db, ib));
                        if terms.is_empty() {
                            continue;
                        }
                        let prod = ca.mul(cb);
                        for (k, s) in terms {
                            let cur = out.coeff((da + db, *k));
                            out.set_coeff((da + db, *k), cur.add(&prod.scale(s)));
                        }
                    }
                }
            }
        }
        out
    }

    /// Strip all coefficients down to the single ħ-order `k`, as exact
    /// scalars per basis slot.
    pub fn order_part(&self, k: i64) -> BTreeMap<i64, Vec<ExactScalar>> {
        let mut out = BTreeMap::new();
        for (deg, v) in &self.components {
            let vec: Vec<ExactScalar> = v.iter().map(|c| c.coeff(k)).collect();
            if vec.iter().any(|c| !c.is_zero()) {
                out.insert(*deg, vec);
            }
        }
        out
    }

    /// First ħ-order at which the element is nonzero, if any.
    pub fn lowest_order(&self) -> Option<i64> {
        let mut best: Option<i64> = None;
        for v in self.components.values() {
            for c in v {
                if c.is_zero() {
                    continue;
                }
                for k in -(c.pole_order() as i64)..=c.truncation_order() {
                    if !c.coeff(k).is_zero() {
                        best = Some(best.map_or(k, |b: i64| b.min(k)));
                        break;
                    }
                }
            }
        }
        best
    }

    /// Zero out every ħ-order strictly above `k`.
    pub fn truncate_above(&self, k: i64) -> GradedElement {
        let mut out = self.clone();
        for v in out.components.values_mut() {
            for c in v.iter_mut() {
                let mut nc = ArtinianSeries::zero(self.trunc);
                for j in -(c.pole_order() as i64)..=k.min(self.trunc) {
                    nc.set_coeff(j, c.coeff(j));
                }
                *c = nc;
            }
        }
        out
    }

    pub fn eq_value(&self, other: &GradedElement) -> bool {
        self.sub(other).is_zero()
    }
}

impl std::fmt::Debug for GradedElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GradedElement[{}]{{", self.owner.name)?;
        for (deg, v) in &self.components {
            for (i, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    write!(f, " ({deg},{i}): {c:?};")?;
                }
            }
        }
        write!(f, " }}")
    }
}

// ---------------------------------------------------------------------------
// Campbell–Dynkin–Hausdorff machinery.
//
// Products of exponentials are computed in the free associative algebra on
// two symbols, truncated at word length N (exact, because arguments lie in
// 𝔪 and 𝔪^{N+1} = 0), then rewritten as iterated brackets through the
// Dynkin idempotent and evaluated with the actual structure constants.
// No BCH coefficient table is transcribed anywhere.
// ---------------------------------------------------------------------------

type FreeElt = BTreeMap<Vec<u8>, BigRational>;

fn free_mul(a: &FreeElt, b: &FreeElt, maxlen: usize) -> FreeElt {
    let mut out = FreeElt::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if wa.len() + wb.len() > maxlen {
                continue;
            }
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            let slot = out.entry(w).or_insert_with(BigRational::zero);
            *slot += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn free_exp(sym: u8, maxlen: usize) -> FreeElt {
    let mut out = FreeElt::new();
    out.insert(Vec::new(), BigRational::one());
    let mut fact = BigRational::one();
    for k in 1..=maxlen {
        fact = fact * BigRational::from_integer(k.into());
        out.insert(vec![sym; k], fact.recip());
    }
    out
}

/// log(1 + u) where u has no constant term.
fn free_log(a: &FreeElt, maxlen: usize) -> FreeElt {
    let mut u = a.clone();
    let c0 = u.remove(&Vec::new()).unwrap_or_else(BigRational::zero);
    assert!(c0.is_one(), "free log requires constant term 1");
    let mut out = FreeElt::new();
    let mut power = FreeElt::new();
    power.insert(Vec::new(), BigRational::one());
    for k in 1..=maxlen as i64 {
        power = free_mul(&power, &u, maxlen);
        if power.is_empty() {
            break;
        }
        let sign = if k % 2 == 1 { BigRational::one() } else { -BigRational::one() };
        let coeff = sign / BigRational::from_integer(k.into());
        for (w, c) in &power {
            let slot = out.entry(w.clone()).or_insert_with(BigRational::zero);
            *slot += c * &coeff;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Evaluate a free Lie-series through the Dynkin idempotent: each word
/// x₁⋯x_k contributes (c/k)·[…[[x₁,x₂],x₃]…,x_k] under the given bracket.
fn dynkin_eval<B>(series: &FreeElt, args: &[&GradedElement], bracket: &B) -> GradedElement
where
    B: Fn(&GradedElement, &GradedElement) -> GradedElement,
{
    let owner = args[0].owner.clone();
    let trunc = args[0].truncation_order();
    let mut out = GradedElement::zero(&owner, trunc);
    for (word, coeff) in series {
        if word.is_empty() {
            continue;
        }
        let mut acc = args[word[0] as usize].clone();
        for sym in &word[1..] {
            acc = bracket(&acc, args[*sym as usize]);
        }
        let k = BigRational::from_integer(word.len().into());
        let scaled = acc.scale_scalar(&ExactScalar::from_rational(coeff / k));
        out = out.add(&scaled);
    }
    out
}

/// Campbell–Dynkin–Hausdorff product for the given (bi)bracket: the Z with
/// exp(Z) = exp(X)·exp(Y), exact by nilpotency of 𝔪.
pub fn bch_with<B>(x: &GradedElement, y: &GradedElement, bracket: &B) -> GradedElement
where
    B: Fn(&GradedElement, &GradedElement) -> GradedElement,
{
    x.check_compatible(y);
    let maxlen = (x.truncation_order().max(0) as usize).max(1);
    let prod = free_mul(&free_exp(0, maxlen), &free_exp(1, maxlen), maxlen);
    let log = free_log(&prod, maxlen);
    dynkin_eval(&log, &[x, y], bracket)
}

/// BCH product in degree 0 with the algebra's own bracket.
///
/// Both arguments must be degree-0 elements with coefficients in 𝔪.
pub fn bch(x: &GradedElement, y: &GradedElement) -> Result<GradedElement, Error> {
    for e in [x, y] {
        if !e.is_homogeneous(0) {
            return Err(Error::DegreeMismatch("bch arguments must have degree 0".into()));
        }
        if !e.in_maximal_ideal() {
            return Err(Error::Domain("bch arguments must lie in the maximal ideal".into()));
        }
    }
    Ok(bch_with(x, y, &|a, b| a.bracket(b)))
}

/// Σ_{k≥0} ad(X)^k(target)/k!, a finite sum by nilpotency of 𝔪.
pub fn exp_ad(x: &GradedElement, target: &GradedElement) -> Result<GradedElement, Error> {
    if !x.is_homogeneous(0) {
        return Err(Error::DegreeMismatch("exp_ad direction must have degree 0".into()));
    }
    if !x.in_maximal_ideal() {
        return Err(Error::Domain("exp_ad direction must lie in the maximal ideal".into()));
    }
    let mut out = target.clone();
    let mut term = target.clone();
    let mut fact = BigRational::one();
    for k in 1..=(x.truncation_order() + 1) {
        term = x.bracket(&term);
        if term.is_zero() {
            break;
        }
        fact = fact * BigRational::from_integer(k.into());
        out = out.add(&term.scale_scalar(&ExactScalar::from_rational(fact.recip())));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Serialization: degrees, dims, dense differential matrices (row-major,
// rational strings), bracket as sparse entries.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct BracketEntryWire {
    a: (i64, usize),
    b: (i64, usize),
    out: usize,
    c: ExactScalar,
}

#[derive(Serialize, Deserialize)]
struct DglaWire {
    name: String,
    degrees: (i64, i64),
    dims: Vec<usize>,
    differential: BTreeMap<i64, Vec<Vec<String>>>,
    bracket: Vec<BracketEntryWire>,
}

impl Serialize for DglaPresentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let differential = self
            .differential
            .iter()
            .map(|(deg, m)| {
                let rows = (0..m.rows)
                    .map(|r| {
                        (0..m.cols)
                            .map(|c| {
                                let v = m.at(r, c);
                                assert!(v.im.is_zero(), "differential entries are rational");
                                rational_to_string(&v.re)
                            })
                            .collect()
                    })
                    .collect();
                (*deg, rows)
            })
            .collect();
        let bracket = self
            .bracket
            .iter()
            .flat_map(|((a, b), terms)| {
                terms.iter().map(move |(out, c)| BracketEntryWire {
                    a: *a,
                    b: *b,
                    out: *out,
                    c: c.clone(),
                })
            })
            .collect();
        DglaWire {
            name: self.name.clone(),
            degrees: (self.lo, self.hi),
            dims: self.dims.clone(),
            differential,
            bracket,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DglaPresentation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = DglaWire::deserialize(d)?;
        let (lo, hi) = w.degrees;
        if hi < lo || w.dims.len() as i64 != hi - lo + 1 {
            return Err(D::Error::custom("degree range and dims disagree"));
        }
        let mut b = DglaBuilder::new(&w.name, lo, hi, &w.dims);
        for (deg, rows) in &w.differential {
            let target = if *deg + 1 <= hi { w.dims[(*deg + 1 - lo) as usize] } else { 0 };
            let source = w.dims[(*deg - lo) as usize];
            if rows.len() != target || rows.iter().any(|r| r.len() != source) {
                return Err(D::Error::custom(format!("differential at degree {deg} has wrong shape")));
            }
            let mut m = Matrix::zero(target, source);
            for (r, row) in rows.iter().enumerate() {
                for (c, cell) in row.iter().enumerate() {
                    *m.at_mut(r, c) = ExactScalar::from_rational(
                        rational_from_string(cell).map_err(D::Error::custom)?,
                    );
                }
            }
            b = b.set_differential(*deg, m);
        }
        for e in w.bracket {
            if e.a.0 < lo || e.a.0 > hi || e.b.0 < lo || e.b.0 > hi {
                return Err(D::Error::custom("bracket entry degree out of range"));
            }
            b = b.add_bracket(e.a, e.b, e.out, e.c);
        }
        Ok(Arc::try_unwrap(b.build()).unwrap_or_else(|arc| (*arc).clone()))
    }
}

/// Small reference presentations used across the test suites and as CLI
/// demo inputs.
pub mod fixtures {
    use super::*;

    /// Abelian DGLA with prescribed dims and zero differential.
    pub fn abelian(name: &str, lo: i64, hi: i64, dims: &[usize]) -> Arc<DglaPresentation> {
        DglaBuilder::new(name, lo, hi, dims).build()
    }

    /// The 3-dimensional simple Lie algebra (e, f, h) in degree 0, d = 0:
    /// [h,e] = 2e, [h,f] = −2f, [e,f] = h.
    pub fn sl2(name: &str) -> Arc<DglaPresentation> {
        // basis order: e=0, f=1, h=2
        DglaBuilder::new(name, -1, 2, &[0, 3, 0, 0])
            .add_bracket_sym((0, 2), (0, 0), 0, ExactScalar::from_int(2))
            .add_bracket_sym((0, 2), (0, 1), 1, ExactScalar::from_int(-2))
            .add_bracket_sym((0, 0), (0, 1), 2, ExactScalar::one())
            .build()
    }

    /// Heisenberg algebra in degree 0: [x, y] = z, z central.
    pub fn heisenberg(name: &str) -> Arc<DglaPresentation> {
        DglaBuilder::new(name, -1, 2, &[0, 3, 0, 0])
            .add_bracket_sym((0, 0), (0, 1), 2, ExactScalar::one())
            .build()
    }

    /// End(V₀ ⊕ V₁) with the graded commutator: maps V_j → V_i sit in
    /// degree i − j, so the presentation is concentrated in −1..1 and has
    /// nothing below −1. Jacobi holds because the bracket comes from an
    /// associative product. With `inner_d`, the differential is ad(F) for
    /// F the first degree-1 matrix unit (F² = 0, so d² = 0).
    pub fn graded_gl2(name: &str, d0: usize, d1: usize, inner_d: bool) -> Arc<DglaPresentation> {
        // basis refs: degree −1: V₁→V₀ units (a,b) ↦ a·d1 + b
        //             degree 0:  V₀→V₀ then V₁→V₁ blocks
        //             degree 1:  V₀→V₁ units (a,b) ↦ a·d0 + b
        #[derive(Clone, Copy, PartialEq)]
        struct Unit {
            row_grade: usize,
            row: usize,
            col_grade: usize,
            col: usize,
        }
        let enumerate = |deg: i64| -> Vec<Unit> {
            let mut v = Vec::new();
            for (rg, cg) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
                if rg as i64 - cg as i64 != deg {
                    continue;
                }
                let (rows, cols) = (if rg == 0 { d0 } else { d1 }, if cg == 0 { d0 } else { d1 });
                for row in 0..rows {
                    for col in 0..cols {
                        v.push(Unit { row_grade: rg, row, col_grade: cg, col });
                    }
                }
            }
            v
        };
        let degree_basis: Vec<(i64, Vec<Unit>)> =
            (-1..=1).map(|deg| (deg, enumerate(deg))).collect();
        let dims: Vec<usize> = vec![
            degree_basis[0].1.len(),
            degree_basis[1].1.len(),
            degree_basis[2].1.len(),
            0,
        ];
        let mut b = DglaBuilder::new(name, -1, 2, &dims);
        let find = |deg: i64, u: Unit| -> usize {
            degree_basis[(deg + 1) as usize].1.iter().position(|x| *x == u).unwrap()
        };
        let compose = |x: Unit, y: Unit| -> Option<Unit> {
            (x.col_grade == y.row_grade && x.col == y.row).then_some(Unit {
                row_grade: x.row_grade,
                row: x.row,
                col_grade: y.col_grade,
                col: y.col,
            })
        };
        for (da, units_a) in &degree_basis {
            for (ia, ua) in units_a.iter().enumerate() {
                for (db, units_b) in &degree_basis {
                    if da + db < -1 || da + db > 2 {
                        continue;
                    }
                    for (ib, ub) in units_b.iter().enumerate() {
                        // [a, b] = ab − (−1)^{|a||b|} ba
                        if let Some(p) = compose(*ua, *ub) {
                            b = b.add_bracket((*da, ia), (*db, ib), find(da + db, p), ExactScalar::one());
                        }
                        if let Some(p) = compose(*ub, *ua) {
                            let sign = if (da * db).rem_euclid(2) == 0 { -1 } else { 1 };
                            b = b.add_bracket(
                                (*da, ia),
                                (*db, ib),
                                find(da + db, p),
                                ExactScalar::from_int(sign),
                            );
                        }
                    }
                }
            }
        }
        if inner_d {
            // d := ad(F) for F = E_{(1,0),(0,0)}
            let f = Unit { row_grade: 1, row: 0, col_grade: 0, col: 0 };
            for (deg, units) in &degree_basis {
                if *deg + 1 > 1 {
                    continue;
                }
                let target_dim = degree_basis[(*deg + 2) as usize].1.len();
                let mut m = Matrix::zero(target_dim, units.len());
                for (i, u) in units.iter().enumerate() {
                    if let Some(p) = compose(f, *u) {
                        let slot = find(deg + 1, p);
                        let cur = m.at(slot, i) + &ExactScalar::one();
                        *m.at_mut(slot, i) = cur;
                    }
                    if let Some(p) = compose(*u, f) {
                        let sign = if deg.rem_euclid(2) == 0 { -1 } else { 1 };
                        let slot = find(deg + 1, p);
                        let cur = m.at(slot, i) + &ExactScalar::from_int(sign);
                        *m.at_mut(slot, i) = cur;
                    }
                }
                b = b.set_differential(*deg, m);
            }
        }
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::ExactScalar;

    fn series_h(trunc: i64) -> ArtinianSeries {
        ArtinianSeries::monomial(ExactScalar::one(), 1, trunc)
    }

    #[test]
    fn validate_abelian_with_differential() {
        // d: L^0 → L^1 arbitrary, d² = 0 because L^2 part vanishes
        let mut m = Matrix::zero(1, 1);
        *m.at_mut(0, 0) = ExactScalar::from_int(3);
        let l = DglaBuilder::new("ab", -1, 2, &[1, 1, 1, 0]).set_differential(0, m).build();
        assert!(validate_dgla(&l).all_pass());
    }

    #[test]
    fn validate_sl2_brute_force() {
        // structure constants of e, f, h checked by brute force over triples
        let l = fixtures::sl2("sl2");
        let r = validate_dgla(&l);
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn corrupted_jacobi_reports_witness() {
        // sl2 with one corrupted constant: [e,f] = h + e breaks Jacobi
        let l = DglaBuilder::new("bad", -1, 2, &[0, 3, 0, 0])
            .add_bracket_sym((0, 2), (0, 0), 0, ExactScalar::from_int(2))
            .add_bracket_sym((0, 2), (0, 1), 1, ExactScalar::from_int(-2))
            .add_bracket_sym((0, 0), (0, 1), 2, ExactScalar::one())
            .add_bracket_sym((0, 0), (0, 1), 0, ExactScalar::one())
            .build();
        let r = validate_dgla(&l);
        assert!(!r.jacobi.pass);
        assert!(r.jacobi.witness.is_some());
    }

    #[test]
    fn bch_neutral_and_commuting() {
        let l = fixtures::heisenberg("h3");
        let trunc = 2;
        let mut x = GradedElement::zero(&l, trunc);
        x.set_coeff((0, 0), series_h(trunc));
        let zero = GradedElement::zero(&l, trunc);
        assert!(bch(&x, &zero).unwrap().eq_value(&x));
        // central directions commute: bch(x, z) = x + z
        let mut z = GradedElement::zero(&l, trunc);
        z.set_coeff((0, 2), series_h(trunc));
        assert!(bch(&x, &z).unwrap().eq_value(&x.add(&z)));
    }

    #[test]
    fn bch_heisenberg_matches_matrix_oracle() {
        // oracle: exp(ħE12)exp(ħE23) = I + ħE12 + ħE23 + ħ²E13, whose log
        // is ħE12 + ħE23 + ½ħ²E13; so bch(ħx, ħy) = ħx + ħy + ½ħ²z.
        let l = fixtures::heisenberg("h3");
        let trunc = 2;
        let mut x = GradedElement::zero(&l, trunc);
        x.set_coeff((0, 0), series_h(trunc));
        let mut y = GradedElement::zero(&l, trunc);
        y.set_coeff((0, 1), series_h(trunc));
        let z = bch(&x, &y).unwrap();
        let mut expect = x.add(&y);
        expect.set_coeff(
            (0, 2),
            ArtinianSeries::monomial(ExactScalar::from_ratio(1, 2), 2, trunc),
        );
        assert!(z.eq_value(&expect));
    }

    #[test]
    fn bch_associativity_randomized() {
        use rand::{Rng, SeedableRng};
        let l = fixtures::sl2("sl2");
        let trunc = 3;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut rand_elt = || {
            let mut e = GradedElement::zero(&l, trunc);
            for i in 0..3 {
                let mut s = ArtinianSeries::zero(trunc);
                for k in 1..=trunc {
                    s.set_coeff(k, ExactScalar::from_ratio(rng.gen_range(-4i64..=4), 1));
                }
                e.set_coeff((0, i), s);
            }
            e
        };
        for _ in 0..10 {
            let (x, y, z) = (rand_elt(), rand_elt(), rand_elt());
            let left = bch(&bch(&x, &y).unwrap(), &z).unwrap();
            let right = bch(&x, &bch(&y, &z).unwrap()).unwrap();
            assert!(left.eq_value(&right));
            // inverse: bch(x, −x) = 0
            assert!(bch(&x, &x.neg()).unwrap().is_zero());
        }
    }

    #[test]
    fn exp_ad_matches_matrix_conjugation() {
        // In sl2 ≅ traceless 2×2 matrices: e=E12, f=E21, h=E11−E22.
        // exp_ad(X, v) must equal exp(X)·v·exp(−X) coefficientwise.
        use rand::{Rng, SeedableRng};
        let l = fixtures::sl2("sl2");
        let trunc = 3;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);

        // 2×2 matrices over the truncated series ring
        type M2 = [[ArtinianSeries; 2]; 2];
        let zero2 = |t: i64| -> M2 {
            [
                [ArtinianSeries::zero(t), ArtinianSeries::zero(t)],
                [ArtinianSeries::zero(t), ArtinianSeries::zero(t)],
            ]
        };
        let mat_mul = |a: &M2, b: &M2| -> M2 {
            let mut out = zero2(trunc);
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        out[i][j] = out[i][j].add(&a[i][k].mul(&b[k][j]));
                    }
                }
            }
            out
        };
        let to_matrix = |e: &GradedElement| -> M2 {
            let mut m = zero2(trunc);
            let ce = e.coeff((0, 0));
            let cf = e.coeff((0, 1));
            let ch = e.coeff((0, 2));
            m[0][1] = ce;
            m[1][0] = cf;
            m[0][0] = ch.clone();
            m[1][1] = ch.neg();
            m
        };
        let mat_exp = |x: &M2| -> M2 {
            let mut out = zero2(trunc);
            out[0][0] = ArtinianSeries::one(trunc);
            out[1][1] = ArtinianSeries::one(trunc);
            let mut term = out.clone();
            let mut fact = 1i64;
            for k in 1..=(trunc + 1) {
                term = mat_mul(&term, x);
                fact *= k;
                let inv = ExactScalar::from_ratio(1, fact);
                let mut any = false;
                for i in 0..2 {
                    for j in 0..2 {
                        let t = term[i][j].scale(&inv);
                        if !t.is_zero() {
                            any = true;
                        }
                        out[i][j] = out[i][j].add(&t);
                    }
                }
                if !any {
                    break;
                }
            }
            out
        };

        let mut rand_elt = || {
            let mut e = GradedElement::zero(&l, trunc);
            for i in 0..3 {
                let mut s = ArtinianSeries::zero(trunc);
                for k in 1..=trunc {
                    s.set_coeff(k, ExactScalar::from_ratio(rng.gen_range(-3i64..=3), 1));
                }
                e.set_coeff((0, i), s);
            }
            e
        };
        for _ in 0..8 {
            let x = rand_elt();
            let v = rand_elt();
            let lhs = to_matrix(&exp_ad(&x, &v).unwrap());
            let ex = mat_exp(&to_matrix(&x));
            let exn = mat_exp(&to_matrix(&x.neg()));
            let rhs = mat_mul(&ex, &mat_mul(&to_matrix(&v), &exn));
            for i in 0..2 {
                for j in 0..2 {
                    assert!(lhs[i][j].eq_value(&rhs[i][j]));
                }
            }
        }
    }

    #[test]
    fn exp_ad_trivial_cases() {
        let l = fixtures::heisenberg("h3");
        let mut v = GradedElement::zero(&l, 2);
        v.set_coeff((0, 1), ArtinianSeries::one(2));
        let zero = GradedElement::zero(&l, 2);
        assert!(exp_ad(&zero, &v).unwrap().eq_value(&v));
        // abelian: target unchanged
        let ab = fixtures::abelian("ab", -1, 2, &[1, 2, 1, 1]);
        let mut x = GradedElement::zero(&ab, 2);
        x.set_coeff((0, 0), series_h(2));
        let mut w = GradedElement::zero(&ab, 2);
        w.set_coeff((1, 0), ArtinianSeries::one(2));
        assert!(exp_ad(&x, &w).unwrap().eq_value(&w));
    }

    #[test]
    fn exp_ad_group_action_and_automorphism() {
        use rand::{Rng, SeedableRng};
        let l = fixtures::sl2("sl2");
        let trunc = 2;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut rand_elt = |ideal: bool| {
            let mut e = GradedElement::zero(&l, trunc);
            for i in 0..3 {
                let mut s = ArtinianSeries::zero(trunc);
                let lo = if ideal { 1 } else { 0 };
                for k in lo..=trunc {
                    s.set_coeff(k, ExactScalar::from_ratio(rng.gen_range(-3i64..=3), 1));
                }
                e.set_coeff((0, i), s);
            }
            e
        };
        for _ in 0..6 {
            let x = rand_elt(true);
            let y = rand_elt(true);
            let v = rand_elt(false);
            let u = rand_elt(false);
            // exp_ad(bch(x,y), v) = exp_ad(x, exp_ad(y, v))
            let lhs = exp_ad(&bch(&x, &y).unwrap(), &v).unwrap();
            let rhs = exp_ad(&x, &exp_ad(&y, &v).unwrap()).unwrap();
            assert!(lhs.eq_value(&rhs));
            // automorphism: exp_ad(x, [u,v]) = [exp_ad(x,u), exp_ad(x,v)]
            let lhs2 = exp_ad(&x, &u.bracket(&v)).unwrap();
            let rhs2 = exp_ad(&x, &u).unwrap().bracket(&exp_ad(&x, &v).unwrap());
            assert!(lhs2.eq_value(&rhs2));
        }
    }

    #[test]
    fn presentation_round_trip() {
        let l = fixtures::sl2("sl2");
        let json = serde_json::to_string(&*l).unwrap();
        let back: DglaPresentation = serde_json::from_str(&json).unwrap();
        assert_eq!(back.name, l.name);
        assert_eq!(back.dims, l.dims);
        assert!(validate_dgla(&back).all_pass());
        let json2 = serde_json::to_string(&back).unwrap();
        assert_eq!(json, json2);
    }
}
