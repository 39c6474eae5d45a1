//! Hochschild cochains of a finite-dimensional associative algebra, the
//! Gerstenhaber bracket, the differential δ = [m, ·], the contraction i_R,
//! and the bridge between Maurer-Cartan elements and deformed products.
//!
//! Sign conventions are pinned by three derived requirements rather than a
//! transcribed table: δ² = 0, δ agrees with the three-term formula up to a
//! degree sign, and Maurer-Cartan elements of the shifted complex are
//! exactly the associativity deformations. The DGLA degree of a k-cochain
//! is k − 1 throughout.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dgla::{DglaBuilder, DglaPresentation, GradedElement};
use crate::linalg::Matrix;
use crate::scalars::{ArtinianSeries, ExactScalar};
use crate::Error;

/// A finite-dimensional unital algebra given by structure constants.
#[derive(Clone, Serialize, Deserialize)]
pub struct AlgebraPresentation {
    pub name: String,
    pub dim: usize,
    /// coordinates of the unit element
    pub unit: Vec<ExactScalar>,
    /// sparse structure constants: mult[(a,b)] = Σ c·e_k
    pub mult: BTreeMap<(usize, usize), Vec<(usize, ExactScalar)>>,
}

impl AlgebraPresentation {
    pub fn new(name: &str, dim: usize, unit: Vec<ExactScalar>) -> Self {
        assert_eq!(unit.len(), dim);
        AlgebraPresentation { name: name.to_string(), dim, unit, mult: BTreeMap::new() }
    }

    pub fn set_product(&mut self, a: usize, b: usize, terms: Vec<(usize, ExactScalar)>) {
        self.mult.insert((a, b), terms);
    }

    /// Product of two basis vectors as a sparse vector.
    pub fn product_basis(&self, a: usize, b: usize) -> &[(usize, ExactScalar)] {
        self.mult.get(&(a, b)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Product of coordinate vectors over the scalar field.
    pub fn product(&self, x: &[ExactScalar], y: &[ExactScalar]) -> Vec<ExactScalar> {
        let mut out = vec![ExactScalar::zero(); self.dim];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                for (k, c) in self.product_basis(a, b) {
                    let p = &(xa * yb) * c;
                    out[*k] += &p;
                }
            }
        }
        out
    }

    /// Product of coordinate vectors over the series ring.
    pub fn product_series(&self, x: &[ArtinianSeries], y: &[ArtinianSeries]) -> Vec<ArtinianSeries> {
        let trunc = x[0].truncation_order();
        let mut out = vec![ArtinianSeries::zero(trunc); self.dim];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let prod = xa.mul(yb);
                for (k, c) in self.product_basis(a, b) {
                    out[*k] = out[*k].add(&prod.scale(c));
                }
            }
        }
        out
    }

    /// Two-sided unit and associativity on all basis triples; failures are
    /// reported, not raised, so deliberately crooked tables can be studied.
    pub fn validate(&self) -> AlgebraReport {
        let mut unit_ok = true;
        let mut unit_witness = None;
        for a in 0..self.dim {
            let mut ea = vec![ExactScalar::zero(); self.dim];
            ea[a] = ExactScalar::one();
            let left = self.product(&self.unit, &ea);
            let right = self.product(&ea, &self.unit);
            if left != ea || right != ea {
                unit_ok = false;
                unit_witness = Some(format!("unit fails on basis {a}"));
                break;
            }
        }
        let mut assoc_ok = true;
        let mut assoc_witness = None;
        'outer: for a in 0..self.dim {
            for b in 0..self.dim {
                for c in 0..self.dim {
                    if !self.associator_vanishes(a, b, c) {
                        assoc_ok = false;
                        assoc_witness = Some(format!("associator nonzero on ({a},{b},{c})"));
                        break 'outer;
                    }
                }
            }
        }
        AlgebraReport {
            unit: crate::dgla::Check { pass: unit_ok, witness: unit_witness },
            associativity: crate::dgla::Check { pass: assoc_ok, witness: assoc_witness },
        }
    }

    fn associator_vanishes(&self, a: usize, b: usize, c: usize) -> bool {
        let mut ea = vec![ExactScalar::zero(); self.dim];
        ea[a] = ExactScalar::one();
        let mut eb = vec![ExactScalar::zero(); self.dim];
        eb[b] = ExactScalar::one();
        let mut ec = vec![ExactScalar::zero(); self.dim];
        ec[c] = ExactScalar::one();
        let left = self.product(&self.product(&ea, &eb), &ec);
        let right = self.product(&ea, &self.product(&eb, &ec));
        left == right
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub unit: crate::dgla::Check,
    pub associativity: crate::dgla::Check,
}

impl AlgebraReport {
    pub fn all_pass(&self) -> bool {
        self.unit.pass && self.associativity.pass
    }
}

/// A degree-k multilinear map A^{⊗k} → A ⊗ 𝔞, stored as a sparse tensor:
/// basis argument tuple ↦ coefficient vector of series.
#[derive(Clone)]
pub struct HochschildCochain {
    pub algebra: Arc<AlgebraPresentation>,
    /// number of arguments k ≥ 0
    pub degree: usize,
    trunc: i64,
    tensor: BTreeMap<Vec<usize>, Vec<ArtinianSeries>>,
    pub normalized: bool,
}

impl HochschildCochain {
    pub fn zero(algebra: &Arc<AlgebraPresentation>, degree: usize, trunc: i64) -> Self {
        HochschildCochain {
            algebra: algebra.clone(),
            degree,
            trunc,
            tensor: BTreeMap::new(),
            normalized: false,
        }
    }

    pub fn truncation_order(&self) -> i64 {
        self.trunc
    }

    /// DGLA degree of the cochain in the shifted complex C^{•+1}.
    pub fn dgla_degree(&self) -> i64 {
        self.degree as i64 - 1
    }

    pub fn set_value(&mut self, args: Vec<usize>, value: Vec<ArtinianSeries>) {
        assert_eq!(args.len(), self.degree);
        assert_eq!(value.len(), self.algebra.dim);
        if value.iter().all(|v| v.is_zero()) {
            self.tensor.remove(&args);
        } else {
            self.tensor.insert(args, value);
        }
    }

    pub fn add_term(&mut self, args: &[usize], out: usize, coeff: &ArtinianSeries) {
        assert_eq!(args.len(), self.degree);
        let dim = self.algebra.dim;
        let trunc = self.trunc;
        let slot = self
            .tensor
            .entry(args.to_vec())
            .or_insert_with(|| vec![ArtinianSeries::zero(trunc); dim]);
        slot[out] = slot[out].add(coeff);
    }

    pub fn value(&self, args: &[usize]) -> Vec<ArtinianSeries> {
        self.tensor
            .get(args)
            .cloned()
            .unwrap_or_else(|| vec![ArtinianSeries::zero(self.trunc); self.algebra.dim])
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Vec<ArtinianSeries>)> {
        self.tensor.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.tensor.values().all(|v| v.iter().all(|c| c.is_zero()))
    }

    pub fn in_maximal_ideal(&self) -> bool {
        self.tensor.values().all(|v| v.iter().all(|c| c.in_maximal_ideal()))
    }

    pub fn add(&self, other: &HochschildCochain) -> HochschildCochain {
        assert_eq!(self.degree, other.degree, "cochain degree mismatch");
        assert_eq!(self.trunc, other.trunc, "mixed truncation orders");
        let mut out = self.clone();
        out.normalized = self.normalized && other.normalized;
        for (k, v) in &other.tensor {
            let dim = out.algebra.dim;
            let trunc = out.trunc;
            let slot = out
                .tensor
                .entry(k.clone())
                .or_insert_with(|| vec![ArtinianSeries::zero(trunc); dim]);
            for (i, c) in v.iter().enumerate() {
                slot[i] = slot[i].add(c);
            }
        }
        out.prune();
        out
    }

    pub fn neg(&self) -> HochschildCochain {
        self.scale_scalar(&ExactScalar::from_int(-1))
    }

    pub fn sub(&self, other: &HochschildCochain) -> HochschildCochain {
        self.add(&other.neg())
    }

    pub fn scale_scalar(&self, s: &ExactScalar) -> HochschildCochain {
        let mut out = self.clone();
        for v in out.tensor.values_mut() {
            for c in v.iter_mut() {
                *c = c.scale(s);
            }
        }
        out
    }

    pub fn scale(&self, s: &ArtinianSeries) -> HochschildCochain {
        let mut out = self.clone();
        for v in out.tensor.values_mut() {
            for c in v.iter_mut() {
                *c = c.mul(s);
            }
        }
        out
    }

    fn prune(&mut self) {
        self.tensor.retain(|_, v| v.iter().any(|c| !c.is_zero()));
    }

    /// Multilinear evaluation on coordinate vectors over the series ring.
    pub fn evaluate(&self, args: &[Vec<ArtinianSeries>]) -> Vec<ArtinianSeries> {
        assert_eq!(args.len(), self.degree);
        let mut out = vec![ArtinianSeries::zero(self.trunc); self.algebra.dim];
        for (key, val) in &self.tensor {
            let mut factor = ArtinianSeries::one(self.trunc);
            let mut dead = false;
            for (slot, basis) in key.iter().enumerate() {
                let c = &args[slot][*basis];
                if c.is_zero() {
                    dead = true;
                    break;
                }
                factor = factor.mul(c);
            }
            if dead {
                continue;
            }
            for (i, v) in val.iter().enumerate() {
                out[i] = out[i].add(&v.mul(&factor));
            }
        }
        out
    }

    /// True iff the cochain vanishes whenever any argument is the unit.
    pub fn check_normalized(&self) -> bool {
        if self.degree == 0 {
            return true;
        }
        let dim = self.algebra.dim;
        let unit = self.algebra.unit.clone();
        // for each slot and each basis tuple of the remaining arguments,
        // Σ_b unit_b · D(…, b at slot, …) must vanish
        let rest = self.degree - 1;
        let mut tuple = vec![0usize; rest];
        loop {
            for slot in 0..self.degree {
                let mut acc = vec![ArtinianSeries::zero(self.trunc); dim];
                for (b, ub) in unit.iter().enumerate() {
                    if ub.is_zero() {
                        continue;
                    }
                    let mut key = Vec::with_capacity(self.degree);
                    key.extend_from_slice(&tuple[..slot]);
                    key.push(b);
                    key.extend_from_slice(&tuple[slot..]);
                    if let Some(v) = self.tensor.get(&key) {
                        for (i, c) in v.iter().enumerate() {
                            acc[i] = acc[i].add(&c.scale(ub));
                        }
                    }
                }
                if acc.iter().any(|c| !c.is_zero()) {
                    return false;
                }
            }
            let mut pos = 0;
            loop {
                if pos == rest {
                    return true;
                }
                tuple[pos] += 1;
                if tuple[pos] < dim {
                    break;
                }
                tuple[pos] = 0;
                pos += 1;
            }
        }
    }
}

impl std::fmt::Debug for HochschildCochain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Cochain[deg {}]{{", self.degree)?;
        for (k, v) in &self.tensor {
            for (i, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    write!(f, " {k:?}->e{i}: {c:?};")?;
                }
            }
        }
        write!(f, " }}")
    }
}

/// The multiplication 2-cochain of the algebra, lifted to series.
pub fn multiplication_cochain(
    algebra: &Arc<AlgebraPresentation>,
    trunc: i64,
) -> HochschildCochain {
    let mut m = HochschildCochain::zero(algebra, 2, trunc);
    for ((a, b), terms) in &algebra.mult {
        for (k, c) in terms {
            m.add_term(&[*a, *b], *k, &ArtinianSeries::constant(c.clone(), trunc));
        }
    }
    m
}

/// Gerstenhaber circle (brace) product D∘E: the signed sum of insertions
/// of E into the argument slots of D.
pub fn circle(d: &HochschildCochain, e: &HochschildCochain) -> HochschildCochain {
    assert_eq!(d.trunc, e.trunc, "mixed truncation orders");
    let k = d.degree;
    let l = e.degree;
    if k == 0 {
        // no slots to insert into; the zero cochain of the composite degree
        return HochschildCochain::zero(&d.algebra, l.saturating_sub(1), d.trunc);
    }
    let out_deg = k + l - 1;
    let mut out = HochschildCochain::zero(&d.algebra, out_deg, d.trunc);
    for (t, dval) in &d.tensor {
        for (s, eval) in &e.tensor {
            for i in 0..k {
                // sign (−1)^{(l−1)·i} with l−1 the DGLA degree of E
                let exponent = (l as i64 - 1) * i as i64;
                let sign = if exponent.rem_euclid(2) == 0 { 1 } else { -1 };
                let factor = eval[t[i]].scale(&ExactScalar::from_int(sign));
                if factor.is_zero() {
                    continue;
                }
                let mut key = Vec::with_capacity(out_deg);
                key.extend_from_slice(&t[..i]);
                key.extend_from_slice(s);
                key.extend_from_slice(&t[i + 1..]);
                for (out_idx, c) in dval.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    out.add_term(&key, out_idx, &c.mul(&factor));
                }
            }
        }
    }
    out.prune();
    out
}

/// The Gerstenhaber bracket [D,E] = D∘E − (−1)^{(|D|−1)(|E|−1)} E∘D,
/// of DGLA degree |D| + |E| − 1 in the shifted grading.
pub fn gerstenhaber(d: &HochschildCochain, e: &HochschildCochain) -> HochschildCochain {
    let out_deg = (d.degree + e.degree).saturating_sub(1);
    let exponent = (d.degree as i64 - 1) * (e.degree as i64 - 1);
    let sign = if exponent.rem_euclid(2) == 0 { -1 } else { 1 };
    let mut out = HochschildCochain::zero(&d.algebra, out_deg, d.trunc);
    let de = circle(d, e);
    if de.degree == out_deg {
        out = out.add(&de);
    }
    let ed = circle(e, d);
    if ed.degree == out_deg {
        out = out.add(&ed.scale_scalar(&ExactScalar::from_int(sign)));
    }
    out.normalized = d.normalized && e.normalized;
    out
}

/// Hochschild differential δD = [m, D]; δ² = 0 and Maurer-Cartan elements
/// of the shifted complex are exactly associativity deformations.
pub fn hochschild_delta(d: &HochschildCochain) -> HochschildCochain {
    let m = multiplication_cochain(&d.algebra, d.trunc);
    let mut out = gerstenhaber(&m, d);
    out.normalized = d.normalized;
    out
}

/// The contraction i_R D(a_1,…,a_n) = Σ (−1)^i D(a_1,…,a_i, R, …, a_n)
/// for a degree-0 cochain R; equals the circle product D∘R.
pub fn contract_i_r(
    r: &HochschildCochain,
    d: &HochschildCochain,
) -> Result<HochschildCochain, Error> {
    if r.degree != 0 {
        return Err(Error::DegreeMismatch("i_R requires a degree-0 cochain R".into()));
    }
    if d.degree == 0 {
        return Err(Error::DegreeMismatch("i_R lowers degree; need at least one argument".into()));
    }
    Ok(circle(d, r))
}

/// Interpret a deformed multiplication table over 𝔞 as a Maurer-Cartan
/// carrier: λ = table − m, which must lie in 𝔪.
pub fn deformed_table_to_mc(table: &HochschildCochain) -> Result<HochschildCochain, Error> {
    if table.degree != 2 {
        return Err(Error::DegreeMismatch("a multiplication table is a 2-cochain".into()));
    }
    let m = multiplication_cochain(&table.algebra, table.trunc);
    let lambda = table.sub(&m);
    if !lambda.in_maximal_ideal() {
        return Err(Error::Domain(
            "table does not reduce to the base multiplication mod 𝔪".into(),
        ));
    }
    Ok(lambda)
}

/// Rebuild the deformed table from a Maurer-Cartan carrier.
pub fn mc_to_deformed_table(lambda: &HochschildCochain) -> Result<HochschildCochain, Error> {
    if lambda.degree != 2 {
        return Err(Error::DegreeMismatch("a Maurer-Cartan carrier is a 2-cochain".into()));
    }
    if !lambda.in_maximal_ideal() {
        return Err(Error::Domain("carrier must lie in the maximal ideal".into()));
    }
    let m = multiplication_cochain(&lambda.algebra, lambda.trunc);
    Ok(m.add(lambda))
}

/// Maurer-Cartan defect at the cochain level: δλ + ½[λ,λ] = [m,λ] + ½[λ,λ].
/// Zero exactly when m + λ is associative.
pub fn cochain_mc_defect(lambda: &HochschildCochain) -> Result<HochschildCochain, Error> {
    if lambda.degree != 2 {
        return Err(Error::DegreeMismatch("a Maurer-Cartan carrier is a 2-cochain".into()));
    }
    let half = ExactScalar::from_ratio(1, 2);
    Ok(hochschild_delta(lambda).add(&gerstenhaber(lambda, lambda).scale_scalar(&half)))
}

/// Brute-force associativity of a (deformed) multiplication 2-cochain on
/// all basis triples; the independent oracle for the Maurer-Cartan bridge.
pub fn table_is_associative(table: &HochschildCochain) -> bool {
    assert_eq!(table.degree, 2);
    let dim = table.algebra.dim;
    let trunc = table.trunc;
    let basis = |i: usize| {
        let mut v = vec![ArtinianSeries::zero(trunc); dim];
        v[i] = ArtinianSeries::one(trunc);
        v
    };
    for a in 0..dim {
        for b in 0..dim {
            let ab = table.evaluate(&[basis(a), basis(b)]);
            for c in 0..dim {
                let left = table.evaluate(&[ab.clone(), basis(c)]);
                let bc = table.evaluate(&[basis(b), basis(c)]);
                let right = table.evaluate(&[basis(a), bc]);
                for i in 0..dim {
                    if !left[i].eq_value(&right[i]) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Materialization of the Hochschild DGLA C^{•+1}(A,A) within a degree
// window, as a structure-constant presentation usable by the Deligne layer.
// ---------------------------------------------------------------------------

pub(crate) fn encode_basis(algebra: &AlgebraPresentation, key: &[usize], out: usize) -> usize {
    let mut idx = 0usize;
    for t in key {
        idx = idx * algebra.dim + t;
    }
    idx * algebra.dim + out
}

pub(crate) fn decode_basis(
    algebra: &AlgebraPresentation,
    k: usize,
    mut idx: usize,
) -> (Vec<usize>, usize) {
    let out = idx % algebra.dim;
    idx /= algebra.dim;
    let mut key = vec![0usize; k];
    for slot in (0..k).rev() {
        key[slot] = idx % algebra.dim;
        idx /= algebra.dim;
    }
    (key, out)
}

/// Materialize C^{•+1}(A,A) in DGLA degrees −1..=top as exact structure
/// constants. Brackets leaving the window are truncated, as the
/// presentation semantics prescribe.
pub fn hochschild_dgla(algebra: &Arc<AlgebraPresentation>, top: i64) -> Arc<DglaPresentation> {
    assert!(top >= 1, "window must include degree 1 for the gauge machinery");
    let dims: Vec<usize> = (-1..=top).map(|deg| algebra.dim.pow((deg + 2) as u32)).collect();
    let mut b = DglaBuilder::new(&format!("hochschild({})", algebra.name), -1, top, &dims);

    let trunc = 0i64;
    for deg in -1..top {
        let k = (deg + 1) as usize;
        let source_dim = algebra.dim.pow((k + 1) as u32);
        let target_dim = algebra.dim.pow((k + 2) as u32);
        let mut mat = Matrix::zero(target_dim, source_dim);
        for idx in 0..source_dim {
            let (key, out) = decode_basis(algebra, k, idx);
            let mut elem = HochschildCochain::zero(algebra, k, trunc);
            elem.add_term(&key, out, &ArtinianSeries::one(trunc));
            let image = hochschild_delta(&elem);
            for (ikey, ival) in image.entries() {
                for (iout, c) in ival.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let row = encode_basis(algebra, ikey, iout);
                    let cur = mat.at(row, idx) + &c.coeff(0);
                    *mat.at_mut(row, idx) = cur;
                }
            }
        }
        b = b.set_differential(deg, mat);
    }

    for da in -1..=top {
        for db in -1..=top {
            if da + db < -1 || da + db > top {
                continue;
            }
            let ka = (da + 1) as usize;
            let kb = (db + 1) as usize;
            for ia in 0..algebra.dim.pow((ka + 1) as u32) {
                let (akey, aout) = decode_basis(algebra, ka, ia);
                let mut ea = HochschildCochain::zero(algebra, ka, trunc);
                ea.add_term(&akey, aout, &ArtinianSeries::one(trunc));
                for ib in 0..algebra.dim.pow((kb + 1) as u32) {
                    let (bkey, bout) = decode_basis(algebra, kb, ib);
                    let mut eb = HochschildCochain::zero(algebra, kb, trunc);
                    eb.add_term(&bkey, bout, &ArtinianSeries::one(trunc));
                    let br = gerstenhaber(&ea, &eb);
                    for (rkey, rval) in br.entries() {
                        for (rout, c) in rval.iter().enumerate() {
                            let c0 = c.coeff(0);
                            if c0.is_zero() {
                                continue;
                            }
                            b = b.add_bracket(
                                (da, ia),
                                (db, ib),
                                encode_basis(algebra, rkey, rout),
                                c0,
                            );
                        }
                    }
                }
            }
        }
    }
    b.build()
}

/// View a cochain as an element of the materialized Hochschild DGLA.
pub fn cochain_to_graded(
    cochain: &HochschildCochain,
    dgla: &Arc<DglaPresentation>,
) -> GradedElement {
    let mut e = GradedElement::zero(dgla, cochain.trunc);
    for (key, val) in cochain.entries() {
        for (out, c) in val.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = encode_basis(&cochain.algebra, key, out);
            e.set_coeff((cochain.dgla_degree(), idx), c.clone());
        }
    }
    e
}

/// Read a homogeneous element of the materialized DGLA back as a cochain.
pub fn graded_to_cochain(
    element: &GradedElement,
    algebra: &Arc<AlgebraPresentation>,
    dgla_degree: i64,
) -> HochschildCochain {
    let k = (dgla_degree + 1) as usize;
    let mut out = HochschildCochain::zero(algebra, k, element.truncation_order());
    for (idx, c) in element.component(dgla_degree).into_iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (key, slot) = decode_basis(algebra, k, idx);
        out.add_term(&key, slot, &c);
    }
    out
}

/// Small reference algebras for tests and CLI demos.
pub mod algebras {
    use super::*;

    /// ℚ[x]/(x^d): basis 1, x, …, x^{d−1}.
    pub fn truncated_polynomial(d: usize) -> Arc<AlgebraPresentation> {
        let mut unit = vec![ExactScalar::zero(); d];
        unit[0] = ExactScalar::one();
        let mut a = AlgebraPresentation::new(&format!("Q[x]/(x^{d})"), d, unit);
        for i in 0..d {
            for j in 0..d {
                if i + j < d {
                    a.set_product(i, j, vec![(i + j, ExactScalar::one())]);
                } else {
                    a.set_product(i, j, vec![]);
                }
            }
        }
        Arc::new(a)
    }

    /// Full matrix algebra of n×n matrices; basis E_{ab} at index a·n + b.
    pub fn matrix_algebra(n: usize) -> Arc<AlgebraPresentation> {
        let dim = n * n;
        let mut unit = vec![ExactScalar::zero(); dim];
        for a in 0..n {
            unit[a * n + a] = ExactScalar::one();
        }
        let mut alg = AlgebraPresentation::new(&format!("Mat{n}"), dim, unit);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        if b == c {
                            alg.set_product(
                                a * n + b,
                                c * n + d,
                                vec![(a * n + d, ExactScalar::one())],
                            );
                        } else {
                            alg.set_product(a * n + b, c * n + d, vec![]);
                        }
                    }
                }
            }
        }
        Arc::new(alg)
    }

    /// Truncated polynomials in several variables: ℚ(i)[x₁..x_v] modulo
    /// total degree > cap; the desk-scale stand-in for function sheaves.
    pub fn truncated_multivariate(vars: usize, cap: usize) -> Arc<AlgebraPresentation> {
        fn enumerate(vars: usize, cap: usize) -> Vec<Vec<usize>> {
            if vars == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for head in 0..=cap {
                for mut tail in enumerate(vars - 1, cap - head) {
                    let mut v = vec![head];
                    v.append(&mut tail);
                    out.push(v);
                }
            }
            out
        }
        let monomials = enumerate(vars, cap);
        let index: BTreeMap<Vec<usize>, usize> =
            monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let dim = monomials.len();
        let mut unit = vec![ExactScalar::zero(); dim];
        unit[index[&vec![0; vars]]] = ExactScalar::one();
        let mut a = AlgebraPresentation::new(&format!("Q[x;{vars}]/deg>{cap}"), dim, unit);
        for (i, mi) in monomials.iter().enumerate() {
            for (j, mj) in monomials.iter().enumerate() {
                let sum: Vec<usize> = mi.iter().zip(mj).map(|(x, y)| x + y).collect();
                if sum.iter().sum::<usize>() <= cap {
                    a.set_product(i, j, vec![(index[&sum], ExactScalar::one())]);
                } else {
                    a.set_product(i, j, vec![]);
                }
            }
        }
        Arc::new(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rand_cochain(
        rng: &mut rand_chacha::ChaCha8Rng,
        algebra: &Arc<AlgebraPresentation>,
        degree: usize,
        trunc: i64,
        min_order: i64,
        density: f64,
    ) -> HochschildCochain {
        let mut c = HochschildCochain::zero(algebra, degree, trunc);
        let dim = algebra.dim;
        let count = dim.pow(degree as u32);
        for flat in 0..count {
            let (key, _) = decode_basis(algebra, degree, flat * dim);
            for out in 0..dim {
                if rng.gen_bool(density) {
                    let mut s = ArtinianSeries::zero(trunc);
                    for k in min_order..=trunc {
                        s.set_coeff(k, ExactScalar::from_ratio(rng.gen_range(-3i64..=3), 1));
                    }
                    c.add_term(&key, out, &s);
                }
            }
        }
        c
    }

    #[test]
    fn poly_and_matrix_algebras_validate() {
        assert!(algebras::truncated_polynomial(3).validate().all_pass());
        assert!(algebras::matrix_algebra(2).validate().all_pass());
        assert!(algebras::truncated_multivariate(2, 2).validate().all_pass());
    }

    #[test]
    fn delta_of_element_is_commutator() {
        // (δa)(x) = ax − xa for a 0-cochain a; zero over a commutative algebra
        let a3 = algebras::truncated_polynomial(3);
        let trunc = 1;
        let mut a = HochschildCochain::zero(&a3, 0, trunc);
        a.add_term(&[], 1, &ArtinianSeries::one(trunc));
        assert!(hochschild_delta(&a).is_zero());
        // nonzero over matrices
        let m2 = algebras::matrix_algebra(2);
        let mut b = HochschildCochain::zero(&m2, 0, trunc);
        b.add_term(&[], 1, &ArtinianSeries::one(trunc)); // E01
        let db = hochschild_delta(&b);
        assert!(!db.is_zero());
        // direct commutator check on basis argument E10 (index 2):
        // E01·E10 = E00 (index 0), E10·E01 = E11 (index 3)
        let val = db.value(&[2]);
        assert!(val[0].eq_value(&ArtinianSeries::one(trunc)));
        assert!(val[3].eq_value(&ArtinianSeries::one(trunc).neg()));
    }

    #[test]
    fn delta_of_identity_cochain_is_multiplication() {
        // The three-term formula gives (δ id)(a,b) = a·id(b) − id(ab) +
        // id(a)·b = ab, the multiplication cochain itself: id is not a
        // derivation, so δ id ≠ 0.
        let a3 = algebras::truncated_polynomial(3);
        let trunc = 1;
        let mut id = HochschildCochain::zero(&a3, 1, trunc);
        for i in 0..3 {
            id.add_term(&[i], i, &ArtinianSeries::one(trunc));
        }
        let d_id = hochschild_delta(&id);
        let m = multiplication_cochain(&a3, trunc);
        assert!(d_id.sub(&m).is_zero());
        // a genuine derivation is δ-closed: D = x·∂ on ℚ[x]/(x³)
        let mut der = HochschildCochain::zero(&a3, 1, trunc);
        der.add_term(&[1], 1, &ArtinianSeries::one(trunc));
        der.add_term(&[2], 2, &ArtinianSeries::constant(ExactScalar::from_int(2), trunc));
        assert!(hochschild_delta(&der).is_zero());
    }

    #[test]
    fn delta_squared_zero_random() {
        let a3 = algebras::truncated_polynomial(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for deg in 0..=2usize {
            for _ in 0..5 {
                let d = rand_cochain(&mut rng, &a3, deg, 2, 0, 0.4);
                assert!(hochschild_delta(&hochschild_delta(&d)).is_zero());
            }
        }
    }

    #[test]
    fn bracket_m_m_detects_associativity() {
        // [m,m] = 0 for associative m; twice the associator in general
        let a3 = algebras::truncated_polynomial(3);
        let m = multiplication_cochain(&a3, 0);
        assert!(gerstenhaber(&m, &m).is_zero());
        let mut bad = (*a3).clone();
        bad.set_product(1, 1, vec![(0, ExactScalar::one())]);
        let bad = Arc::new(bad);
        assert!(!bad.validate().associativity.pass);
        let mb = multiplication_cochain(&bad, 0);
        let br = gerstenhaber(&mb, &mb);
        assert!(!br.is_zero());
        let assoc_at = |a: usize, b: usize, c: usize| -> Vec<ExactScalar> {
            let dim = bad.dim;
            let e = |i: usize| {
                let mut v = vec![ExactScalar::zero(); dim];
                v[i] = ExactScalar::one();
                v
            };
            let left = bad.product(&bad.product(&e(a), &e(b)), &e(c));
            let right = bad.product(&e(a), &bad.product(&e(b), &e(c)));
            left.iter().zip(&right).map(|(l, r)| l - r).collect()
        };
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let v = br.value(&[a, b, c]);
                    let assoc = assoc_at(a, b, c);
                    for i in 0..3 {
                        assert_eq!(v[i].coeff(0), assoc[i].scale_int(2));
                    }
                }
            }
        }
    }

    #[test]
    fn bracket_of_zero_cochains_vanishes() {
        let a3 = algebras::truncated_polynomial(3);
        let trunc = 1;
        let mut a = HochschildCochain::zero(&a3, 0, trunc);
        a.add_term(&[], 1, &ArtinianSeries::one(trunc));
        let mut b = HochschildCochain::zero(&a3, 0, trunc);
        b.add_term(&[], 2, &ArtinianSeries::one(trunc));
        assert!(gerstenhaber(&a, &b).is_zero());
    }

    #[test]
    fn graded_antisymmetry_random() {
        let a3 = algebras::truncated_polynomial(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        for (ka, kb) in [(1usize, 2usize), (2, 2), (0, 2), (1, 1), (2, 3)] {
            let d = rand_cochain(&mut rng, &a3, ka, 1, 0, 0.3);
            let e = rand_cochain(&mut rng, &a3, kb, 1, 0, 0.3);
            let lhs = gerstenhaber(&d, &e);
            let exponent = (ka as i64 - 1) * (kb as i64 - 1);
            let sign = if exponent.rem_euclid(2) == 0 { 1 } else { -1 };
            let rhs = gerstenhaber(&e, &d).scale_scalar(&ExactScalar::from_int(-sign));
            assert!(lhs.sub(&rhs).is_zero());
        }
    }

    #[test]
    fn contraction_single_insertion_and_zero() {
        let a3 = algebras::truncated_polynomial(3);
        let trunc = 1;
        let mut id = HochschildCochain::zero(&a3, 1, trunc);
        for i in 0..3 {
            id.add_term(&[i], i, &ArtinianSeries::one(trunc));
        }
        let mut r = HochschildCochain::zero(&a3, 0, trunc);
        r.add_term(&[], 2, &ArtinianSeries::one(trunc));
        let contracted = contract_i_r(&r, &id).unwrap();
        assert!(contracted.sub(&r).is_zero());
        let zero_r = HochschildCochain::zero(&a3, 0, trunc);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(47);
        let d = rand_cochain(&mut rng, &a3, 2, trunc, 0, 0.5);
        assert!(contract_i_r(&zero_r, &d).unwrap().is_zero());
    }

    #[test]
    fn contraction_delta_interplay_central_r() {
        // pure Gerstenhaber conventions: δ(i_R D) = i_R(δD) for central R,
        // since [m,[D,R]] = [[m,D],R] + ±[D,[m,R]] and [m,R] = 0
        let a3 = algebras::truncated_polynomial(3);
        let trunc = 1;
        let mut r = HochschildCochain::zero(&a3, 0, trunc);
        r.add_term(&[], 1, &ArtinianSeries::one(trunc));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        for deg in [1usize, 2, 3] {
            let d = rand_cochain(&mut rng, &a3, deg, trunc, 0, 0.4);
            let lhs = hochschild_delta(&contract_i_r(&r, &d).unwrap());
            let rhs = contract_i_r(&r, &hochschild_delta(&d)).unwrap();
            assert!(lhs.sub(&rhs).is_zero());
        }
        // i_R m (a) = Ra − aR = 0 over a commutative algebra
        let m = multiplication_cochain(&a3, trunc);
        assert!(contract_i_r(&r, &m).unwrap().is_zero());
    }

    #[test]
    fn double_contractions_graded_commute() {
        // i_R and i_S are odd operators; their graded commutator
        // i_R i_S + i_S i_R vanishes for degree-0 R, S (follows from
        // [[D,R],S] = −[[D,S],R] since [R,S] = 0). In particular i_R² = 0.
        let a3 = algebras::truncated_polynomial(3);
        let trunc = 1;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(59);
        let r = rand_cochain(&mut rng, &a3, 0, trunc, 0, 1.0);
        let s = rand_cochain(&mut rng, &a3, 0, trunc, 0, 1.0);
        for deg in [2usize, 3] {
            let d = rand_cochain(&mut rng, &a3, deg, trunc, 0, 0.5);
            let rs = contract_i_r(&s, &contract_i_r(&r, &d).unwrap()).unwrap();
            let sr = contract_i_r(&r, &contract_i_r(&s, &d).unwrap()).unwrap();
            assert!(rs.add(&sr).is_zero());
            let rr = contract_i_r(&r, &contract_i_r(&r, &d).unwrap()).unwrap();
            assert!(rr.is_zero());
        }
    }

    #[test]
    fn deformation_bridge_round_trip_and_moyal_like() {
        let a3 = algebras::truncated_polynomial(3);
        let trunc = 1;
        let m = multiplication_cochain(&a3, trunc);
        assert!(deformed_table_to_mc(&m).unwrap().is_zero());
        // Moyal-like: f*g = fg + ħ D(f)D(g) with D = x∂ a derivation of
        // ℚ[x]/(x³): D(1)=0, D(x)=x, D(x²)=2x²
        let h = ArtinianSeries::monomial(ExactScalar::one(), 1, trunc);
        let dvals: [Vec<(usize, ExactScalar)>; 3] = [
            vec![],
            vec![(1usize, ExactScalar::one())],
            vec![(2usize, ExactScalar::from_int(2))],
        ];
        let mut lambda = HochschildCochain::zero(&a3, 2, trunc);
        for f in 0..3 {
            for g in 0..3 {
                for (fi, fc) in &dvals[f] {
                    for (gi, gc) in &dvals[g] {
                        for (k, c) in a3.product_basis(*fi, *gi) {
                            let coeff = h.scale(&(&(fc * gc) * c));
                            lambda.add_term(&[f, g], *k, &coeff);
                        }
                    }
                }
            }
        }
        let defect = cochain_mc_defect(&lambda).unwrap();
        assert!(defect.is_zero());
        let table = mc_to_deformed_table(&lambda).unwrap();
        assert!(table_is_associative(&table));
        assert!(deformed_table_to_mc(&table).unwrap().sub(&lambda).is_zero());
        // a deliberately non-associative table has nonzero defect, with the
        // brute-force oracle agreeing
        let mut crooked = lambda.clone();
        crooked.add_term(&[2, 2], 0, &h);
        assert!(!cochain_mc_defect(&crooked).unwrap().is_zero());
        assert!(!table_is_associative(&mc_to_deformed_table(&crooked).unwrap()));
    }

    #[test]
    fn mc_iff_associativity_randomized() {
        let a3 = algebras::truncated_polynomial(3);
        let trunc = 1;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        let mut seen_not = 0;
        for _ in 0..60 {
            let lambda = rand_cochain(&mut rng, &a3, 2, trunc, 1, 0.4);
            let defect_zero = cochain_mc_defect(&lambda).unwrap().is_zero();
            let table = mc_to_deformed_table(&lambda).unwrap();
            assert_eq!(defect_zero, table_is_associative(&table));
            if !defect_zero {
                seen_not += 1;
            }
        }
        assert!(seen_not > 0);
        // λ = ħ·δu is always MC mod ħ²
        let u = rand_cochain(&mut rng, &a3, 1, trunc, 0, 0.6);
        let lambda =
            hochschild_delta(&u).scale(&ArtinianSeries::monomial(ExactScalar::one(), 1, trunc));
        assert!(cochain_mc_defect(&lambda).unwrap().is_zero());
        assert!(table_is_associative(&mc_to_deformed_table(&lambda).unwrap()));
    }

    #[test]
    fn normalized_cochains_form_sub_dgla() {
        let a3 = algebras::truncated_polynomial(3);
        let trunc = 1;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(67);
        let mut make_normalized = |deg: usize| {
            let mut c = rand_cochain(&mut rng, &a3, deg, trunc, 0, 0.5);
            let keys: Vec<Vec<usize>> = c.entries().map(|(k, _)| k.clone()).collect();
            for k in keys {
                if k.contains(&0) {
                    c.set_value(k, vec![ArtinianSeries::zero(trunc); 3]);
                }
            }
            c.normalized = true;
            c
        };
        for (ka, kb) in [(1usize, 2usize), (2, 2)] {
            let d = make_normalized(ka);
            let e = make_normalized(kb);
            assert!(d.check_normalized() && e.check_normalized());
            assert!(hochschild_delta(&d).check_normalized());
            assert!(gerstenhaber(&d, &e).check_normalized());
            assert!(hochschild_delta(&d).normalized);
            assert!(gerstenhaber(&d, &e).normalized);
        }
    }

    #[test]
    fn materialized_dgla_validates_and_matches_cochain_route() {
        let a2 = algebras::truncated_polynomial(2);
        let dgla = hochschild_dgla(&a2, 2);
        let report = crate::dgla::validate_dgla(&dgla);
        assert!(report.all_pass(), "{report:?}");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        for _ in 0..5 {
            let d = rand_cochain(&mut rng, &a2, 2, 1, 0, 0.6);
            let e = rand_cochain(&mut rng, &a2, 1, 1, 0, 0.6);
            let via_cochain = gerstenhaber(&d, &e);
            let gd = cochain_to_graded(&d, &dgla);
            let ge = cochain_to_graded(&e, &dgla);
            let via_dgla = graded_to_cochain(&gd.bracket(&ge), &a2, 1);
            assert!(via_cochain.sub(&via_dgla).is_zero());
            let via_c = hochschild_delta(&e);
            let via_d = graded_to_cochain(&ge.d(), &a2, 1);
            assert!(via_c.sub(&via_d).is_zero());
        }
    }

    #[test]
    fn mc_defect_agrees_with_deligne_layer() {
        // dual route: cochain-level defect vs the Deligne layer's mc_defect
        // in the materialized DGLA
        let a2 = algebras::truncated_polynomial(2);
        let dgla = hochschild_dgla(&a2, 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(73);
        for _ in 0..5 {
            let lambda = rand_cochain(&mut rng, &a2, 2, 1, 1, 0.7);
            let via_cochain = cochain_mc_defect(&lambda).unwrap();
            let g = cochain_to_graded(&lambda, &dgla);
            let via_deligne = graded_to_cochain(&crate::deligne::mc_defect(&g).unwrap(), &a2, 2);
            assert!(via_cochain.sub(&via_deligne).is_zero());
        }
    }
}
