//! Polynomial differential forms on the standard simplex:
//! Ω•[Δ^p] = ℚ[t₀..t_p]{dt₀..dt_p}/(Σt − 1, Σdt).
//!
//! The canonical representative eliminates t₀ and dt₀ through the
//! relations, so forms are stored as polynomials in t₁..t_p wedged with
//! dt₁..dt_p. Coefficients are any module over the exact scalars, which
//! lets the same machinery carry plain scalars, series vectors, DGLA
//! elements, or Hochschild cochains.

use std::collections::BTreeMap;

use crate::scalars::ExactScalar;

/// Coefficients a Sullivan form can carry.
pub trait FormCoeff: Clone {
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, s: &ExactScalar) -> Self;
    fn is_zero(&self) -> bool;
}

impl FormCoeff for ExactScalar {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, s: &ExactScalar) -> Self {
        self * s
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
}

impl FormCoeff for crate::scalars::ArtinianSeries {
    fn add(&self, other: &Self) -> Self {
        crate::scalars::ArtinianSeries::add(self, other)
    }
    fn scale(&self, s: &ExactScalar) -> Self {
        crate::scalars::ArtinianSeries::scale(self, s)
    }
    fn is_zero(&self) -> bool {
        crate::scalars::ArtinianSeries::is_zero(self)
    }
}

impl FormCoeff for crate::dgla::GradedElement {
    fn add(&self, other: &Self) -> Self {
        crate::dgla::GradedElement::add(self, other)
    }
    fn scale(&self, s: &ExactScalar) -> Self {
        self.scale_scalar(s)
    }
    fn is_zero(&self) -> bool {
        crate::dgla::GradedElement::is_zero(self)
    }
}

impl FormCoeff for crate::hochschild::HochschildCochain {
    fn add(&self, other: &Self) -> Self {
        crate::hochschild::HochschildCochain::add(self, other)
    }
    fn scale(&self, s: &ExactScalar) -> Self {
        self.scale_scalar(s)
    }
    fn is_zero(&self) -> bool {
        crate::hochschild::HochschildCochain::is_zero(self)
    }
}

/// A monomial t₁^{a₁}…t_p^{a_p}·dt_{i₁}∧…∧dt_{i_f} in the eliminated
/// coordinates; `dts` is strictly increasing with entries in 1..=p.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SullivanMonomial {
    pub powers: Vec<u32>,
    pub dts: Vec<usize>,
}

impl SullivanMonomial {
    pub fn one(p: usize) -> Self {
        SullivanMonomial { powers: vec![0; p], dts: Vec::new() }
    }

    pub fn form_degree(&self) -> usize {
        self.dts.len()
    }

    pub fn poly_degree(&self) -> u32 {
        self.powers.iter().sum()
    }
}

/// A polynomial-form element of Ω•[Δ^p] ⊗ V.
#[derive(Clone, Debug)]
pub struct SullivanForm<V: FormCoeff> {
    /// simplex dimension p (coordinates t₁..t_p after elimination)
    pub p: usize,
    terms: BTreeMap<SullivanMonomial, V>,
}

impl<V: FormCoeff> SullivanForm<V> {
    pub fn zero(p: usize) -> Self {
        SullivanForm { p, terms: BTreeMap::new() }
    }

    pub fn from_term(p: usize, m: SullivanMonomial, v: V) -> Self {
        assert_eq!(m.powers.len(), p);
        assert!(m.dts.iter().all(|i| *i >= 1 && *i <= p));
        assert!(m.dts.windows(2).all(|w| w[0] < w[1]));
        let mut f = SullivanForm::zero(p);
        f.add_term(m, v);
        f
    }

    /// Constant form with the given coefficient.
    pub fn constant(p: usize, v: V) -> Self {
        SullivanForm::from_term(p, SullivanMonomial::one(p), v)
    }

    pub fn add_term(&mut self, m: SullivanMonomial, v: V) {
        if v.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                let sum = slot.add(&v);
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *slot = sum;
                }
            }
            None => {
                self.terms.insert(m, v);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SullivanMonomial, &V)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|v| v.is_zero())
    }

    pub fn add(&self, other: &SullivanForm<V>) -> SullivanForm<V> {
        assert_eq!(self.p, other.p);
        let mut out = self.clone();
        for (m, v) in &other.terms {
            out.add_term(m.clone(), v.clone());
        }
        out
    }

    pub fn scale(&self, s: &ExactScalar) -> SullivanForm<V> {
        let mut out = SullivanForm::zero(self.p);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.scale(s));
        }
        out
    }

    pub fn neg(&self) -> SullivanForm<V> {
        self.scale(&ExactScalar::from_int(-1))
    }

    pub fn sub(&self, other: &SullivanForm<V>) -> SullivanForm<V> {
        self.add(&other.neg())
    }

    /// Largest polynomial degree among the terms.
    pub fn poly_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.poly_degree()).max().unwrap_or(0)
    }

    /// The de Rham differential: d(t^α dt_S) = Σ αᵢ t^{α−eᵢ} dtᵢ ∧ dt_S.
    pub fn d(&self) -> SullivanForm<V> {
        let mut out = SullivanForm::zero(self.p);
        for (m, v) in &self.terms {
            for i in 0..self.p {
                if m.powers[i] == 0 {
                    continue;
                }
                let coord = i + 1;
                if m.dts.contains(&coord) {
                    continue; // dt ∧ dt = 0
                }
                let mut powers = m.powers.clone();
                powers[i] -= 1;
                let (dts, sign) = wedge_insert(&m.dts, coord);
                let scale = ExactScalar::from_int(sign * m.powers[i] as i64);
                out.add_term(SullivanMonomial { powers, dts }, v.scale(&scale));
            }
        }
        out
    }

    /// Map coefficients through `f`.
    pub fn map_coeffs<W: FormCoeff>(&self, f: impl Fn(&V) -> W) -> SullivanForm<W> {
        let mut out = SullivanForm::zero(self.p);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), f(v));
        }
        out
    }

    /// Graded pairing with another form: for each pair of terms the wedge
    /// of the form parts (with its Koszul sign) scales `combine(v, w)`,
    /// which additionally receives the form degree of the *left* term so
    /// coefficient-level signs can be taken.
    pub fn wedge_with<W: FormCoeff, U: FormCoeff>(
        &self,
        other: &SullivanForm<W>,
        combine: impl Fn(&V, &W, usize, usize) -> U,
    ) -> SullivanForm<U> {
        assert_eq!(self.p, other.p);
        let mut out = SullivanForm::zero(self.p);
        for (ma, va) in &self.terms {
            for (mb, vb) in &other.terms {
                let Some((dts, sign)) = wedge_merge(&ma.dts, &mb.dts) else { continue };
                let powers: Vec<u32> =
                    ma.powers.iter().zip(&mb.powers).map(|(x, y)| x + y).collect();
                let u = combine(va, vb, ma.form_degree(), mb.form_degree())
                    .scale(&ExactScalar::from_int(sign));
                out.add_term(SullivanMonomial { powers, dts }, u);
            }
        }
        out
    }

    /// Pullback along a monotone map f: [q] → [p] of vertex sets, with
    /// coordinate rule t_i ↦ Σ_{j ∈ f⁻¹(i)} t_j. Faces and degeneracies
    /// are both instances.
    pub fn pullback(&self, f: &[usize], q: usize) -> SullivanForm<V> {
        assert_eq!(f.len(), q + 1);
        assert!(f.windows(2).all(|w| w[0] <= w[1]), "map must be monotone");
        assert!(f.iter().all(|i| *i <= self.p));
        // preimages in full coordinates of the target
        let mut preimage: Vec<Vec<usize>> = vec![Vec::new(); self.p + 1];
        for (j, i) in f.iter().enumerate() {
            preimage[*i].push(j);
        }
        let mut out = SullivanForm::zero(q);
        for (m, v) in &self.terms {
            // substitute each source coordinate by its preimage sum, in
            // full target coordinates: polys over t_0..t_q and dt_0..dt_q
            let mut acc: Vec<(FullMonomial, ExactScalar)> =
                vec![(FullMonomial::one(q), ExactScalar::one())];
            for i in 0..self.p {
                let coord = i + 1;
                for _ in 0..m.powers[i] {
                    acc = full_mul_linear(&acc, &preimage[coord], q);
                }
            }
            for coord in &m.dts {
                acc = full_wedge_linear(&acc, &preimage[*coord], q);
            }
            for (fm, c) in acc {
                if let Some((em, esign)) = fm.eliminate(q) {
                    for (monomial, coeff) in em {
                        out.add_term(
                            monomial,
                            v.scale(&(&coeff * &c).scale_int(esign)),
                        );
                    }
                }
            }
        }
        out
    }
}

/// dt_c ∧ dt_S: position sign and merged index set; the caller has
/// excluded c ∈ S.
fn wedge_insert(s: &[usize], c: usize) -> (Vec<usize>, i64) {
    let pos = s.iter().take_while(|x| **x < c).count();
    let mut out = Vec::with_capacity(s.len() + 1);
    out.extend_from_slice(&s[..pos]);
    out.push(c);
    out.extend_from_slice(&s[pos..]);
    let sign = if pos % 2 == 0 { 1 } else { -1 };
    (out, sign)
}

/// dt_A ∧ dt_B with Koszul counting; None when indices repeat.
fn wedge_merge(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut out = a.to_vec();
    let mut sign = 1i64;
    for (k, c) in b.iter().enumerate() {
        if out.contains(c) {
            return None;
        }
        let pos = out.iter().take_while(|x| **x < *c).count();
        // moving dt_c past (len − pos) later factors of `out` and past the
        // (b-prefix already placed) is accounted by insertion parity
        let transpositions = out.len() - pos;
        if transpositions % 2 == 1 {
            sign = -sign;
        }
        out.insert(pos, *c);
        let _ = k;
    }
    Some((out, sign))
}

/// Monomial in the full coordinates t_0..t_q, dt_0..dt_q.
#[derive(Clone)]
struct FullMonomial {
    powers: Vec<u32>, // index 0 ↔ t_0
    dts: Vec<usize>,  // values in 0..=q, strictly increasing by construction
}

impl FullMonomial {
    fn one(q: usize) -> Self {
        FullMonomial { powers: vec![0; q + 1], dts: Vec::new() }
    }

    /// Eliminate t_0 = 1 − Σ t_i and dt_0 = −Σ dt_i; returns the expansion
    /// as eliminated monomials with a global sign, or None when the form
    /// part dies.
    fn eliminate(&self, q: usize) -> Option<(Vec<(SullivanMonomial, ExactScalar)>, i64)> {
        // expand the dt_0 factor first (at most one is present)
        let mut parts: Vec<(Vec<usize>, i64)> = Vec::new();
        if let Some(pos) = self.dts.iter().position(|x| *x == 0) {
            debug_assert_eq!(pos, 0);
            let rest = &self.dts[1..];
            for j in 1..=q {
                if rest.contains(&j) {
                    continue;
                }
                let (dts, sign) = wedge_insert(rest, j);
                parts.push((dts, -sign));
            }
            if parts.is_empty() {
                return None;
            }
        } else {
            parts.push((self.dts.clone(), 1));
        }
        // expand (1 − t_1 − … − t_q)^{a_0}
        let mut polys: Vec<(Vec<u32>, ExactScalar)> =
            vec![(self.powers[1..].to_vec(), ExactScalar::one())];
        for _ in 0..self.powers[0] {
            let mut next: Vec<(Vec<u32>, ExactScalar)> = Vec::new();
            for (pw, c) in &polys {
                // multiply by (1 − Σ t_j)
                push_term(&mut next, pw.clone(), c.clone());
                for j in 0..q {
                    let mut p2 = pw.clone();
                    p2[j] += 1;
                    push_term(&mut next, p2, -c);
                }
            }
            polys = next;
        }
        let mut out = Vec::new();
        for (dts, dsign) in &parts {
            for (pw, c) in &polys {
                out.push((
                    SullivanMonomial { powers: pw.clone(), dts: dts.clone() },
                    c.scale_int(*dsign),
                ));
            }
        }
        Some((out, 1))
    }
}

fn push_term(acc: &mut Vec<(Vec<u32>, ExactScalar)>, pw: Vec<u32>, c: ExactScalar) {
    for (epw, ec) in acc.iter_mut() {
        if *epw == pw {
            *ec += &c;
            return;
        }
    }
    acc.push((pw, c));
}

/// Multiply out by Σ_{j ∈ pre} t_j in full coordinates.
fn full_mul_linear(
    acc: &[(FullMonomial, ExactScalar)],
    pre: &[usize],
    q: usize,
) -> Vec<(FullMonomial, ExactScalar)> {
    let mut out = Vec::new();
    for (m, c) in acc {
        for j in pre {
            let mut m2 = m.clone();
            m2.powers[*j] += 1;
            out.push((m2, c.clone()));
        }
    }
    let _ = q;
    out
}

/// Wedge with Σ_{j ∈ pre} dt_j in full coordinates.
fn full_wedge_linear(
    acc: &[(FullMonomial, ExactScalar)],
    pre: &[usize],
    q: usize,
) -> Vec<(FullMonomial, ExactScalar)> {
    let mut out = Vec::new();
    for (m, c) in acc {
        for j in pre {
            if m.dts.contains(j) {
                continue;
            }
            // existing dts are wedged on the left in construction order;
            // keep a canonical ascending order with the insertion sign
            let pos = m.dts.iter().take_while(|x| **x < *j).count();
            let transpositions = m.dts.len() - pos;
            let sign = if transpositions % 2 == 0 { 1 } else { -1 };
            let mut m2 = m.clone();
            m2.dts.insert(pos, *j);
            out.push((m2, c.scale_int(sign)));
        }
    }
    let _ = q;
    out
}

/// The vertex map of a face inclusion σ ⊂ τ: positions of σ's vertices
/// inside τ, as a monotone injection [dim σ] → [dim τ].
pub fn monotone_inclusion(sigma: &[usize], tau: &[usize]) -> Vec<usize> {
    sigma
        .iter()
        .map(|v| tau.iter().position(|w| w == v).expect("σ ⊂ τ"))
        .collect()
}
