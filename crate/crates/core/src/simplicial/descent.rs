//! Descent data for the Deligne two-groupoid of a cosimplicial DGLA, their
//! verification, and the deviation cochains measuring how far a triple is
//! from descent (with the matching statements for isomorphisms and
//! two-isomorphisms).
//!
//! The total complex of the double grading (level n, DGLA degree q)
//! carries the differential (Dξ)_n = ∂ξ_{n−1} + (−1)^n d ξ_n. Deviations
//! extracted at the first order above a verified truncation assemble into
//! D-closed total cochains; on abelian models the deviation of a perturbed
//! exact datum is literally D applied to the perturbation.

use std::sync::Arc;

use serde::Serialize;

use crate::deligne::{gauge_apply, gamma, mc_defect, twisted_product};
use crate::dgla::{bch, exp_ad, GradedElement};
use crate::scalars::{ArtinianSeries, ExactScalar};
use crate::Error;

use super::sullivan::{FormCoeff, SullivanForm, SullivanMonomial};
use super::CosimplicialDgla;

/// The carrier triple (λ, G = exp x, c = exp t) of a (near-)descent datum.
#[derive(Clone)]
pub struct DescentDatum {
    pub cosimplicial: Arc<CosimplicialDgla>,
    /// λ ∈ L^{0,1} ⊗ 𝔪
    pub lambda: GradedElement,
    /// x ∈ L^{1,0} ⊗ 𝔪 with G = exp x
    pub gauge: GradedElement,
    /// t ∈ L^{2,−1} ⊗ 𝔪 with c = exp t
    pub two: GradedElement,
    pub certified: bool,
}

impl DescentDatum {
    pub fn new_unchecked(
        cosimplicial: &Arc<CosimplicialDgla>,
        lambda: GradedElement,
        gauge: GradedElement,
        two: GradedElement,
    ) -> Self {
        DescentDatum {
            cosimplicial: cosimplicial.clone(),
            lambda,
            gauge,
            two,
            certified: false,
        }
    }

    pub fn certify(
        cosimplicial: &Arc<CosimplicialDgla>,
        lambda: GradedElement,
        gauge: GradedElement,
        two: GradedElement,
    ) -> Result<Self, Error> {
        let mut d = Self::new_unchecked(cosimplicial, lambda, gauge, two);
        let report = descent_verify(&d)?;
        if !report.all_pass() {
            return Err(Error::Domain(format!("descent conditions fail: {report:?}")));
        }
        d.certified = true;
        Ok(d)
    }

    pub fn zero(cosimplicial: &Arc<CosimplicialDgla>, trunc: i64) -> Self {
        DescentDatum {
            cosimplicial: cosimplicial.clone(),
            lambda: GradedElement::zero(cosimplicial.level(0), trunc),
            gauge: GradedElement::zero(cosimplicial.level(1), trunc),
            two: GradedElement::zero(cosimplicial.level(2), trunc),
            certified: true,
        }
    }

    pub fn truncation_order(&self) -> i64 {
        self.lambda.truncation_order()
    }
}

/// One descent condition: pass/fail with the first failing ħ-order.
#[derive(Clone, Debug, Serialize)]
pub struct OrderCheck {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failing_order: Option<i64>,
}

impl OrderCheck {
    fn from_defect(defect: &GradedElement) -> Self {
        match defect.lowest_order() {
            None => OrderCheck { pass: true, first_failing_order: None },
            Some(k) => OrderCheck { pass: false, first_failing_order: Some(k) },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DescentReport {
    pub mc: OrderCheck,
    pub gauge: OrderCheck,
    pub two_morphism: OrderCheck,
    pub tetrahedron: OrderCheck,
}

impl DescentReport {
    pub fn all_pass(&self) -> bool {
        self.mc.pass && self.gauge.pass && self.two_morphism.pass && self.tetrahedron.pass
    }

    /// Smallest ħ-order at which any condition fails.
    pub fn first_failing_order(&self) -> Option<i64> {
        [&self.mc, &self.gauge, &self.two_morphism, &self.tetrahedron]
            .iter()
            .filter_map(|c| c.first_failing_order)
            .min()
    }
}

struct DescentDefects {
    mc: GradedElement,
    gauge: GradedElement,
    two_morphism: GradedElement,
    tetrahedron: GradedElement,
}

fn descent_defects(d: &DescentDatum) -> Result<DescentDefects, Error> {
    let c = &d.cosimplicial;
    if c.cap() < 3 {
        return Err(Error::Domain("descent verification needs levels up to 3".into()));
    }
    // MC at level 0
    let mc = mc_defect(&d.lambda)?;
    // gauge at level 1: exp(x) sends λ₁ to λ₀
    let lam0 = c.image_at(&d.lambda, 0, 1, &[0]);
    let lam1 = c.image_at(&d.lambda, 0, 1, &[1]);
    let gauge = gauge_apply(&d.gauge, &lam1)?.sub(&lam0);
    // two-morphism at level 2: exp(x₀₂) = γ(t)·exp(x₀₁)·exp(x₁₂)
    let lam0_2 = c.image_at(&d.lambda, 0, 2, &[0]);
    let x01 = c.image_at(&d.gauge, 1, 2, &[0, 1]);
    let x12 = c.image_at(&d.gauge, 1, 2, &[1, 2]);
    let x02 = c.image_at(&d.gauge, 1, 2, &[0, 2]);
    let two_morphism = bch(&gamma(&lam0_2, &d.two), &bch(&x01, &x12)?)?.sub(&x02);
    // tetrahedron at level 3: the alternated composite of the four faces
    let tetrahedron = phi(d)?;
    Ok(DescentDefects { mc, gauge, two_morphism, tetrahedron })
}

/// Φ = ((G₀₁(c₁₂₃)⁻¹ · c₀₁₃⁻¹) · c₀₂₃) · c₀₁₂ in the λ₀-twisted group at
/// level 3; the identity exactly when the tetrahedron condition holds.
fn phi(d: &DescentDatum) -> Result<GradedElement, Error> {
    let c = &d.cosimplicial;
    let lam0_3 = c.image_at(&d.lambda, 0, 3, &[0]);
    let x01_3 = c.image_at(&d.gauge, 1, 3, &[0, 1]);
    let t123 = c.image_at(&d.two, 2, 3, &[1, 2, 3]);
    let t013 = c.image_at(&d.two, 2, 3, &[0, 1, 3]);
    let t023 = c.image_at(&d.two, 2, 3, &[0, 2, 3]);
    let t012 = c.image_at(&d.two, 2, 3, &[0, 1, 2]);
    let whiskered = exp_ad(&x01_3, &t123)?;
    twisted_product(&lam0_3, &[&whiskered.neg(), &t013.neg(), &t023, &t012])
}

/// Check the four descent conditions exactly, reporting the first failing
/// ħ-order for each.
pub fn descent_verify(d: &DescentDatum) -> Result<DescentReport, Error> {
    let defects = descent_defects(d)?;
    Ok(DescentReport {
        mc: OrderCheck::from_defect(&defects.mc),
        gauge: OrderCheck::from_defect(&defects.gauge),
        two_morphism: OrderCheck::from_defect(&defects.two_morphism),
        tetrahedron: OrderCheck::from_defect(&defects.tetrahedron),
    })
}

fn require_verified_to(report: &DescentReport, order: i64, what: &str) -> Result<(), Error> {
    if let Some(k) = report.first_failing_order() {
        if k <= order {
            return Err(Error::FirstFailingOrder { condition: what.to_string(), order: k });
        }
    }
    Ok(())
}

/// A cochain of the total complex: homogeneous components per level, each
/// a plain exact-scalar coefficient vector in one DGLA degree.
#[derive(Clone, Debug)]
pub struct TotalCochain {
    pub cosimplicial: Arc<CosimplicialDgla>,
    /// (level, DGLA degree, coefficients)
    pub components: Vec<(usize, i64, Vec<ExactScalar>)>,
}

impl TotalCochain {
    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|(_, _, v)| v.iter().all(|c| c.is_zero()))
    }

    fn component(&self, level: usize, degree: i64) -> Vec<ExactScalar> {
        let dim = self.cosimplicial.level(level).dim(degree);
        let mut out = vec![ExactScalar::zero(); dim];
        for (n, q, v) in &self.components {
            if *n == level && *q == degree {
                for (i, c) in v.iter().enumerate() {
                    out[i] += c;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &TotalCochain) -> TotalCochain {
        let mut components = self.components.clone();
        for (n, q, v) in &other.components {
            components.push((*n, *q, v.iter().map(|c| -c).collect()));
        }
        TotalCochain { cosimplicial: self.cosimplicial.clone(), components }.normalize()
    }

    fn normalize(&self) -> TotalCochain {
        let mut keys: Vec<(usize, i64)> =
            self.components.iter().map(|(n, q, _)| (*n, *q)).collect();
        keys.sort_unstable();
        keys.dedup();
        let components = keys
            .into_iter()
            .map(|(n, q)| (n, q, self.component(n, q)))
            .filter(|(_, _, v)| v.iter().any(|c| !c.is_zero()))
            .collect();
        TotalCochain { cosimplicial: self.cosimplicial.clone(), components }
    }

    /// The total differential (Dξ)_n = ∂ξ_{n−1} + (−1)^n d ξ_n.
    pub fn total_d(&self) -> TotalCochain {
        let mut components = Vec::new();
        for (n, q, v) in &self.components {
            let l = self.cosimplicial.level(*n);
            // (−1)^n d
            if let Some(m) = l.differential_matrix(*q) {
                let mut dv = m.apply(v);
                if n % 2 == 1 {
                    for c in dv.iter_mut() {
                        *c = -&*c;
                    }
                }
                components.push((*n, q + 1, dv));
            }
            // ∂ into level n+1
            if *n + 1 <= self.cosimplicial.cap() {
                let target_dim = self.cosimplicial.level(n + 1).dim(*q);
                let mut acc = vec![ExactScalar::zero(); target_dim];
                for i in 0..=(n + 1) {
                    let map = self.cosimplicial.coface(*n, i);
                    if let Some(m) = map.matrix(*q) {
                        let img = m.apply(v);
                        for (slot, c) in img.into_iter().enumerate() {
                            if i % 2 == 0 {
                                acc[slot] += &c;
                            } else {
                                acc[slot] += &(-&c);
                            }
                        }
                    }
                }
                components.push((n + 1, *q, acc));
            }
        }
        TotalCochain { cosimplicial: self.cosimplicial.clone(), components }.normalize()
    }
}

fn order_component(
    cosimplicial: &Arc<CosimplicialDgla>,
    x: &GradedElement,
    level: usize,
    degree: i64,
    order: i64,
    negate: bool,
) -> (usize, i64, Vec<ExactScalar>) {
    let dim = cosimplicial.level(level).dim(degree);
    let mut v = vec![ExactScalar::zero(); dim];
    for i in 0..dim {
        let c = x.coeff((degree, i)).coeff(order);
        v[i] = if negate { -&c } else { c };
    }
    (level, degree, v)
}

/// The deviation quadruple (R, Z, T, Φ) of a near-descent triple, carried
/// as full series elements.
#[derive(Clone)]
pub struct DeviationTuple {
    pub cosimplicial: Arc<CosimplicialDgla>,
    pub components: Vec<(usize, i64, GradedElement, bool)>,
    pub order: i64,
}

impl DeviationTuple {
    /// The order-(n+1) coefficients assembled into the total cochain whose
    /// D-closure the corollaries assert; the negated flags realize the
    /// (…, −last) sign in their statements.
    pub fn total_cochain(&self) -> TotalCochain {
        let components = self
            .components
            .iter()
            .map(|(n, q, x, neg)| {
                order_component(&self.cosimplicial, x, *n, *q, self.order, *neg)
            })
            .collect();
        TotalCochain { cosimplicial: self.cosimplicial.clone(), components }
    }
}

/// Extract the degree-three deviation (R, Z, T, −Φ) of a triple that is a
/// descent datum modulo ħ^{order}; R = dλ + ½[λ,λ], Z = G(d+λ₁) − (d+λ₀),
/// T solves the two-morphism equation and Φ the tetrahedron comparison.
/// The quadruple's order-`order` part is a (d+∂)-cocycle of degree three.
pub fn deviation_cocycle(d: &DescentDatum, order: i64) -> Result<DeviationTuple, Error> {
    let defects = descent_defects(d)?;
    let report = DescentReport {
        mc: OrderCheck::from_defect(&defects.mc),
        gauge: OrderCheck::from_defect(&defects.gauge),
        two_morphism: OrderCheck::from_defect(&defects.two_morphism),
        tetrahedron: OrderCheck::from_defect(&defects.tetrahedron),
    };
    require_verified_to(&report, order - 1, "descent datum")?;

    let c = &d.cosimplicial;
    // R and Z are the literal defect elements
    let r = defects.mc;
    let z = defects.gauge;
    // T measured from γ·G₀₁·G₁₂ against G₀₂: abelianizes to ∂x + dt
    let lam0_2 = c.image_at(&d.lambda, 0, 2, &[0]);
    let x01 = c.image_at(&d.gauge, 1, 2, &[0, 1]);
    let x12 = c.image_at(&d.gauge, 1, 2, &[1, 2]);
    let x02 = c.image_at(&d.gauge, 1, 2, &[0, 2]);
    let t = bch(&gamma(&lam0_2, &d.two), &bch(&x01, &bch(&x12, &x02.neg())?)?)?;
    let phi = phi(d)?;
    Ok(DeviationTuple {
        cosimplicial: c.clone(),
        components: vec![
            (0, 2, r, false),
            (1, 1, z, false),
            (2, 0, t, false),
            (3, -1, phi, true),
        ],
        order,
    })
}

/// The carrier pair (H = exp h, b = exp s) of a (near-)isomorphism of
/// descent data.
#[derive(Clone)]
pub struct IsoData {
    /// h ∈ L^{0,0} ⊗ 𝔪
    pub h: GradedElement,
    /// s ∈ L^{1,−1} ⊗ 𝔪
    pub s: GradedElement,
}

struct IsoDefects {
    c: GradedElement,
    s: GradedElement,
    psi: GradedElement,
}

fn iso_defects(
    source: &DescentDatum,
    target: &DescentDatum,
    iso: &IsoData,
) -> Result<IsoDefects, Error> {
    let cos = &source.cosimplicial;
    // C = H(d+λ) − (d+λ′) at level 0
    let c = gauge_apply(&iso.h, &source.lambda)?.sub(&target.lambda);
    // S from H₀·G = S·β·G′·H₁ at level 1
    let h0 = cos.image_at(&iso.h, 0, 1, &[0]);
    let h1 = cos.image_at(&iso.h, 0, 1, &[1]);
    let lam_t0 = cos.image_at(&target.lambda, 0, 1, &[0]);
    let beta_log = gamma(&lam_t0, &iso.s);
    let s = bch(
        &h0,
        &bch(&source.gauge, &bch(&h1.neg(), &bch(&target.gauge.neg(), &beta_log.neg())?)?)?,
    )?;
    // Ψ at level 2, twisted by the target λ′₀: the route comparison
    // H₀(c₀₁₂)⁻¹ ∘ b₀₂ ∘ c′₀₁₂ ∘ G′₀₁(b₁₂)⁻¹ ∘ b₀₁⁻¹, abelianizing to
    // (t′ − t) − ∂s
    let lam_t0_2 = cos.image_at(&target.lambda, 0, 2, &[0]);
    let h0_2 = cos.image_at(&iso.h, 0, 2, &[0]);
    let xp01 = cos.image_at(&target.gauge, 1, 2, &[0, 1]);
    let s01 = cos.image_at(&iso.s, 1, 2, &[0, 1]);
    let s12 = cos.image_at(&iso.s, 1, 2, &[1, 2]);
    let s02 = cos.image_at(&iso.s, 1, 2, &[0, 2]);
    let h0_t = exp_ad(&h0_2, &source.two)?;
    let gp_s12 = exp_ad(&xp01, &s12)?;
    let psi = twisted_product(
        &lam_t0_2,
        &[&h0_t.neg(), &s02, &target.two, &gp_s12.neg(), &s01.neg()],
    )?;
    Ok(IsoDefects { c, s, psi })
}

/// Deviation (C, S, −Ψ) of a pair that is an isomorphism of the two exact
/// descent data modulo ħ^{order}; the order-`order` part is a
/// (d+∂)-cocycle of degree two.
pub fn iso_deviation(
    source: &DescentDatum,
    target: &DescentDatum,
    iso: &IsoData,
    order: i64,
) -> Result<DeviationTuple, Error> {
    for (d, what) in [(source, "source datum"), (target, "target datum")] {
        let rep = descent_verify(d)?;
        if !rep.all_pass() {
            return Err(Error::Domain(format!("{what} is not an exact descent datum")));
        }
    }
    let defects = iso_defects(source, target, iso)?;
    for (x, what) in [(&defects.c, "C"), (&defects.s, "S"), (&defects.psi, "Ψ")] {
        if let Some(k) = x.lowest_order() {
            if k <= order - 1 {
                return Err(Error::FirstFailingOrder {
                    condition: format!("isomorphism condition {what}"),
                    order: k,
                });
            }
        }
    }
    Ok(DeviationTuple {
        cosimplicial: source.cosimplicial.clone(),
        components: vec![
            (0, 1, defects.c, false),
            (1, 0, defects.s, false),
            (2, -1, defects.psi, true),
        ],
        order,
    })
}

/// Deviation (P, −Ω) of a degree-(−1) element r that is a two-isomorphism
/// between the exact isomorphisms (H, b) and (H̃, b̃) modulo ħ^{order};
/// the order-`order` part is a (d+∂)-cocycle of degree one.
pub fn two_iso_deviation(
    source: &DescentDatum,
    target: &DescentDatum,
    iso: &IsoData,
    iso_tilde: &IsoData,
    r: &GradedElement,
    order: i64,
) -> Result<DeviationTuple, Error> {
    for (i, what) in [(iso, "first isomorphism"), (iso_tilde, "second isomorphism")] {
        let defects = iso_defects(source, target, i)?;
        if !defects.c.is_zero() || !defects.s.is_zero() || !defects.psi.is_zero() {
            return Err(Error::Domain(format!("{what} is not exact")));
        }
    }
    let cos = &source.cosimplicial;
    // P from H̃ = P·α·H at level 0, α = exp(dr + [λ′, r])
    let alpha_log = gamma(&target.lambda, r);
    let p = bch(&iso_tilde.h, &bch(&iso.h.neg(), &alpha_log.neg())?)?;
    // Ω from b̃₀₁·a₀ = Ω·G′₀₁(a₁)·b₀₁ at level 1, oriented so that Ω
    // abelianizes to ∂r − (s̃ − s)
    let lam_t0 = cos.image_at(&target.lambda, 0, 1, &[0]);
    let r0 = cos.image_at(r, 0, 1, &[0]);
    let r1 = cos.image_at(r, 0, 1, &[1]);
    let gp_r1 = exp_ad(&target.gauge, &r1)?;
    let omega = twisted_product(
        &lam_t0,
        &[&gp_r1, &iso.s, &r0.neg(), &iso_tilde.s.neg()],
    )?;
    for (x, what) in [(&p, "P"), (&omega, "Ω")] {
        if let Some(k) = x.lowest_order() {
            if k <= order - 1 {
                return Err(Error::FirstFailingOrder {
                    condition: format!("two-isomorphism condition {what}"),
                    order: k,
                });
            }
        }
    }
    Ok(DeviationTuple {
        cosimplicial: cos.clone(),
        components: vec![(0, 0, p, false), (1, -1, omega, true)],
        order,
    })
}

/// The Čech–Whitney totalization of an abelian descent datum: the level-q
/// component Σ tᵢ λ₍ᵢ₎ + Σ (tᵢdtⱼ − tⱼdtᵢ) x₍ᵢⱼ₎ + Σ 2(tᵢdtⱼdt_k − …) t₍ᵢⱼ_k₎.
/// For a certified datum in an abelian cosimplicial DGLA this family is a
/// Maurer-Cartan element of the totalization.
pub fn whitney_form(d: &DescentDatum, q: usize) -> SullivanForm<GradedElement> {
    let c = &d.cosimplicial;
    let mut out: SullivanForm<GradedElement> = SullivanForm::zero(q);
    let monomial_t = |i: usize| -> Vec<(SullivanMonomial, ExactScalar)> {
        // tᵢ in eliminated coordinates: t₀ = 1 − Σ t_j
        if i == 0 {
            let mut v = vec![(SullivanMonomial::one(q), ExactScalar::one())];
            for j in 1..=q {
                let mut powers = vec![0; q];
                powers[j - 1] = 1;
                v.push((SullivanMonomial { powers, dts: vec![] }, ExactScalar::from_int(-1)));
            }
            v
        } else {
            let mut powers = vec![0; q];
            powers[i - 1] = 1;
            vec![(SullivanMonomial { powers, dts: vec![] }, ExactScalar::one())]
        }
    };
    let monomial_dt = |i: usize| -> Vec<(SullivanMonomial, ExactScalar)> {
        if i == 0 {
            (1..=q)
                .map(|j| {
                    (
                        SullivanMonomial { powers: vec![0; q], dts: vec![j] },
                        ExactScalar::from_int(-1),
                    )
                })
                .collect()
        } else {
            vec![(SullivanMonomial { powers: vec![0; q], dts: vec![i] }, ExactScalar::one())]
        }
    };
    let wedge = |a: &[(SullivanMonomial, ExactScalar)],
                 b: &[(SullivanMonomial, ExactScalar)]|
     -> Vec<(SullivanMonomial, ExactScalar)> {
        let mut fa: SullivanForm<ExactScalar> = SullivanForm::zero(q);
        for (m, c) in a {
            fa.add_term(m.clone(), c.clone());
        }
        let mut fb: SullivanForm<ExactScalar> = SullivanForm::zero(q);
        for (m, c) in b {
            fb.add_term(m.clone(), c.clone());
        }
        fa.wedge_with(&fb, |x, y, _, _| x * y)
            .terms()
            .map(|(m, v)| (m.clone(), v.clone()))
            .collect()
    };

    for i in 0..=q {
        let lam_i = c.image_at(&d.lambda, 0, q, &[i]);
        for (m, s) in monomial_t(i) {
            out.add_term(m, lam_i.scale_scalar(&s));
        }
    }
    for i in 0..q {
        for j in (i + 1)..=q {
            let x_ij = c.image_at(&d.gauge, 1, q, &[i, j]);
            let w = {
                let mut v = wedge(&monomial_t(i), &monomial_dt(j));
                for (m, s) in wedge(&monomial_t(j), &monomial_dt(i)) {
                    v.push((m, -&s));
                }
                v
            };
            for (m, s) in w {
                out.add_term(m, x_ij.scale_scalar(&s));
            }
        }
    }
    for i in 0..q {
        for j in (i + 1)..q {
            for k in (j + 1)..=q {
                let t_ijk = c.image_at(&d.two, 2, q, &[i, j, k]);
                let mut v = wedge(&wedge(&monomial_t(i), &monomial_dt(j)), &monomial_dt(k));
                for (m, s) in wedge(&wedge(&monomial_t(j), &monomial_dt(i)), &monomial_dt(k)) {
                    v.push((m, -&s));
                }
                for (m, s) in wedge(&wedge(&monomial_t(k), &monomial_dt(i)), &monomial_dt(j)) {
                    v.push((m, s));
                }
                for (m, s) in v {
                    out.add_term(m, t_ijk.scale_scalar(&s.scale_int(2)));
                }
            }
        }
    }
    out
}

/// d_DR + level-differential on a Sullivan form with DGLA coefficients at
/// level q: d_tot(ω ⊗ a) = d_DR ω ⊗ a + (−1)^{|ω|} ω ⊗ da.
pub fn tot_differential(f: &SullivanForm<GradedElement>) -> SullivanForm<GradedElement> {
    let mut out = f.d();
    for (m, v) in f.terms() {
        let sign = if m.form_degree() % 2 == 0 { 1 } else { -1 };
        let dv = v.d().scale_scalar(&ExactScalar::from_int(sign));
        if !FormCoeff::is_zero(&dv) {
            out.add_term(m.clone(), dv);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{cech_complex, CechComplex, Nerve, SimplicialDglaSheaf};
    use super::*;
    use crate::dgla::{fixtures, DglaPresentation};
    use rand::{Rng, SeedableRng};

    fn abelian_cech(trunc_levels: usize) -> CechComplex {
        // two-element cover, constant abelian sheaf with a nonzero d
        let nerve = Nerve::from_simplices(2, &[vec![0, 1]]).unwrap();
        let l = {
            use crate::linalg::Matrix;
            let mut m0 = Matrix::zero(1, 1);
            *m0.at_mut(0, 0) = ExactScalar::one();
            crate::dgla::DglaBuilder::new("ab", -1, 2, &[1, 1, 1, 1])
                .set_differential(0, m0.clone())
                .set_differential(-1, {
                    // d² = 0 forces the composite to vanish; use d(-1) = 0
                    Matrix::zero(1, 1)
                })
                .build()
        };
        let sheaf = SimplicialDglaSheaf::constant(nerve, &l);
        cech_complex(&sheaf, trunc_levels).unwrap()
    }

    fn nilpotent_cech() -> CechComplex {
        // two-element cover, constant 2-step sheaf End(V₀ ⊕ V₁)
        let nerve = Nerve::from_simplices(2, &[vec![0, 1]]).unwrap();
        let l = fixtures::graded_gl2("gl", 1, 2, true);
        let sheaf = SimplicialDglaSheaf::constant(nerve, &l);
        cech_complex(&sheaf, 4).unwrap()
    }

    fn random_element(
        rng: &mut rand_chacha::ChaCha8Rng,
        l: &Arc<DglaPresentation>,
        degree: i64,
        trunc: i64,
        orders: std::ops::RangeInclusive<i64>,
    ) -> GradedElement {
        let mut e = GradedElement::zero(l, trunc);
        for i in 0..l.dim(degree) {
            let mut s = ArtinianSeries::zero(trunc);
            for k in orders.clone() {
                s.set_coeff(k, ExactScalar::from_ratio(rng.gen_range(-3i64..=3), 1));
            }
            e.set_coeff((degree, i), s);
        }
        e
    }

    /// Exact descent datum obtained by transporting the zero datum along a
    /// random pair (exp a, exp b); works in any model.
    fn transported_datum(
        cech: &CechComplex,
        rng: &mut rand_chacha::ChaCha8Rng,
        trunc: i64,
    ) -> DescentDatum {
        let cos = &cech.cosimplicial;
        let a = random_element(rng, cos.level(0), 0, trunc, 1..=trunc);
        let b = random_element(rng, cos.level(1), -1, trunc, 1..=trunc);
        transport_zero(cos, &a, &b, trunc)
    }

    fn transport_zero(
        cos: &Arc<CosimplicialDgla>,
        a: &GradedElement,
        b: &GradedElement,
        trunc: i64,
    ) -> DescentDatum {
        let zero_l0 = GradedElement::zero(cos.level(0), trunc);
        let lambda = gauge_apply(a, &zero_l0).unwrap();
        // x from S = 1: exp(x) = β⁻¹·H₀·H₁⁻¹ with β = exp(db + [λ₀, b])
        let lam0 = cos.image_at(&lambda, 0, 1, &[0]);
        let a0 = cos.image_at(a, 0, 1, &[0]);
        let a1 = cos.image_at(a, 0, 1, &[1]);
        let beta_log = gamma(&lam0, b);
        let x = bch(&beta_log.neg(), &bch(&a0, &a1.neg()).unwrap()).unwrap();
        // t from Ψ = 1 with the source two-morphism zero:
        // t = b₀₂⁻¹ ∘ H₀(0) ∘ b₀₁ ∘ G′₀₁(b₁₂)
        let lam0_2 = cos.image_at(&lambda, 0, 2, &[0]);
        let x01 = cos.image_at(&x, 1, 2, &[0, 1]);
        let b01 = cos.image_at(b, 1, 2, &[0, 1]);
        let b12 = cos.image_at(b, 1, 2, &[1, 2]);
        let b02 = cos.image_at(b, 1, 2, &[0, 2]);
        let whisk = exp_ad(&x01, &b12).unwrap();
        let t = twisted_product(&lam0_2, &[&b02.neg(), &b01, &whisk]).unwrap();
        DescentDatum::new_unchecked(cos, lambda, x, t)
    }

    #[test]
    fn zero_datum_passes() {
        let cech = abelian_cech(3);
        let d = DescentDatum::zero(&cech.cosimplicial, 2);
        let rep = descent_verify(&d).unwrap();
        assert!(rep.all_pass());
    }

    #[test]
    fn coboundary_datum_passes_in_abelian_model() {
        // datum built from a genuine Čech 1-cochain gauge: conditions
        // linearize to cocycle identities
        let cech = abelian_cech(3);
        let cos = &cech.cosimplicial;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(101);
        let trunc = 2;
        for _ in 0..5 {
            let a = random_element(&mut rng, cos.level(0), 0, trunc, 1..=trunc);
            let b = random_element(&mut rng, cos.level(1), -1, trunc, 1..=trunc);
            // abelian transport: λ = −da, x = −∂a + db, t = −∂b
            let lambda = a.d().neg();
            let x = cos.cech_d(&a, 0).neg().add(&b.d());
            let t = cos.cech_d(&b, 1).neg();
            let d = DescentDatum::new_unchecked(cos, lambda, x, t);
            let rep = descent_verify(&d).unwrap();
            assert!(rep.all_pass(), "{rep:?}");
        }
    }

    #[test]
    fn transported_datum_passes_in_nilpotent_model() {
        // the nonabelian transport of the zero datum must satisfy all four
        // conditions exactly, pinning the orientation conventions
        let cech = nilpotent_cech();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(103);
        for _ in 0..5 {
            let d = transported_datum(&cech, &mut rng, 3);
            let rep = descent_verify(&d).unwrap();
            assert!(rep.all_pass(), "{rep:?}");
        }
    }

    #[test]
    fn perturbed_datum_reports_failing_order() {
        let cech = nilpotent_cech();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(107);
        let trunc = 3;
        let exact = transported_datum(&cech, &mut rng, trunc);
        // perturb the two-morphism at order 1
        let mut bad = exact.clone();
        let pert =
            random_element(&mut rng, cech.cosimplicial.level(2), -1, trunc, 1..=1);
        bad.two = bad.two.add(&pert);
        let rep = descent_verify(&bad).unwrap();
        assert!(!rep.all_pass());
        assert_eq!(rep.first_failing_order(), Some(1));
    }

    #[test]
    fn total_differential_squares_to_zero() {
        let cech = nilpotent_cech();
        let cos = &cech.cosimplicial;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(109);
        for _ in 0..5 {
            let mut components = Vec::new();
            for (level, degree) in [(0usize, 0i64), (1, -1), (1, 0), (2, -1)] {
                let dim = cos.level(level).dim(degree);
                let v: Vec<ExactScalar> =
                    (0..dim).map(|_| ExactScalar::from_int(rng.gen_range(-3i64..=3))).collect();
                components.push((level, degree, v));
            }
            let xi = TotalCochain { cosimplicial: cos.clone(), components };
            assert!(xi.total_d().total_d().is_zero());
        }
    }

    #[test]
    fn deviation_equals_total_d_of_perturbation_abelian() {
        // the literal statement: perturbing an exact abelian datum at order
        // n+1 makes the quadruple equal D(perturbation) at that order
        let cech = abelian_cech(4);
        let cos = &cech.cosimplicial;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(113);
        let trunc = 2;
        for n in [0i64, 1] {
            for _ in 0..5 {
                // exact datum: abelian coboundary up to order n, zero above
                let a = random_element(&mut rng, cos.level(0), 0, trunc, 1..=n.max(1));
                let b = random_element(&mut rng, cos.level(1), -1, trunc, 1..=n.max(1));
                let lambda = a.d().neg();
                let x = cos.cech_d(&a, 0).neg().add(&b.d());
                let t = cos.cech_d(&b, 1).neg();
                // order-(n+1) perturbation (u, v, w)
                let u = random_element(&mut rng, cos.level(0), 1, trunc, (n + 1)..=(n + 1));
                let v = random_element(&mut rng, cos.level(1), 0, trunc, (n + 1)..=(n + 1));
                let w = random_element(&mut rng, cos.level(2), -1, trunc, (n + 1)..=(n + 1));
                let d = DescentDatum::new_unchecked(
                    cos,
                    lambda.add(&u),
                    x.add(&v),
                    t.add(&w),
                );
                let tuple = deviation_cocycle(&d, n + 1).unwrap();
                let extracted = tuple.total_cochain();
                // closure
                assert!(extracted.total_d().is_zero());
                // equality with D(u, v, w) at order n+1
                let pert = TotalCochain {
                    cosimplicial: cos.clone(),
                    components: vec![
                        order_component(cos, &u, 0, 1, n + 1, false),
                        order_component(cos, &v, 1, 0, n + 1, false),
                        order_component(cos, &w, 2, -1, n + 1, false),
                    ],
                };
                assert!(extracted.sub(&pert.total_d()).is_zero());
            }
        }
    }

    #[test]
    fn deviation_closed_in_nilpotent_model() {
        let cech = nilpotent_cech();
        let cos = &cech.cosimplicial;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(127);
        let trunc = 3;
        for n in [0i64, 1] {
            for _ in 0..5 {
                // exact datum truncated at order n, then perturbed above
                let exact = {
                    let a = random_element(&mut rng, cos.level(0), 0, trunc, 1..=n.max(1));
                    let b = random_element(&mut rng, cos.level(1), -1, trunc, 1..=n.max(1));
                    transport_zero(cos, &a, &b, trunc)
                };
                let u = random_element(&mut rng, cos.level(0), 1, trunc, (n + 1)..=(n + 1));
                let v = random_element(&mut rng, cos.level(1), 0, trunc, (n + 1)..=(n + 1));
                let w = random_element(&mut rng, cos.level(2), -1, trunc, (n + 1)..=(n + 1));
                let d = DescentDatum::new_unchecked(
                    cos,
                    exact.lambda.add(&u),
                    exact.gauge.add(&v),
                    exact.two.add(&w),
                );
                let tuple = deviation_cocycle(&d, n + 1).unwrap();
                assert!(tuple.total_cochain().total_d().is_zero());
            }
        }
    }

    #[test]
    fn exact_datum_has_zero_deviation() {
        let cech = nilpotent_cech();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(131);
        let d = transported_datum(&cech, &mut rng, 3);
        let tuple = deviation_cocycle(&d, 1).unwrap();
        assert!(tuple.total_cochain().is_zero());
        // and at every order
        for comp in &tuple.components {
            assert!(comp.2.is_zero());
        }
    }

    #[test]
    fn deviation_precondition_reports_true_failing_order() {
        let cech = nilpotent_cech();
        let cos = &cech.cosimplicial;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(137);
        let trunc = 3;
        let exact = transported_datum(&cech, &mut rng, trunc);
        let w = random_element(&mut rng, cos.level(2), -1, trunc, 1..=1);
        let d = DescentDatum::new_unchecked(
            cos,
            exact.lambda.clone(),
            exact.gauge.clone(),
            exact.two.add(&w),
        );
        match deviation_cocycle(&d, 2) {
            Err(Error::FirstFailingOrder { order, .. }) => assert_eq!(order, 1),
            other => panic!("expected failing-order error, got {:?}", other.is_ok()),
        }
    }

    #[test]
    fn iso_deviation_closed_and_linearizes() {
        // identity isomorphism between equal exact data, perturbed at
        // order n+1: (C, S, −Ψ) is D-closed and equals D(−u, r)
        for (abelian, seed) in [(true, 139u64), (false, 149)] {
            let cech = if abelian { abelian_cech(4) } else { nilpotent_cech() };
            let cos = &cech.cosimplicial;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let trunc = 2;
            for n in [0i64, 1] {
                let datum = if abelian {
                    DescentDatum::zero(cos, trunc)
                } else {
                    transported_datum(&cech, &mut rng, trunc)
                };
                let u = random_element(&mut rng, cos.level(0), 0, trunc, (n + 1)..=(n + 1));
                let r = random_element(&mut rng, cos.level(1), -1, trunc, (n + 1)..=(n + 1));
                // order-n exact part of the iso: identity (h = 0, s = 0)
                // plus admissible order-n piece: a D-cocycle (dw₀, ∂w₀)
                let w0 = random_element(&mut rng, cos.level(0), -1, trunc, 1..=n.max(1));
                let h_exact = if n >= 1 { w0.d() } else { GradedElement::zero(cos.level(0), trunc) };
                // (h, s) = (dw₀, −∂w₀) satisfies the linearized conditions
                let s_exact = if n >= 1 {
                    cos.cech_d(&w0, 0).neg()
                } else {
                    GradedElement::zero(cos.level(1), trunc)
                };
                let iso = IsoData { h: h_exact.add(&u), s: s_exact.add(&r) };
                let tuple = match iso_deviation(&datum, &datum, &iso, n + 1) {
                    Ok(t) => t,
                    Err(e) => panic!("iso deviation failed: {e}"),
                };
                let extracted = tuple.total_cochain();
                assert!(extracted.total_d().is_zero(), "closure at n={n}");
                let pert = TotalCochain {
                    cosimplicial: cos.clone(),
                    components: vec![
                        order_component(cos, &u, 0, 0, n + 1, true),
                        order_component(cos, &r, 1, -1, n + 1, false),
                    ],
                };
                assert!(extracted.sub(&pert.total_d()).is_zero(), "linearization at n={n}");
            }
        }
    }

    #[test]
    fn two_iso_deviation_closed_and_linearizes() {
        for (abelian, seed) in [(true, 151u64), (false, 157)] {
            let cech = if abelian { abelian_cech(4) } else { nilpotent_cech() };
            let cos = &cech.cosimplicial;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let trunc = 2;
            for n in [0i64, 1] {
                let datum = if abelian {
                    DescentDatum::zero(cos, trunc)
                } else {
                    transported_datum(&cech, &mut rng, trunc)
                };
                let id_iso = IsoData {
                    h: GradedElement::zero(cos.level(0), trunc),
                    s: GradedElement::zero(cos.level(1), trunc),
                };
                let w = random_element(&mut rng, cos.level(0), -1, trunc, (n + 1)..=(n + 1));
                let tuple =
                    two_iso_deviation(&datum, &datum, &id_iso, &id_iso, &w, n + 1).unwrap();
                let extracted = tuple.total_cochain();
                assert!(extracted.total_d().is_zero());
                let pert = TotalCochain {
                    cosimplicial: cos.clone(),
                    components: vec![order_component(cos, &w, 0, -1, n + 1, true)],
                };
                assert!(extracted.sub(&pert.total_d()).is_zero());
            }
        }
    }

    #[test]
    fn whitney_form_is_mc_for_abelian_descent() {
        // certified abelian descent datum: the Čech–Whitney family is a
        // Maurer-Cartan element of Tot (abelian: closed of total degree 1)
        // and compatible under all face pullbacks up to the cap
        let cech = abelian_cech(4);
        let cos = &cech.cosimplicial;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(163);
        let trunc = 2;
        let a = random_element(&mut rng, cos.level(0), 0, trunc, 1..=trunc);
        let b = random_element(&mut rng, cos.level(1), -1, trunc, 1..=trunc);
        let lambda = a.d().neg();
        let x = cos.cech_d(&a, 0).neg().add(&b.d());
        let t = cos.cech_d(&b, 1).neg();
        let d = DescentDatum::new_unchecked(cos, lambda, x, t);
        assert!(descent_verify(&d).unwrap().all_pass());
        for q in 0..=3usize {
            let omega = whitney_form(&d, q);
            let closed = tot_differential(&omega);
            assert!(closed.is_zero(), "closedness fails at level {q}");
        }
        // face compatibility: pullback along d_i matches the coface image
        for q in 0..3usize {
            let omega_q1 = whitney_form(&d, q + 1);
            for i in 0..=(q + 1) {
                // the face [q] → [q+1] skipping i
                let f: Vec<usize> = (0..=(q + 1)).filter(|j| *j != i).collect();
                let pulled = omega_q1.pullback(&f, q);
                let expected = whitney_form(&d, q)
                    .map_coeffs(|v| cos.coface(q, i).apply(v));
                assert!(pulled.sub(&expected).is_zero(), "face {i} at level {q}");
            }
        }
    }
}
