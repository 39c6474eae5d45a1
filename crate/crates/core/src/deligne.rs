//! The Deligne two-groupoid of L ⊗ 𝔪: Maurer-Cartan elements, gauge
//! transformations, two-morphisms, the twisted bracket on degree −1, and
//! their compositions.
//!
//! The formal symbol d in `exp ad X (d+λ)` is handled by adjoining one
//! degree-1 basis vector with [d, x] = dx (see
//! [`DglaPresentation::with_formal_differential`]), so the gauge action is
//! plain exponential arithmetic with no special cases.

use crate::dgla::{bch, bch_with, exp_ad, DglaPresentation, GradedElement};
use crate::scalars::ArtinianSeries;
use crate::Error;

fn require_deligne_range(l: &DglaPresentation) -> Result<(), Error> {
    let (lo, hi) = l.degree_range();
    if lo < -1 {
        return Err(Error::Domain(format!(
            "the Deligne two-groupoid requires degrees ≥ −1, presentation has {lo}"
        )));
    }
    if hi < 2 || lo > -1 {
        return Err(Error::Domain(
            "the Deligne two-groupoid requires degrees −1..2 in range".into(),
        ));
    }
    Ok(())
}

fn require_homogeneous(x: &GradedElement, degree: i64, what: &str) -> Result<(), Error> {
    if !x.is_homogeneous(degree) {
        return Err(Error::DegreeMismatch(format!("{what} must be homogeneous of degree {degree}")));
    }
    Ok(())
}

fn require_ideal(x: &GradedElement, what: &str) -> Result<(), Error> {
    if !x.in_maximal_ideal() {
        return Err(Error::Domain(format!("{what} must have coefficients in the maximal ideal")));
    }
    Ok(())
}

/// dλ + ½[λ,λ]; zero exactly when λ is Maurer-Cartan.
pub fn mc_defect(lambda: &GradedElement) -> Result<GradedElement, Error> {
    require_deligne_range(&lambda.owner)?;
    require_homogeneous(lambda, 1, "a Maurer-Cartan carrier")?;
    require_ideal(lambda, "a Maurer-Cartan carrier")?;
    let half = crate::scalars::ExactScalar::from_ratio(1, 2);
    Ok(lambda.d().add(&lambda.bracket(lambda).scale_scalar(&half)))
}

/// The gauge action: μ with d+μ = exp ad X (d+λ), computed in the cross
/// product with the formal differential symbol.
pub fn gauge_apply(x: &GradedElement, lambda: &GradedElement) -> Result<GradedElement, Error> {
    require_deligne_range(&lambda.owner)?;
    require_homogeneous(x, 0, "a gauge parameter")?;
    require_ideal(x, "a gauge parameter")?;
    require_homogeneous(lambda, 1, "a gauge target")?;

    let ext = lambda.owner.with_formal_differential();
    let delta_idx = lambda.owner.dim(1);
    let trunc = lambda.truncation_order();

    let mut target = GradedElement::zero(&ext, trunc);
    for (i, c) in lambda.component(1).into_iter().enumerate() {
        target.set_coeff((1, i), c);
    }
    target.set_coeff((1, delta_idx), ArtinianSeries::one(trunc));

    let mut x_ext = GradedElement::zero(&ext, trunc);
    for (i, c) in x.component(0).into_iter().enumerate() {
        x_ext.set_coeff((0, i), c);
    }

    let moved = exp_ad(&x_ext, &target)?;
    debug_assert!(moved.coeff((1, delta_idx)).eq_value(&ArtinianSeries::one(trunc)));

    let mut out = GradedElement::zero(&lambda.owner, trunc);
    let dim1 = lambda.owner.dim(1);
    let comp = moved.component(1);
    for (i, c) in comp.into_iter().take(dim1).enumerate() {
        out.set_coeff((1, i), c);
    }
    Ok(out)
}

/// A Maurer-Cartan carrier; `certified` records that `mc_defect` vanished
/// at construction. Uncertified carriers are allowed because the deviation
/// machinery operates on near-solutions.
#[derive(Clone, Debug)]
pub struct MaurerCartanElement {
    pub lambda: GradedElement,
    pub certified: bool,
}

impl MaurerCartanElement {
    pub fn new_unchecked(lambda: GradedElement) -> Self {
        MaurerCartanElement { lambda, certified: false }
    }

    pub fn certify(lambda: GradedElement) -> Result<Self, Error> {
        let defect = mc_defect(&lambda)?;
        if !defect.is_zero() {
            return Err(Error::Domain("Maurer-Cartan equation fails exactly".into()));
        }
        Ok(MaurerCartanElement { lambda, certified: true })
    }
}

/// A gauge transformation exp(X): source → target.
#[derive(Clone, Debug)]
pub struct GaugeTransformation {
    pub x: GradedElement,
    pub source: MaurerCartanElement,
    pub target: MaurerCartanElement,
    pub certified: bool,
}

impl GaugeTransformation {
    pub fn new_unchecked(
        x: GradedElement,
        source: MaurerCartanElement,
        target: MaurerCartanElement,
    ) -> Self {
        GaugeTransformation { x, source, target, certified: false }
    }

    /// Certify that exp(X) gauges `source` to `target` exactly.
    pub fn certify(
        x: GradedElement,
        source: MaurerCartanElement,
        target: MaurerCartanElement,
    ) -> Result<Self, Error> {
        let moved = gauge_apply(&x, &source.lambda)?;
        if !moved.eq_value(&target.lambda) {
            return Err(Error::Domain("gauge equation fails exactly".into()));
        }
        Ok(GaugeTransformation { x, source, target, certified: true })
    }

    pub fn identity(at: MaurerCartanElement) -> Self {
        let zero = GradedElement::zero(&at.lambda.owner, at.lambda.truncation_order());
        GaugeTransformation { x: zero, source: at.clone(), target: at, certified: true }
    }

    fn endpoints_match(&self, other: &GaugeTransformation) -> bool {
        self.source.lambda.eq_value(&other.source.lambda)
            && self.target.lambda.eq_value(&other.target.lambda)
    }
}

/// The twisted bracket [a,b]_μ = [a, db + [μ,b]] on degree −1.
///
/// For a certified MC element μ this is a Lie bracket and the associated
/// Campbell–Dynkin–Hausdorff operation is a group law.
pub fn twisted_bracket(
    mu: &GradedElement,
    a: &GradedElement,
    b: &GradedElement,
) -> GradedElement {
    a.bracket(&b.d().add(&mu.bracket(b)))
}

/// Campbell–Dynkin–Hausdorff product in exp((L^{−1}⊗𝔪)_μ).
pub fn twisted_bch(
    mu: &GradedElement,
    a: &GradedElement,
    b: &GradedElement,
) -> Result<GradedElement, Error> {
    for e in [a, b] {
        require_homogeneous(e, -1, "a twisted-group element")?;
        require_ideal(e, "a twisted-group element")?;
    }
    Ok(bch_with(a, b, &|x, y| twisted_bracket(mu, x, y)))
}

/// Fold a list of twisted-group elements (left to right) into one product.
pub fn twisted_product(
    mu: &GradedElement,
    factors: &[&GradedElement],
) -> Result<GradedElement, Error> {
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = twisted_bch(mu, &acc, f)?;
    }
    Ok(acc)
}

/// γ(t) = dt + [μ, t], the degree-0 element with exp(target) =
/// exp(γ(t))·exp(source) for a two-morphism t.
pub fn gamma(mu: &GradedElement, t: &GradedElement) -> GradedElement {
    t.d().add(&mu.bracket(t))
}

/// A two-morphism exp(t): source gauge ⇒ target gauge, both sharing
/// endpoints.
#[derive(Clone, Debug)]
pub struct TwoMorphism {
    pub t: GradedElement,
    pub source: GaugeTransformation,
    pub target: GaugeTransformation,
    pub certified: bool,
}

impl TwoMorphism {
    /// The common target MC element μ of the two parallel gauges.
    pub fn base(&self) -> &GradedElement {
        &self.target.target.lambda
    }

    pub fn new_unchecked(
        t: GradedElement,
        source: GaugeTransformation,
        target: GaugeTransformation,
    ) -> Self {
        TwoMorphism { t, source, target, certified: false }
    }

    pub fn certify(
        t: GradedElement,
        source: GaugeTransformation,
        target: GaugeTransformation,
    ) -> Result<Self, Error> {
        if !two_morphism_verify(&t, &target, &source)? {
            return Err(Error::Domain("two-morphism equation fails exactly".into()));
        }
        Ok(TwoMorphism { t, source, target, certified: true })
    }

    pub fn identity(at: GaugeTransformation) -> Self {
        let zero = GradedElement::zero(&at.x.owner, at.x.truncation_order());
        TwoMorphism { t: zero, source: at.clone(), target: at, certified: true }
    }
}

/// Exact check of exp(X) = exp(dt + [μ,t])·exp(Y) in exp(L⁰⊗𝔪), for a
/// claimed two-morphism t from H = exp(Y) to G = exp(X).
pub fn two_morphism_verify(
    t: &GradedElement,
    g: &GaugeTransformation,
    h: &GaugeTransformation,
) -> Result<bool, Error> {
    if !g.endpoints_match(h) {
        return Err(Error::Domain("two-morphism endpoints do not match".into()));
    }
    require_homogeneous(t, -1, "a two-morphism carrier")?;
    require_ideal(t, "a two-morphism carrier")?;
    let mu = &g.target.lambda;
    let combined = bch(&gamma(mu, t), &h.x)?;
    Ok(combined.eq_value(&g.x))
}

/// Composition of gauge transformations: `a ∘ b` (apply b, then a), the
/// product of the exponentials in the unipotent group.
pub fn compose_gauge(
    a: &GaugeTransformation,
    b: &GaugeTransformation,
) -> Result<GaugeTransformation, Error> {
    if !a.source.lambda.eq_value(&b.target.lambda) {
        return Err(Error::Domain("gauge transformations are not composable".into()));
    }
    Ok(GaugeTransformation {
        x: bch(&a.x, &b.x)?,
        source: b.source.clone(),
        target: a.target.clone(),
        certified: a.certified && b.certified,
    })
}

/// Vertical composition of two-morphisms: `a ∘ b` for b: F ⇒ G and
/// a: G ⇒ H, via the twisted product in exp((L^{−1}⊗𝔪)_μ).
pub fn compose_two_vertical(a: &TwoMorphism, b: &TwoMorphism) -> Result<TwoMorphism, Error> {
    if !a.source.x.eq_value(&b.target.x) || !a.base().eq_value(b.base()) {
        return Err(Error::Domain("two-morphisms are not vertically composable".into()));
    }
    let t = twisted_bch(a.base(), &a.t, &b.t)?;
    Ok(TwoMorphism {
        t,
        source: b.source.clone(),
        target: a.target.clone(),
        certified: a.certified && b.certified,
    })
}

/// Horizontal composition (whiskering): for a: G ⇒ G′ over gauges μ → ν
/// and b: H ⇒ H′ over gauges λ → μ, the composite GH ⇒ G′H′ has carrier
/// a ∘_ν G(b), where G(b) is conjugation by exp ad of the gauge parameter.
pub fn compose_two_horizontal(a: &TwoMorphism, b: &TwoMorphism) -> Result<TwoMorphism, Error> {
    if !a.source.source.lambda.eq_value(&b.source.target.lambda) {
        return Err(Error::Domain("two-morphisms are not horizontally composable".into()));
    }
    let whiskered = exp_ad(&a.source.x, &b.t)?;
    let nu = a.base().clone();
    let t = twisted_bch(&nu, &a.t, &whiskered)?;
    let source = compose_gauge(&a.source, &b.source)?;
    let target = compose_gauge(&a.target, &b.target)?;
    Ok(TwoMorphism { t, source, target, certified: false })
}
