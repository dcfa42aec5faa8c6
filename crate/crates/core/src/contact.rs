//! The degree-2 contact manifold `J¹[2]L_A` over a polynomial base.
//!
//! Sections of the line bundle are polynomials in `x, u, p_a, p_i, p` times the
//! fixed frame `μ`; only the coefficient polynomial is stored.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use thiserror::Error;

use crate::gca::{ContactLayout, Context, GcaError, GradedDerivation, GradedPoly};
use crate::rational::{parity_sign, Q};

pub type Section = GradedPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContactError {
    #[error("context is not a contact context")]
    NotContact,
    #[error("sections live in different contexts")]
    ContextMismatch,
    #[error("input is not homogeneous")]
    Inhomogeneous,
    #[error("coefficient mentions fiber momenta")]
    MomentaInCoefficient,
    #[error("mirror context dimensions do not match")]
    DimensionMismatch,
    #[error("expected a section over the mirror context")]
    NotMirror,
    #[error(transparent)]
    Gca(#[from] GcaError),
}

pub fn layout(s: &Section) -> ContactLayout {
    s.ctx().layout().expect("contact context required")
}

fn sign_of(neg: bool) -> Q {
    if neg {
        -Q::one()
    } else {
        Q::one()
    }
}

/// `D_z f = ∂f/∂z + p_z ∂f/∂p`.
fn d_op(f: &Section, z: usize, pz: usize, p: usize) -> Section {
    let mut r = f.dleft(z);
    let dp = f.dleft(p);
    if !dp.is_zero() {
        r.add_scaled(&(&GradedPoly::gen(f.ctx(), pz) * &dp), &Q::one());
    }
    r
}

fn bracket_homogeneous(f1: &Section, f2: &Section, odd1: bool, l: &ContactLayout) -> Section {
    let p = l.p();
    let mut r = f1 * &f2.dleft(p);
    r.add_scaled(&(&f1.dleft(p) * f2), &-Q::one());
    for i in 0..l.m {
        let (x, px) = (l.x(i), l.px(i));
        r.add_scaled(&(&d_op(f1, x, px, p) * &f2.dleft(px)), &Q::one());
        r.add_scaled(&(&f1.dleft(px) * &d_op(f2, x, px, p)), &-Q::one());
    }
    let s = sign_of(odd1);
    for a in 0..l.n {
        let (u, pa) = (l.u(a), l.pa(a));
        r.add_scaled(&(&d_op(f1, u, pa, p) * &f2.dleft(pa)), &s);
        r.add_scaled(&(&f1.dleft(pa) * &d_op(f2, u, pa, p)), &s);
    }
    r
}

/// The canonical degree −2 Jacobi bracket in Darboux coordinates.
///
/// # Panics
/// If the sections are not over the same contact context; see [`try_jacobi_bracket`].
pub fn jacobi_bracket(s: &Section, t: &Section) -> Section {
    try_jacobi_bracket(s, t).expect("jacobi_bracket")
}

pub fn try_jacobi_bracket(s: &Section, t: &Section) -> Result<Section, ContactError> {
    if !Context::same(s.ctx(), t.ctx()) {
        return Err(ContactError::ContextMismatch);
    }
    let l = s.ctx().layout().ok_or(ContactError::NotContact)?;
    let [even, odd] = s.split_parity();
    let mut r = bracket_homogeneous(&even, t, false, &l);
    if !odd.is_zero() {
        r.add_scaled(&bracket_homogeneous(&odd, t, true, &l), &Q::one());
    }
    Ok(r)
}

/// Degree of a section in the shifted grading (`|s| − 2`).
pub fn shifted_degree(s: &Section) -> Option<i64> {
    s.degree().map(|d| d as i64 - 2)
}

/// `P`: restriction to the zero section (kills every monomial containing a momentum).
pub fn project_p(s: &Section) -> Section {
    let l = layout(s);
    s.filter(|m| (l.m + l.n..l.len()).all(|j| m.0[j] == 0))
}

/// Whether the section has bidegree `(0, •)`.
pub fn is_basic(s: &Section) -> bool {
    project_p(s) == *s
}

pub fn bidegree_decompose(s: &Section) -> BTreeMap<(u32, u32), Section> {
    s.by_bidegree()
}

/// A derivation `δ = f𝟙 + f^iΔ_i + f^aΔ_a` of the graded line bundle `L_A`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineDerivation {
    pub degree: i64,
    pub f: GradedPoly,
    pub fx: Vec<GradedPoly>,
    pub fu: Vec<GradedPoly>,
}

impl LineDerivation {
    pub fn zero(ctx: &Arc<Context>, degree: i64) -> Self {
        let l = ctx.layout().expect("contact context");
        LineDerivation {
            degree,
            f: GradedPoly::zero(ctx),
            fx: vec![GradedPoly::zero(ctx); l.m],
            fu: vec![GradedPoly::zero(ctx); l.n],
        }
    }

    /// The identity derivation `𝟙`.
    pub fn identity(ctx: &Arc<Context>) -> Self {
        let mut d = Self::zero(ctx, 0);
        d.f = GradedPoly::one(ctx);
        d
    }

    /// `Δ_i = ∂/∂x^i`.
    pub fn delta_x(ctx: &Arc<Context>, i: usize) -> Self {
        let mut d = Self::zero(ctx, 0);
        d.fx[i] = GradedPoly::one(ctx);
        d
    }

    /// `Δ_a = ∂/∂u^a`.
    pub fn delta_u(ctx: &Arc<Context>, a: usize) -> Self {
        let mut d = Self::zero(ctx, -1);
        d.fu[a] = GradedPoly::one(ctx);
        d
    }

    pub fn ctx(&self) -> &Arc<Context> {
        self.f.ctx()
    }

    fn check_basic(&self) -> Result<(), ContactError> {
        let all = std::iter::once(&self.f).chain(&self.fx).chain(&self.fu);
        for c in all {
            if !is_basic(c) {
                return Err(ContactError::MomentaInCoefficient);
            }
        }
        Ok(())
    }

    /// Action on a section body: `f·g + f^i ∂g/∂x^i + f^a ∂g/∂u^a`.
    pub fn apply(&self, g: &Section) -> Section {
        let l = layout(g);
        let mut r = &self.f * g;
        for i in 0..l.m {
            if !self.fx[i].is_zero() {
                r.add_scaled(&(&self.fx[i] * &g.dleft(l.x(i))), &Q::one());
            }
        }
        for a in 0..l.n {
            if !self.fu[a].is_zero() {
                r.add_scaled(&(&self.fu[a] * &g.dleft(l.u(a))), &Q::one());
            }
        }
        r
    }

    /// Graded commutator `δδ' − (−1)^{|δ||δ'|}δ'δ`, recovered from its action.
    pub fn commutator(&self, other: &LineDerivation) -> LineDerivation {
        let ctx = self.ctx().clone();
        let l = ctx.layout().expect("contact context");
        let sign = -parity_sign(self.degree * other.degree);
        let c = |g: &Section| {
            let mut r = self.apply(&other.apply(g));
            r.add_scaled(&other.apply(&self.apply(g)), &sign);
            r
        };
        let f = c(&GradedPoly::one(&ctx));
        let fx = (0..l.m)
            .map(|i| {
                let z = GradedPoly::gen(&ctx, l.x(i));
                &c(&z) - &(&f * &z)
            })
            .collect();
        let fu = (0..l.n)
            .map(|a| {
                let z = GradedPoly::gen(&ctx, l.u(a));
                &c(&z) - &(&f * &z)
            })
            .collect();
        LineDerivation { degree: self.degree + other.degree, f, fx, fu }
    }
}

/// `h_δ = f p + f^i p_i + f^a p_a`.
pub fn hamiltonian_lift(d: &LineDerivation) -> Result<Section, ContactError> {
    d.check_basic()?;
    let ctx = d.ctx().clone();
    let l = ctx.layout().ok_or(ContactError::NotContact)?;
    let mut h = &d.f * &GradedPoly::gen(&ctx, l.p());
    for i in 0..l.m {
        h.add_scaled(&(&d.fx[i] * &GradedPoly::gen(&ctx, l.px(i))), &Q::one());
    }
    for a in 0..l.n {
        h.add_scaled(&(&d.fu[a] * &GradedPoly::gen(&ctx, l.pa(a))), &Q::one());
    }
    Ok(h)
}

fn legendre_images(src: &Arc<Context>, dst: &Arc<Context>, inverse: bool) -> Vec<GradedPoly> {
    let l = src.layout().expect("contact context");
    let g = |j: usize| GradedPoly::gen(dst, j);
    let mut im = vec![GradedPoly::zero(dst); l.len()];
    for i in 0..l.m {
        im[l.x(i)] = g(l.x(i));
        im[l.px(i)] = g(l.px(i));
    }
    for a in 0..l.n {
        im[l.u(a)] = g(l.pa(a));
        im[l.pa(a)] = g(l.u(a));
    }
    // forward: p̃ ↦ p − u^a p_a ; inverse: p ↦ p̃ + ũ^a p̃_a
    let mut p = g(l.p());
    let s = if inverse { Q::one() } else { -Q::one() };
    for a in 0..l.n {
        p.add_scaled(&(&g(l.u(a)) * &g(l.pa(a))), &s);
    }
    im[l.p()] = p;
    im
}

/// `F*`: pull a section over the mirror context back to `J¹[2]L_A`.
pub fn legendre_pullback(t: &Section) -> Result<Section, ContactError> {
    let l = t.ctx().layout().ok_or(ContactError::NotContact)?;
    if !l.mirror {
        return Err(ContactError::NotMirror);
    }
    let dst = Context::contact(l.m, l.n);
    Ok(t.substitute(&dst, &legendre_images(t.ctx(), &dst, false)))
}

/// `F*` when the target context is prescribed; errors if dimensions differ.
pub fn legendre_pullback_into(t: &Section, target: &Arc<Context>) -> Result<Section, ContactError> {
    let lt = target.layout().ok_or(ContactError::NotContact)?;
    let ls = t.ctx().layout().ok_or(ContactError::NotContact)?;
    if ls.m != lt.m || ls.n != lt.n || lt.mirror {
        return Err(ContactError::DimensionMismatch);
    }
    legendre_pullback(t)
}

/// `(F⁻¹)*`: push a section of `J¹[2]L_A` to the mirror context.
pub fn legendre_inverse(s: &Section) -> Result<Section, ContactError> {
    let l = s.ctx().layout().ok_or(ContactError::NotContact)?;
    if l.mirror {
        return Err(ContactError::NotMirror);
    }
    let dst = Context::contact_mirror(l.m, l.n);
    Ok(s.substitute(&dst, &legendre_images(s.ctx(), &dst, true)))
}

/// A vector field on the contact manifold, acting as a graded left derivation.
#[derive(Clone, Debug)]
pub struct ContactVectorField {
    pub field: GradedDerivation,
}

impl ContactVectorField {
    pub fn degree(&self) -> i64 {
        self.field.degree
    }

    pub fn value(&self, j: usize) -> &GradedPoly {
        self.field.value(j).expect("vector field defined on all generators")
    }

    pub fn apply(&self, g: &Section) -> Section {
        self.field.apply(g).expect("vector field application")
    }

    pub fn bracket(&self, other: &ContactVectorField) -> ContactVectorField {
        ContactVectorField { field: self.field.commutator(&other.field).expect("commutator") }
    }

    /// Natural graded contraction with `θ = dp − p_i dx^i − p_a du^a`.
    pub fn contract_theta_natural(&self) -> Section {
        let ctx = self.field.ctx.clone();
        let l = ctx.layout().expect("contact context");
        let mut r = self.value(l.p()).clone();
        for i in 0..l.m {
            r.add_scaled(&(&GradedPoly::gen(&ctx, l.px(i)) * self.value(l.x(i))), &-Q::one());
        }
        let s = parity_sign(self.degree());
        for a in 0..l.n {
            r.add_scaled(&(&GradedPoly::gen(&ctx, l.pa(a)) * self.value(l.u(a))), &s);
        }
        r
    }

    /// Contraction with `θ` under the convention `ι_{fX} = (−1)^{|f|}ι_X`.
    pub fn contract_theta(&self) -> Section {
        self.contract_theta_natural().scale(&parity_sign(self.degree()))
    }
}

/// The Reeb vector field `𝒳_λ` of a homogeneous section.
pub fn reeb_field(lambda: &Section) -> Result<ContactVectorField, ContactError> {
    let ctx = lambda.ctx().clone();
    let l = ctx.layout().ok_or(ContactError::NotContact)?;
    let deg = match lambda.degree() {
        Some(d) => d as i64,
        None if lambda.is_zero() => 0,
        None => return Err(ContactError::Inhomogeneous),
    };
    let mut field = GradedDerivation::zero(&ctx, deg - 2);
    let mut xp = lambda.clone();
    let coords = (0..l.m).map(|i| (l.x(i), l.px(i))).chain((0..l.n).map(|a| (l.u(a), l.pa(a))));
    for (z, pz) in coords {
        let zodd = ctx.is_odd(z) as i64;
        let s = parity_sign(deg * zodd);
        let dfp = lambda.dleft(pz);
        let coef = dfp.scale(&(-&s * parity_sign(zodd)));
        field.set(pz, d_op(lambda, z, pz, l.p()).scale(&s));
        xp.add_scaled(&(&coef * &GradedPoly::gen(&ctx, pz)), &Q::one());
        field.set(z, coef);
    }
    field.set(l.p(), xp);
    Ok(ContactVectorField { field })
}

/// A 1-form `Σ h_k dg_k`.
#[derive(Clone, Debug)]
pub struct OneForm {
    pub terms: Vec<(GradedPoly, GradedPoly)>,
}

impl OneForm {
    /// The contact form `θ = dp − p_i dx^i − p_a du^a` of a contact context.
    pub fn theta(ctx: &Arc<Context>) -> OneForm {
        let l = ctx.layout().expect("contact context");
        let g = |j| GradedPoly::gen(ctx, j);
        let mut terms = vec![(GradedPoly::one(ctx), g(l.p()))];
        for i in 0..l.m {
            terms.push((-&g(l.px(i)), g(l.x(i))));
        }
        for a in 0..l.n {
            terms.push((-&g(l.pa(a)), g(l.u(a))));
        }
        OneForm { terms }
    }

    /// Natural contraction `ι_X(h dg) = (−1)^{(|X|+1)|h|} h X(g)`.
    pub fn contract_natural(&self, x: &ContactVectorField) -> GradedPoly {
        let ctx = x.field.ctx.clone();
        let mut r = GradedPoly::zero(&ctx);
        for (h, g) in &self.terms {
            for (par, hp) in h.split_parity().iter().enumerate() {
                if hp.is_zero() {
                    continue;
                }
                let s = parity_sign((x.degree() + 1) * par as i64);
                r.add_scaled(&(hp * &x.apply(g)), &s);
            }
        }
        r
    }

    /// Pull back along the Legendre substitution.
    pub fn legendre_pullback(&self) -> Result<OneForm, ContactError> {
        let terms = self
            .terms
            .iter()
            .map(|(h, g)| Ok((legendre_pullback(h)?, legendre_pullback(g)?)))
            .collect::<Result<_, ContactError>>()?;
        Ok(OneForm { terms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn bracket_examples() {
        let c = Context::contact(0, 2);
        let l = c.layout().unwrap();
        let g = |j| GradedPoly::gen(&c, j);
        for b in 0..2 {
            assert_eq!(jacobi_bracket(&g(l.p()), &g(l.u(b))), -&g(l.u(b)));
            for a in 0..2 {
                let expect = if a == b { GradedPoly::constant(&c, q(-1)) } else { GradedPoly::zero(&c) };
                assert_eq!(jacobi_bracket(&g(l.u(a)), &g(l.pa(b))), expect);
            }
        }
        assert_eq!(jacobi_bracket(&g(l.pa(0)), &g(l.u(0))), GradedPoly::constant(&c, q(-1)));
    }

    #[test]
    fn lift_examples() {
        let c = Context::contact(1, 2);
        let l = c.layout().unwrap();
        assert_eq!(hamiltonian_lift(&LineDerivation::identity(&c)).unwrap(), GradedPoly::gen(&c, l.p()));
        assert_eq!(hamiltonian_lift(&LineDerivation::delta_u(&c, 1)).unwrap(), GradedPoly::gen(&c, l.pa(1)));
        let mut bad = LineDerivation::zero(&c, 0);
        bad.f = GradedPoly::gen(&c, l.p());
        assert_eq!(hamiltonian_lift(&bad), Err(ContactError::MomentaInCoefficient));
    }

    #[test]
    fn projection_examples() {
        let c = Context::contact(0, 3);
        let l = c.layout().unwrap();
        let w = |v: &[usize]| GradedPoly::word(&c, v);
        let s = &w(&[l.u(0), l.u(1), l.u(2)]) + &w(&[l.pa(0), l.pa(1), l.u(2)]);
        assert_eq!(project_p(&s), w(&[l.u(0), l.u(1), l.u(2)]));
        assert!(project_p(&w(&[l.u(0), l.p()])).is_zero());
    }

    #[test]
    fn legendre_examples() {
        let c = Context::contact_mirror(0, 2);
        let l = c.layout().unwrap();
        let a = Context::contact(0, 2);
        let p = legendre_pullback(&GradedPoly::gen(&c, l.p())).unwrap();
        let mut e = GradedPoly::gen(&a, l.p());
        for k in 0..2 {
            e.add_scaled(&GradedPoly::word(&a, &[l.u(k), l.pa(k)]), &q(-1));
        }
        assert_eq!(p, e);
        assert_eq!(legendre_pullback(&GradedPoly::gen(&c, l.u(1))).unwrap(), GradedPoly::gen(&a, l.pa(1)));
        assert_eq!(legendre_pullback(&GradedPoly::gen(&a, l.p())), Err(ContactError::NotMirror));
        assert_eq!(
            legendre_pullback_into(&GradedPoly::gen(&c, l.p()), &Context::contact(1, 2)),
            Err(ContactError::DimensionMismatch)
        );
    }

    #[test]
    fn reeb_of_constant_is_d_dp() {
        let c = Context::contact(1, 2);
        let l = c.layout().unwrap();
        let x = reeb_field(&GradedPoly::one(&c)).unwrap();
        for j in 0..l.len() {
            let expect = if j == l.p() { GradedPoly::one(&c) } else { GradedPoly::zero(&c) };
            assert_eq!(x.value(j), &expect);
        }
        let inh = &GradedPoly::one(&c) + &GradedPoly::gen(&c, l.p());
        assert!(matches!(reeb_field(&inh), Err(ContactError::Inhomogeneous)));
    }

    #[test]
    fn reeb_of_p() {
        let c = Context::contact(0, 1);
        let l = c.layout().unwrap();
        let p = GradedPoly::gen(&c, l.p());
        let x = reeb_field(&p).unwrap();
        // X(p) = p, X(p_1) = p_1, X(u) = 0
        assert_eq!(x.value(l.p()), &p);
        assert_eq!(x.value(l.pa(0)), &GradedPoly::gen(&c, l.pa(0)));
        assert!(x.value(l.u(0)).is_zero());
        assert_eq!(x.contract_theta(), p);
    }
}
