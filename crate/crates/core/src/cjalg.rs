//! Split Courant–Jacobi algebroids given by structure functions.
//!
//! An instance lives over a polynomial base with coordinates `x¹..x^m` and
//! fiber rank `n`. Sections of `A ⊕ A†` embed into `Γ(𝓛)¹` as
//! `ξ + α ↦ ξ^a p_a + α_a u^a`; forms in `Ω•(A;L)` are the `(0,•)` sections.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::contact::{
    hamiltonian_lift, is_basic, jacobi_bracket, legendre_pullback, project_p, ContactError, LineDerivation,
    Section,
};
use crate::gca::{Context, GradedPoly, Monomial};
use crate::linfty::{
    exp_coderivation, memoize, GradedSpace, LInftyStructure, TaylorCoderivation, TaylorMorphism, Vector,
};
use crate::rational::{inv_factorial, parity_sign, q, qr, Q};
use crate::vdata::{contact_vdata, higher_derived_bracket};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CjError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("skew-symmetry violated: {0}")]
    NotSkew(String),
    #[error("input is not a pure degree-1 section")]
    NotDegreeOne,
    #[error("frame is not Lagrangian: pairing of {0} and {1} is nonzero")]
    NotLagrangian(usize, usize),
    #[error("section has components outside the expected bidegrees")]
    UnexpectedShape,
    #[error(transparent)]
    Contact(#[from] ContactError),
}

/// A polynomial in the base coordinates `x¹..x^m`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BasePoly(pub BTreeMap<Vec<u32>, Q>);

impl BasePoly {
    pub fn zero() -> Self {
        BasePoly(BTreeMap::new())
    }

    pub fn constant(m: usize, c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![0; m], c);
        p
    }

    pub fn int(m: usize, c: i64) -> Self {
        Self::constant(m, q(c))
    }

    pub fn x(m: usize, i: usize) -> Self {
        let mut e = vec![0; m];
        e[i] = 1;
        let mut p = Self::zero();
        p.add_term(e, Q::one());
        p
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        let v = self.0.entry(e.clone()).or_insert_with(Q::zero);
        *v += c;
        if v.is_zero() {
            self.0.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn neg(&self) -> Self {
        BasePoly(self.0.iter().map(|(e, c)| (e.clone(), -c)).collect())
    }

    pub fn add(&self, o: &BasePoly) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.0 {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    /// Embeds into a context whose first `m` generators are the base coordinates.
    pub fn to_poly(&self, ctx: &Arc<Context>) -> GradedPoly {
        GradedPoly::from_terms(
            ctx,
            self.0.iter().map(|(e, c)| {
                let mut full = vec![0; ctx.len()];
                full[..e.len()].copy_from_slice(e);
                (Monomial(full), c.clone())
            }),
        )
    }

    /// Reads back a polynomial that only involves the first `m` generators.
    pub fn from_poly(p: &GradedPoly, m: usize) -> Option<Self> {
        let mut r = Self::zero();
        for (mono, c) in p.terms() {
            if mono.0[m..].iter().any(|&e| e != 0) {
                return None;
            }
            r.add_term(mono.0[..m].to_vec(), c.clone());
        }
        Some(r)
    }
}

fn zeros2(r: usize, c: usize) -> Vec<Vec<BasePoly>> {
    vec![vec![BasePoly::zero(); c]; r]
}

fn zeros3(n: usize) -> Vec<Vec<Vec<BasePoly>>> {
    vec![zeros2(n, n); n]
}

/// Structure functions of a split Courant–Jacobi algebroid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitCJInstance {
    pub m: usize,
    pub n: usize,
    /// `ρ^i_a`, indexed `[i][a]`.
    pub rho: Vec<Vec<BasePoly>>,
    /// `c^c_{ab}`, indexed `[c][a][b]`.
    pub c: Vec<Vec<Vec<BasePoly>>>,
    /// `λ_a`.
    pub lam: Vec<BasePoly>,
    /// `ρ̃^{ia}`, indexed `[i][a]`.
    pub rho_dual: Vec<Vec<BasePoly>>,
    /// `c̃_c^{ab}`, indexed `[c][a][b]`.
    pub c_dual: Vec<Vec<Vec<BasePoly>>>,
    /// `λ̃^a`.
    pub lam_dual: Vec<BasePoly>,
    /// `φ_{abc}` of `Υ_A`.
    pub phi: Vec<Vec<Vec<BasePoly>>>,
    /// `ψ^{abc}` of `Υ_{A†}`.
    pub psi: Vec<Vec<Vec<BasePoly>>>,
}

fn set_skew2(t: &mut [Vec<BasePoly>], a: usize, b: usize, v: BasePoly) {
    t[b][a] = v.neg();
    t[a][b] = v;
}

fn set_antisym3(t: &mut [Vec<Vec<BasePoly>>], a: usize, b: usize, c: usize, v: BasePoly) {
    for (x, y, z, s) in [(a, b, c, 1), (b, c, a, 1), (c, a, b, 1), (b, a, c, -1), (a, c, b, -1), (c, b, a, -1)] {
        t[x][y][z] = if s > 0 { v.clone() } else { v.neg() };
    }
}

impl SplitCJInstance {
    pub fn zero(m: usize, n: usize) -> Self {
        SplitCJInstance {
            m,
            n,
            rho: zeros2(m, n),
            c: zeros3(n),
            lam: vec![BasePoly::zero(); n],
            rho_dual: zeros2(m, n),
            c_dual: zeros3(n),
            lam_dual: vec![BasePoly::zero(); n],
            phi: zeros3(n),
            psi: zeros3(n),
        }
    }

    pub fn ctx(&self) -> Arc<Context> {
        Context::contact(self.m, self.n)
    }

    pub fn mirror_ctx(&self) -> Arc<Context> {
        Context::contact_mirror(self.m, self.n)
    }

    /// Sets `c^k_{ab} = −c^k_{ba} = v`.
    pub fn set_c(&mut self, k: usize, a: usize, b: usize, v: BasePoly) {
        set_skew2(&mut self.c[k], a, b, v);
    }

    pub fn set_c_dual(&mut self, k: usize, a: usize, b: usize, v: BasePoly) {
        set_skew2(&mut self.c_dual[k], a, b, v);
    }

    pub fn set_phi(&mut self, a: usize, b: usize, c: usize, v: BasePoly) {
        set_antisym3(&mut self.phi, a, b, c, v);
    }

    pub fn set_psi(&mut self, a: usize, b: usize, c: usize, v: BasePoly) {
        set_antisym3(&mut self.psi, a, b, c, v);
    }

    /// Dimensions and declared skew-symmetries.
    pub fn validate(&self) -> Result<(), CjError> {
        let (m, n) = (self.m, self.n);
        let dim = |ok: bool, what: &str| if ok { Ok(()) } else { Err(CjError::Dimension(what.to_string())) };
        dim(self.rho.len() == m && self.rho.iter().all(|r| r.len() == n), "rho")?;
        dim(self.rho_dual.len() == m && self.rho_dual.iter().all(|r| r.len() == n), "rho_dual")?;
        dim(self.lam.len() == n && self.lam_dual.len() == n, "lambda")?;
        for (name, t) in [("c", &self.c), ("c_dual", &self.c_dual), ("upsilon", &self.phi), ("upsilon_dual", &self.psi)] {
            dim(t.len() == n && t.iter().all(|r| r.len() == n && r.iter().all(|s| s.len() == n)), name)?;
        }
        let all_polys = self
            .rho
            .iter()
            .chain(&self.rho_dual)
            .flatten()
            .chain(&self.lam)
            .chain(&self.lam_dual)
            .chain([&self.c, &self.c_dual, &self.phi, &self.psi].into_iter().flatten().flatten().flatten());
        for p in all_polys {
            if p.0.keys().any(|e| e.len() != m) {
                return Err(CjError::Dimension("polynomial exponent vector length".into()));
            }
        }
        for (name, t) in [("c", &self.c), ("c_dual", &self.c_dual)] {
            for (k, tk) in t.iter().enumerate() {
                for a in 0..n {
                    for b in 0..n {
                        if tk[a][b] != tk[b][a].neg() {
                            return Err(CjError::NotSkew(format!("{name}[{k}][{a}][{b}]")));
                        }
                    }
                }
            }
        }
        for (name, t) in [("upsilon", &self.phi), ("upsilon_dual", &self.psi)] {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let v = &t[a][b][c];
                        if *v != t[b][c][a] || *v != t[b][a][c].neg() {
                            return Err(CjError::NotSkew(format!("{name}[{a}][{b}][{c}]")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether the A†-side data all vanish.
    pub fn dual_is_trivial(&self) -> bool {
        let z = |v: &Vec<BasePoly>| v.iter().all(|p| p.is_zero());
        self.rho_dual.iter().all(z)
            && z(&self.lam_dual)
            && self.c_dual.iter().flatten().all(z)
            && self.psi.iter().flatten().all(z)
    }
}

/// The derivation `d` on one side, as a line derivation on `ctx` (either the A or the mirror context).
fn side_derivation(
    ctx: &Arc<Context>,
    rho: &[Vec<BasePoly>],
    c: &[Vec<Vec<BasePoly>>],
    lam: &[BasePoly],
) -> LineDerivation {
    let l = ctx.layout().expect("contact context");
    let u = |a| GradedPoly::gen(ctx, l.u(a));
    let mut d = LineDerivation::zero(ctx, 1);
    for a in 0..l.n {
        d.f.add_scaled(&(&lam[a].to_poly(ctx) * &u(a)), &Q::one());
        for i in 0..l.m {
            d.fx[i].add_scaled(&(&rho[i][a].to_poly(ctx) * &u(a)), &Q::one());
        }
    }
    let half = qr(-1, 2);
    for k in 0..l.n {
        for a in 0..l.n {
            for b in 0..l.n {
                if c[k][a][b].is_zero() {
                    continue;
                }
                let t = &c[k][a][b].to_poly(ctx) * &GradedPoly::word(ctx, &[l.u(a), l.u(b)]);
                d.fu[k].add_scaled(&t, &half);
            }
        }
    }
    d
}

fn upsilon_section(ctx: &Arc<Context>, t: &[Vec<Vec<BasePoly>>]) -> Section {
    let l = ctx.layout().expect("contact context");
    let mut s = GradedPoly::zero(ctx);
    for a in 0..l.n {
        for b in (a + 1)..l.n {
            for c in (b + 1)..l.n {
                if t[a][b][c].is_zero() {
                    continue;
                }
                let w = GradedPoly::word(ctx, &[l.u(a), l.u(b), l.u(c)]);
                s.add_scaled(&(&t[a][b][c].to_poly(ctx) * &w), &Q::one());
            }
        }
    }
    s
}

/// `d_{A,L}` as a line derivation of `L_A`.
pub fn d_a(inst: &SplitCJInstance) -> LineDerivation {
    side_derivation(&inst.ctx(), &inst.rho, &inst.c, &inst.lam)
}

/// `d_{A†,L}` on the mirror context.
pub fn d_a_dual(inst: &SplitCJInstance) -> LineDerivation {
    side_derivation(&inst.mirror_ctx(), &inst.rho_dual, &inst.c_dual, &inst.lam_dual)
}

/// `π*Υ_A` as a `(0,3)` section.
pub fn upsilon_a(inst: &SplitCJInstance) -> Section {
    upsilon_section(&inst.ctx(), &inst.phi)
}

/// `π̃*Υ_{A†}` on the mirror context.
pub fn upsilon_a_dual_mirror(inst: &SplitCJInstance) -> Section {
    upsilon_section(&inst.mirror_ctx(), &inst.psi)
}

/// `Θ = −π*Υ_A + h_{d_{A,L}} + F*h_{d_{A†,L}} − F*π̃*Υ_{A†}`.
pub fn build_theta(inst: &SplitCJInstance) -> Result<Section, CjError> {
    inst.validate()?;
    let mut theta = hamiltonian_lift(&d_a(inst))?;
    theta.add_scaled(&upsilon_a(inst), &-Q::one());
    let hd = hamiltonian_lift(&d_a_dual(inst))?;
    theta.add_scaled(&legendre_pullback(&hd)?, &Q::one());
    theta.add_scaled(&legendre_pullback(&upsilon_a_dual_mirror(inst))?, &-Q::one());
    Ok(theta)
}

/// An element `ξ + α` of `Γ(A ⊕ A†)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchoredSection {
    pub xi: Vec<BasePoly>,
    pub alpha: Vec<BasePoly>,
}

impl AnchoredSection {
    pub fn zero(n: usize) -> Self {
        AnchoredSection { xi: vec![BasePoly::zero(); n], alpha: vec![BasePoly::zero(); n] }
    }

    /// Frame element `e_a` of `A`.
    pub fn e(m: usize, n: usize, a: usize) -> Self {
        let mut s = Self::zero(n);
        s.xi[a] = BasePoly::int(m, 1);
        s
    }

    /// Frame element `e*^a ⊗ μ` of `A†`.
    pub fn e_dual(m: usize, n: usize, a: usize) -> Self {
        let mut s = Self::zero(n);
        s.alpha[a] = BasePoly::int(m, 1);
        s
    }

    /// `h_{ι_ξ} + π*α = ξ^a p_a + α_a u^a`.
    pub fn to_section(&self, ctx: &Arc<Context>) -> Section {
        let l = ctx.layout().expect("contact context");
        let mut s = GradedPoly::zero(ctx);
        for a in 0..l.n {
            s.add_scaled(&(&self.xi[a].to_poly(ctx) * &GradedPoly::gen(ctx, l.pa(a))), &Q::one());
            s.add_scaled(&(&self.alpha[a].to_poly(ctx) * &GradedPoly::gen(ctx, l.u(a))), &Q::one());
        }
        s
    }

    pub fn from_section(s: &Section) -> Result<Self, CjError> {
        let l = s.ctx().layout().ok_or(ContactError::NotContact)?;
        let mut out = Self::zero(l.n);
        for (mono, c) in s.terms() {
            let rest: Vec<usize> = (l.m..l.len()).filter(|&j| mono.0[j] > 0).collect();
            let [j] = rest.as_slice() else { return Err(CjError::NotDegreeOne) };
            if mono.0[*j] != 1 {
                return Err(CjError::NotDegreeOne);
            }
            let e = mono.0[..l.m].to_vec();
            if *j >= l.u(0) && *j < l.u(0) + l.n {
                out.alpha[j - l.u(0)].add_term(e, c.clone());
            } else if *j >= l.pa(0) && *j < l.pa(0) + l.n {
                out.xi[j - l.pa(0)].add_term(e, c.clone());
            } else {
                return Err(CjError::NotDegreeOne);
            }
        }
        Ok(out)
    }
}

fn require_degree_one(s: &Section) -> Result<(), CjError> {
    if s.is_zero() || s.degree() == Some(1) {
        AnchoredSection::from_section(s).map(|_| ())
    } else {
        Err(CjError::NotDegreeOne)
    }
}

/// Operations recovered from `Θ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedOps {
    pub bracket: Section,
    pub nabla: Section,
    pub pairing: Section,
}

/// `[[u,v]] = {{u,Θ},v}`, `∇_uλ = {{u,Θ},λ}`, `⟨⟨u,v⟩⟩ = −{u,v}`.
pub fn derived_operations_theta(theta: &Section, u: &Section, v: &Section, lambda: &Section) -> Result<DerivedOps, CjError> {
    require_degree_one(u)?;
    require_degree_one(v)?;
    let ut = jacobi_bracket(u, theta);
    Ok(DerivedOps {
        bracket: jacobi_bracket(&ut, v),
        nabla: jacobi_bracket(&ut, lambda),
        pairing: -&jacobi_bracket(u, v),
    })
}

pub fn derived_operations(inst: &SplitCJInstance, u: &Section, v: &Section, lambda: &Section) -> Result<DerivedOps, CjError> {
    derived_operations_theta(&build_theta(inst)?, u, v, lambda)
}

pub fn dorfman(theta: &Section, u: &Section, v: &Section) -> Section {
    jacobi_bracket(&jacobi_bracket(u, theta), v)
}

pub fn nabla(theta: &Section, u: &Section, lambda: &Section) -> Section {
    jacobi_bracket(&jacobi_bracket(u, theta), lambda)
}

pub fn pairing(u: &Section, v: &Section) -> Section {
    -&jacobi_bracket(u, v)
}

/// Cartan calculus on one side: forms are `(0,•)` sections of `ctx`.
pub struct Cartan {
    pub d: LineDerivation,
}

impl Cartan {
    pub fn a_side(inst: &SplitCJInstance) -> Self {
        Cartan { d: d_a(inst) }
    }

    pub fn dual_side(inst: &SplitCJInstance) -> Self {
        Cartan { d: d_a_dual(inst) }
    }

    pub fn ctx(&self) -> &Arc<Context> {
        self.d.ctx()
    }

    pub fn d(&self, w: &Section) -> Section {
        self.d.apply(w)
    }

    /// `ι_X` (left contraction) for `X = X^a e_a` with base-polynomial components.
    pub fn iota(&self, x: &[GradedPoly], w: &Section) -> Section {
        let l = self.ctx().layout().expect("contact context");
        let mut r = GradedPoly::zero(self.ctx());
        for (a, xa) in x.iter().enumerate() {
            if !xa.is_zero() {
                r.add_scaled(&(xa * &w.dleft(l.u(a))), &Q::one());
            }
        }
        r
    }

    /// `ℒ_X = [d, ι_X] = dι_X + ι_Xd`.
    pub fn lie(&self, x: &[GradedPoly], w: &Section) -> Section {
        &self.d(&self.iota(x, w)) + &self.iota(x, &self.d(w))
    }

    /// The bracket defined by `ι_{[X,Y]} = [ℒ_X, ι_Y]`.
    pub fn bracket(&self, x: &[GradedPoly], y: &[GradedPoly]) -> Vec<GradedPoly> {
        let l = self.ctx().layout().expect("contact context");
        (0..l.n)
            .map(|c| {
                let uc = GradedPoly::gen(self.ctx(), l.u(c));
                &self.lie(x, &self.iota(y, &uc)) - &self.iota(y, &self.lie(x, &uc))
            })
            .collect()
    }

    pub fn embed(&self, v: &[BasePoly]) -> Vec<GradedPoly> {
        v.iter().map(|p| p.to_poly(self.ctx())).collect()
    }

    /// `Σ v_a u^a`.
    pub fn one_form(&self, v: &[GradedPoly]) -> Section {
        let l = self.ctx().layout().expect("contact context");
        let mut r = GradedPoly::zero(self.ctx());
        for (a, va) in v.iter().enumerate() {
            r.add_scaled(&(va * &GradedPoly::gen(self.ctx(), l.u(a))), &Q::one());
        }
        r
    }

    /// Components of a 1-form `Σ v_a u^a`.
    pub fn components(&self, w: &Section) -> Vec<GradedPoly> {
        let l = self.ctx().layout().expect("contact context");
        (0..l.n).map(|a| w.dleft(l.u(a))).collect()
    }
}

/// `ι_X ω` and `ℒ_X ω` on the A side.
pub fn cartan_ops(inst: &SplitCJInstance, x: &[BasePoly], omega: &Section) -> (Section, Section) {
    let c = Cartan::a_side(inst);
    let xv = c.embed(x);
    (c.iota(&xv, omega), c.lie(&xv, omega))
}

/// The bracket `[[X+α, Y+β]]` assembled from Cartan calculus on both sides.
pub fn component_bracket(inst: &SplitCJInstance, u: &AnchoredSection, v: &AnchoredSection) -> Result<Section, CjError> {
    let ca = Cartan::a_side(inst);
    let cd = Cartan::dual_side(inst);
    let (x, y) = (ca.embed(&u.xi), ca.embed(&v.xi));
    let (al, be) = (ca.embed(&u.alpha), ca.embed(&v.alpha));
    let (xm, ym) = (cd.embed(&u.xi), cd.embed(&v.xi));
    let (alm, bem) = (cd.embed(&u.alpha), cd.embed(&v.alpha));
    let ups = upsilon_a(inst);
    let ups_d = upsilon_a_dual_mirror(inst);

    // Γ(A) part, computed on the mirror as 1-forms in ũ
    let mut a_part = cd.one_form(&ca_bracket_on_mirror(&ca, &cd, &x, &y));
    a_part.add_scaled(&cd.iota(&bem, &cd.d(&cd.one_form(&xm))), &-Q::one());
    a_part.add_scaled(&cd.lie(&alm, &cd.one_form(&ym)), &Q::one());
    a_part.add_scaled(&cd.iota(&bem, &cd.iota(&alm, &ups_d)), &Q::one());

    let mut d_part = ca.iota(&y, &ca.iota(&x, &ups));
    d_part.add_scaled(&ca.lie(&x, &ca.one_form(&be)), &Q::one());
    d_part.add_scaled(&ca.iota(&y, &ca.d(&ca.one_form(&al))), &-Q::one());
    d_part.add_scaled(&ca.one_form(&dual_bracket_on_a(&ca, &cd, &alm, &bem)), &Q::one());

    Ok(&legendre_pullback(&a_part)? + &d_part)
}

fn ca_bracket_on_mirror(ca: &Cartan, cd: &Cartan, x: &[GradedPoly], y: &[GradedPoly]) -> Vec<GradedPoly> {
    ca.bracket(x, y).iter().map(|p| transfer_base(p, cd.ctx())).collect()
}

fn dual_bracket_on_a(ca: &Cartan, cd: &Cartan, a: &[GradedPoly], b: &[GradedPoly]) -> Vec<GradedPoly> {
    cd.bracket(a, b).iter().map(|p| transfer_base(p, ca.ctx())).collect()
}

/// Moves a base polynomial between the A and mirror contexts.
fn transfer_base(p: &GradedPoly, to: &Arc<Context>) -> GradedPoly {
    let m = to.layout().expect("contact context").m;
    BasePoly::from_poly(p, m).expect("base polynomial").to_poly(to)
}

/// `∇_{X+α}λ = ι_X d_{A,L}λ + ι_α d_{A†,L}λ` from Cartan calculus.
pub fn component_nabla(inst: &SplitCJInstance, u: &AnchoredSection, lambda: &BasePoly) -> Section {
    let ca = Cartan::a_side(inst);
    let cd = Cartan::dual_side(inst);
    let la = ca.iota(&ca.embed(&u.xi), &ca.d(&lambda.to_poly(ca.ctx())));
    let ld = cd.iota(&cd.embed(&u.alpha), &cd.d(&lambda.to_poly(cd.ctx())));
    &la + &transfer_base(&ld, ca.ctx())
}

/// Probe sections for the direct axiom residuals.
pub struct Probes {
    pub frame: Vec<(String, Section)>,
    pub extended: Vec<(String, Section)>,
    pub functions: Vec<(String, Section)>,
}

pub fn probes(inst: &SplitCJInstance) -> Probes {
    let ctx = inst.ctx();
    let l = ctx.layout().expect("contact context");
    let mut frame = Vec::new();
    for a in 0..l.n {
        frame.push((format!("e{}", a + 1), GradedPoly::gen(&ctx, l.pa(a))));
    }
    for a in 0..l.n {
        frame.push((format!("e*{}", a + 1), GradedPoly::gen(&ctx, l.u(a))));
    }
    let mut extended = frame.clone();
    let mut functions = vec![("1".to_string(), GradedPoly::one(&ctx))];
    for i in 0..l.m {
        let xi = GradedPoly::gen(&ctx, l.x(i));
        for (name, s) in &frame {
            extended.push((format!("x{}*{}", i + 1, name), &xi * s));
        }
        functions.push((format!("x{}", i + 1), xi));
    }
    Probes { frame, extended, functions }
}

/// Outcome of the axiom check.
#[derive(Clone, Debug)]
pub struct CjAxiomReport {
    pub mc_residual: Section,
    pub jacobi_residuals: Vec<(String, Section)>,
    pub flatness_residuals: Vec<(String, Section)>,
    pub triples_checked: usize,
}

impl CjAxiomReport {
    pub fn mc_holds(&self) -> bool {
        self.mc_residual.is_zero()
    }

    pub fn direct_hold(&self) -> bool {
        self.jacobi_residuals.is_empty() && self.flatness_residuals.is_empty()
    }

    /// `{Θ,Θ} = 0 ⇔` all direct residuals vanish.
    pub fn biconditional_holds(&self) -> bool {
        self.mc_holds() == self.direct_hold()
    }

    pub fn all_pass(&self) -> bool {
        self.mc_holds() && self.direct_hold()
    }
}

/// `{Θ,Θ}` together with Jacobi-in-Leibniz-form and flatness residuals on probe sections.
///
/// With `stop_early`, the direct checks stop at the first nonzero residual.
pub fn check_cj_axioms(inst: &SplitCJInstance, stop_early: bool) -> Result<CjAxiomReport, CjError> {
    let theta = build_theta(inst)?;
    Ok(check_cj_axioms_theta(&theta, &probes(inst), stop_early))
}

pub fn check_cj_axioms_theta(theta: &Section, pr: &Probes, stop_early: bool) -> CjAxiomReport {
    let mc = jacobi_bracket(theta, theta);
    let lifted: Vec<Section> = pr.extended.iter().map(|(_, s)| jacobi_bracket(s, theta)).collect();
    let nf = pr.frame.len();
    let br = |i: usize, v: &Section| jacobi_bracket(&lifted[i], v);
    let br_any = |u: &Section, v: &Section| dorfman(theta, u, v);

    let mut triples = Vec::new();
    let ne = pr.extended.len();
    for i in 0..ne {
        for j in 0..ne {
            for k in 0..ne {
                let ext = [i, j, k].iter().filter(|&&t| t >= nf).count();
                if ext <= 1 {
                    triples.push((i, j, k));
                }
            }
        }
    }
    let mut jac = Vec::new();
    let mut checked = 0;
    for &(i, j, k) in &triples {
        if stop_early && !jac.is_empty() {
            break;
        }
        checked += 1;
        let (b, c) = (&pr.extended[j].1, &pr.extended[k].1);
        let bc = br(j, c);
        let ab = br(i, b);
        let ac = br(i, c);
        let mut r = br(i, &bc);
        r.add_scaled(&br_any(&ab, c), &-Q::one());
        r.add_scaled(&br(j, &ac), &-Q::one());
        if !r.is_zero() {
            jac.push((format!("({},{},{})", pr.extended[i].0, pr.extended[j].0, pr.extended[k].0), r));
        }
    }
    let mut flat = Vec::new();
    'f: for i in 0..ne {
        for j in 0..ne {
            if i >= nf && j >= nf {
                continue;
            }
            for (fname, f) in &pr.functions {
                if stop_early && (!flat.is_empty() || !jac.is_empty()) {
                    break 'f;
                }
                let b = &pr.extended[j].1;
                let ab = br(i, b);
                let mut r = nabla(theta, &ab, f);
                r.add_scaled(&br(i, &br(j, f)), &-Q::one());
                r.add_scaled(&br(j, &br(i, f)), &Q::one());
                if !r.is_zero() {
                    flat.push((format!("({},{};{})", pr.extended[i].0, pr.extended[j].0, fname), r));
                }
            }
        }
    }
    CjAxiomReport { mc_residual: mc, jacobi_residuals: jac, flatness_residuals: flat, triples_checked: checked }
}

/// `⟨⟨[[s_a,s_b]],s_c⟩⟩` on a Lagrangian frame.
pub fn courant_tensor(theta: &Section, frame: &[Section]) -> Result<Vec<Vec<Vec<Section>>>, CjError> {
    for (i, a) in frame.iter().enumerate() {
        require_degree_one(a)?;
        for (j, b) in frame.iter().enumerate().skip(i) {
            if !pairing(a, b).is_zero() {
                return Err(CjError::NotLagrangian(i, j));
            }
        }
    }
    let k = frame.len();
    let lifted: Vec<Section> = frame.iter().map(|s| jacobi_bracket(s, theta)).collect();
    let mut t = vec![vec![vec![GradedPoly::zero(theta.ctx()); k]; k]; k];
    for a in 0..k {
        for b in 0..k {
            let ab = jacobi_bracket(&lifted[a], &frame[b]);
            for c in 0..k {
                t[a][b][c] = pairing(&ab, &frame[c]);
            }
        }
    }
    Ok(t)
}

/// First nonzero component of the Courant tensor, if any.
pub fn is_dirac_jacobi(theta: &Section, frame: &[Section]) -> Result<(bool, Option<((usize, usize, usize), Section)>), CjError> {
    let t = courant_tensor(theta, frame)?;
    for (a, ta) in t.iter().enumerate() {
        for (b, tab) in ta.iter().enumerate() {
            for (c, v) in tab.iter().enumerate() {
                if !v.is_zero() {
                    return Ok((false, Some(((a, b, c), v.clone()))));
                }
            }
        }
    }
    Ok((true, None))
}

/// Frame of `A`.
pub fn frame_a(ctx: &Arc<Context>) -> Vec<Section> {
    let l = ctx.layout().expect("contact context");
    (0..l.n).map(|a| GradedPoly::gen(ctx, l.pa(a))).collect()
}

/// Frame of `A†`.
pub fn frame_a_dual(ctx: &Arc<Context>) -> Vec<Section> {
    let l = ctx.layout().expect("contact context");
    (0..l.n).map(|a| GradedPoly::gen(ctx, l.u(a))).collect()
}

/// An L-valued 2-form `η = Σ_{a<b} η_{ab} u^a u^b ⊗ μ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationForm {
    pub n: usize,
    pub comps: Vec<Vec<BasePoly>>,
}

impl DeformationForm {
    pub fn zero(n: usize) -> Self {
        DeformationForm { n, comps: zeros2(n, n) }
    }

    pub fn set(&mut self, a: usize, b: usize, v: BasePoly) {
        set_skew2(&mut self.comps, a, b, v);
    }

    pub fn validate(&self) -> Result<(), CjError> {
        for a in 0..self.n {
            for b in 0..self.n {
                if self.comps[a][b] != self.comps[b][a].neg() {
                    return Err(CjError::NotSkew(format!("eta[{a}][{b}]")));
                }
            }
        }
        Ok(())
    }

    pub fn to_section(&self, ctx: &Arc<Context>) -> Section {
        let l = ctx.layout().expect("contact context");
        let mut s = GradedPoly::zero(ctx);
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                let w = GradedPoly::word(ctx, &[l.u(a), l.u(b)]);
                s.add_scaled(&(&self.comps[a][b].to_poly(ctx) * &w), &Q::one());
            }
        }
        s
    }

    pub fn from_section(s: &Section) -> Result<Self, CjError> {
        let l = s.ctx().layout().ok_or(ContactError::NotContact)?;
        let mut out = Self::zero(l.n);
        for a in 0..l.n {
            for b in (a + 1)..l.n {
                let coef = s.dleft(l.u(a)).dleft(l.u(b));
                let bp = BasePoly::from_poly(&coef, l.m).ok_or(CjError::UnexpectedShape)?;
                out.set(b, a, bp.neg());
                out.set(a, b, bp);
            }
        }
        if out.to_section(s.ctx()) != *s {
            return Err(CjError::UnexpectedShape);
        }
        Ok(out)
    }
}

/// `η♭(e_a) = η(−, e_a) = −ι_{e_a}η`, the last-slot contraction.
pub fn flat_of(eta: &Section, a: usize) -> Section {
    let l = eta.ctx().layout().expect("contact context");
    -&eta.dleft(l.u(a))
}

/// Frame `{e_a − η♭(e_a)}` of `gr(−η)`.
pub fn graph(eta: &Section) -> Vec<Section> {
    let ctx = eta.ctx().clone();
    let l = ctx.layout().expect("contact context");
    (0..l.n).map(|a| &GradedPoly::gen(&ctx, l.pa(a)) - &flat_of(eta, a)).collect()
}

/// Left-derivative form of the Gerstenhaber–Jacobi bracket `[−,−]_{A†,L}` on `Ω•(A;L)`,
/// built as the unique graded bi-derivation extending its values on generators.
pub struct GjBracket<'a> {
    inst: &'a SplitCJInstance,
    ctx: Arc<Context>,
}

impl<'a> GjBracket<'a> {
    pub fn new(inst: &'a SplitCJInstance) -> Self {
        GjBracket { inst, ctx: inst.ctx() }
    }

    fn l(&self) -> crate::gca::ContactLayout {
        self.ctx.layout().expect("contact context")
    }

    fn gdeg(&self, z: Option<usize>) -> i64 {
        match z {
            Some(j) if self.ctx.is_odd(j) => 1,
            _ => 0,
        }
    }

    fn is_u(&self, j: usize) -> Option<usize> {
        let l = self.l();
        (j >= l.u(0) && j < l.u(0) + l.n).then(|| j - l.u(0))
    }

    /// Values on generators and `1`.
    fn table(&self, z: Option<usize>, w: Option<usize>) -> GradedPoly {
        let ctx = &self.ctx;
        let inst = self.inst;
        let l = self.l();
        match (z, w) {
            (None, None) => GradedPoly::zero(ctx),
            (Some(z), None) => match self.is_u(z) {
                Some(a) => inst.lam_dual[a].to_poly(ctx),
                None => GradedPoly::zero(ctx),
            },
            (None, Some(w)) => {
                let s = -parity_sign(-(self.gdeg(Some(w)) - 1));
                self.table(Some(w), None).scale(&s)
            }
            (Some(z), Some(w)) => match (self.is_u(z), self.is_u(w)) {
                (Some(a), Some(b)) => {
                    let mut r = GradedPoly::zero(ctx);
                    for k in 0..l.n {
                        r.add_scaled(&(&inst.c_dual[k][a][b].to_poly(ctx) * &GradedPoly::gen(ctx, l.u(k))), &Q::one());
                    }
                    r
                }
                (Some(a), None) => {
                    let i = w;
                    &inst.rho_dual[i][a].to_poly(ctx) + &(&GradedPoly::gen(ctx, l.x(i)) * &inst.lam_dual[a].to_poly(ctx))
                }
                (None, Some(_)) => {
                    let s = -parity_sign((self.gdeg(Some(z)) - 1) * (self.gdeg(Some(w)) - 1));
                    self.table(Some(w), Some(z)).scale(&s)
                }
                (None, None) => GradedPoly::zero(ctx),
            },
        }
    }

    /// `J(z, h)` for a generator (or `1`) in the first slot and parity-homogeneous `h`.
    fn j_gen(&self, z: Option<usize>, h: &GradedPoly, dh: i64) -> GradedPoly {
        let l = self.l();
        let dz = self.gdeg(z);
        let jz1 = self.table(z, None);
        let mut r = GradedPoly::zero(&self.ctx);
        for w in 0..(l.m + l.n) {
            let dh_w = h.dleft(w);
            if dh_w.is_zero() {
                continue;
            }
            let mut xw = self.table(z, Some(w));
            let s = parity_sign((dz - 1) * self.gdeg(Some(w)));
            xw.add_scaled(&(&GradedPoly::gen(&self.ctx, w) * &jz1), &-s);
            r.add_scaled(&(&xw * &dh_w), &Q::one());
        }
        r.add_scaled(&(h * &jz1), &parity_sign((dz - 1) * dh));
        r
    }

    /// `J(h, g)` with `g` the product of the generator word `gl`.
    fn j_h_word(&self, h: &GradedPoly, dh: i64, gl: &[usize]) -> GradedPoly {
        let jh1 = self.j_gen(None, h, dh).scale(&-parity_sign(-(dh - 1)));
        let Some((&w, rest)) = gl.split_first() else { return jh1 };
        let dw = self.gdeg(Some(w));
        let mut grest = GradedPoly::one(&self.ctx);
        for &z in rest {
            grest = &grest * &GradedPoly::gen(&self.ctx, z);
        }
        let jhw = self.j_gen(Some(w), h, dh).scale(&-parity_sign((dh - 1) * (dw - 1)));
        let s = parity_sign((dh - 1) * dw);
        let wg = GradedPoly::gen(&self.ctx, w);
        let mut xhw = jhw;
        xhw.add_scaled(&(&wg * &jh1), &-&s);
        let mut r = &xhw * &grest;
        r.add_scaled(&(&wg * &self.j_h_word(h, dh, rest)), &s);
        r
    }

    /// `[gμ, hμ]_{A†,L} = J(g,h)μ`.
    pub fn bracket(&self, g: &Section, h: &Section) -> Section {
        let mut r = GradedPoly::zero(&self.ctx);
        for (dh, hp) in h.split_parity().iter().enumerate() {
            if hp.is_zero() {
                continue;
            }
            let dh = dh as i64;
            for (mono, cf) in g.terms() {
                let mut gl = Vec::new();
                for (j, &e) in mono.0.iter().enumerate() {
                    for _ in 0..e {
                        gl.push(j);
                    }
                }
                let dg = mono.degree(&self.ctx) as i64;
                let v = self.j_h_word(hp, dh, &gl).scale(&(-parity_sign((dg - 1) * (dh - 1)) * cf));
                r.add_scaled(&v, &Q::one());
            }
        }
        r
    }
}

/// The cubic deformation L∞[1] algebra of `Ω•(A;L)[2]`.
pub struct DeformationAlgebra {
    pub inst: SplitCJInstance,
    pub theta: Section,
}

impl DeformationAlgebra {
    pub fn new(inst: &SplitCJInstance) -> Result<Self, CjError> {
        Ok(DeformationAlgebra { inst: inst.clone(), theta: build_theta(inst)? })
    }

    pub fn from_theta(inst: &SplitCJInstance, theta: Section) -> Self {
        DeformationAlgebra { inst: inst.clone(), theta }
    }

    pub fn ctx(&self) -> Arc<Context> {
        self.theta.ctx().clone()
    }

    /// Higher derived bracket over the V-data with MC element `−Θ`.
    pub fn derived(&self, args: &[Section]) -> Section {
        let v = contact_vdata(&self.theta);
        higher_derived_bracket(&v, args.len(), args).expect("arguments are forms")
    }

    /// Closed formulas for `m₀..m₃`; zero beyond.
    pub fn closed(&self, args: &[Section]) -> Section {
        let ctx = self.ctx();
        match args {
            [] => upsilon_a(&self.inst),
            [a] => d_a(&self.inst).apply(a),
            [a, b] => {
                let gj = GjBracket::new(&self.inst);
                let mut r = GradedPoly::zero(&ctx);
                for (p, ap) in a.split_parity().iter().enumerate() {
                    r.add_scaled(&gj.bracket(ap, b), &parity_sign(p as i64));
                }
                r
            }
            [a, b, c] => self.m3_closed(a, b, c),
            _ => GradedPoly::zero(&ctx),
        }
    }

    fn m3_closed(&self, a: &Section, b: &Section, c: &Section) -> Section {
        let ctx = self.ctx();
        let l = ctx.layout().expect("contact context");
        let n = l.n;
        let da: Vec<_> = (0..n).map(|i| a.dleft(l.u(i))).collect();
        let dc: Vec<_> = (0..n).map(|i| c.dleft(l.u(i))).collect();
        let mut r = GradedPoly::zero(&ctx);
        for (p, bp) in b.split_parity().iter().enumerate() {
            if bp.is_zero() {
                continue;
            }
            let dbp: Vec<_> = (0..n).map(|i| bp.dleft(l.u(i))).collect();
            let mut s = GradedPoly::zero(&ctx);
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let psi = &self.inst.psi[x][y][z];
                        if psi.is_zero() {
                            continue;
                        }
                        let t = &(&da[x] * &dbp[y]) * &dc[z];
                        s.add_scaled(&(&psi.to_poly(&ctx) * &t), &Q::one());
                    }
                }
            }
            r.add_scaled(&s, &-parity_sign(p as i64));
        }
        r
    }

    /// The space of forms with base-polynomial degree ≤ `x_cutoff`, graded by `k − 2`.
    pub fn form_space(&self, x_cutoff: u32) -> GradedSpace<Monomial> {
        form_space(self.inst.m, self.inst.n, x_cutoff)
    }

    /// The L∞[1] structure with brackets from the derived route.
    pub fn linfty(&self, x_cutoff: u32) -> LInftyStructure<Monomial> {
        let ctx = self.ctx();
        let theta = self.theta.clone();
        let c2 = ctx.clone();
        let coeff = memoize(Arc::new(move |w: &[Monomial]| {
            let args: Vec<Section> = w.iter().map(|m| GradedPoly::term(&c2, m.clone(), Q::one())).collect();
            let v = contact_vdata(&theta);
            let r = higher_derived_bracket(&v, args.len(), &args).expect("forms");
            section_to_vector(&r)
        }));
        let curvature = section_to_vector(&upsilon_a(&self.inst));
        LInftyStructure::new(TaylorCoderivation::new(self.form_space(x_cutoff), 1, curvature, coeff, Some(3)))
    }
}

pub fn form_space(m: usize, n: usize, x_cutoff: u32) -> GradedSpace<Monomial> {
    let ctx = Context::contact(m, n);
    let l = ctx.layout().expect("contact context");
    let mut basis = Vec::new();
    let mut xs: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..m {
        xs = xs
            .into_iter()
            .flat_map(|v| (0..=x_cutoff).map(move |e| {
                let mut w = v.clone();
                w.push(e);
                w
            }))
            .collect();
    }
    xs.retain(|v| v.iter().sum::<u32>() <= x_cutoff);
    for xe in &xs {
        for mask in 0u32..(1 << n) {
            let mut e = vec![0; l.len()];
            e[..m].copy_from_slice(xe);
            for a in 0..n {
                if mask & (1 << a) != 0 {
                    e[l.u(a)] = 1;
                }
            }
            basis.push(Monomial(e));
        }
    }
    let c2 = ctx.clone();
    GradedSpace::new(basis, Arc::new(move |k: &Monomial| k.degree(&c2) as i64 - 2))
}

pub fn section_to_vector(s: &Section) -> Vector<Monomial> {
    s.terms().iter().map(|(m, c)| (m.clone(), c.clone())).collect()
}

pub fn vector_to_section(ctx: &Arc<Context>, v: &Vector<Monomial>) -> Section {
    GradedPoly::from_terms(ctx, v.iter().map(|(m, c)| (m.clone(), c.clone())))
}

/// `Σ_{a<b} ε^{ab} p_a p_b`, the Legendre pullback of `½ε^{ab}ũ_aũ_b`.
pub fn epsilon_section(inst: &SplitCJInstance, eps: &[Vec<BasePoly>]) -> Result<Section, CjError> {
    let n = inst.n;
    if eps.len() != n || eps.iter().any(|r| r.len() != n) {
        return Err(CjError::Dimension("epsilon".into()));
    }
    for a in 0..n {
        for b in 0..n {
            if eps[a][b] != eps[b][a].neg() {
                return Err(CjError::NotSkew(format!("epsilon[{a}][{b}]")));
            }
        }
    }
    let mctx = inst.mirror_ctx();
    let l = mctx.layout().expect("contact context");
    let mut e = GradedPoly::zero(&mctx);
    for a in 0..n {
        for b in (a + 1)..n {
            let w = GradedPoly::word(&mctx, &[l.u(a), l.u(b)]);
            e.add_scaled(&(&eps[a][b].to_poly(&mctx) * &w), &Q::one());
        }
    }
    Ok(legendre_pullback(&e)?)
}

/// `e^𝗆 s = Σ 𝗆^k s / k!` with `𝗆 = {ε, −}`; terminates on polynomial sections.
pub fn exp_m(eps_sec: &Section, s: &Section) -> Section {
    let mut out = s.clone();
    let mut cur = s.clone();
    let mut k = 1;
    loop {
        cur = jacobi_bracket(eps_sec, &cur);
        if cur.is_zero() {
            break;
        }
        out.add_scaled(&cur, &inv_factorial(k));
        k += 1;
        assert!(k < 64, "e^m series does not terminate");
    }
    out
}

/// Result of a change of Lagrangian complement.
pub struct ComplementChange {
    pub instance: SplitCJInstance,
    pub theta0: Section,
    pub theta1: Section,
    pub eps_section: Section,
    pub space: GradedSpace<Monomial>,
    pub m: TaylorCoderivation<Monomial>,
    pub exp_m: TaylorMorphism<Monomial>,
}

/// `𝖬_k(ω₁…ω_k) = P{…{𝗆ω₁,ω₂}…,ω_k}` as a Taylor coderivation of degree 0.
pub fn m_coderivation(eps_sec: &Section, space: GradedSpace<Monomial>) -> TaylorCoderivation<Monomial> {
    let ctx = eps_sec.ctx().clone();
    let e = eps_sec.clone();
    let coeff = memoize(Arc::new(move |w: &[Monomial]| {
        let args: Vec<Section> = w.iter().map(|m| GradedPoly::term(&ctx, m.clone(), Q::one())).collect();
        section_to_vector(&m_k_sections(&e, &args))
    }));
    TaylorCoderivation::new(space, 0, Vector::new(), coeff, None)
}

pub fn m_k_sections(eps_sec: &Section, args: &[Section]) -> Section {
    let Some((first, rest)) = args.split_first() else {
        return GradedPoly::zero(eps_sec.ctx());
    };
    let mut acc = jacobi_bracket(eps_sec, first);
    for a in rest {
        acc = jacobi_bracket(&acc, a);
    }
    project_p(&acc)
}

/// Changes the complement by `ε ∈ Ω²(A†;L)`; `x_cutoff` truncates the form basis.
pub fn change_complement(inst: &SplitCJInstance, eps: &[Vec<BasePoly>], x_cutoff: u32, trunc: usize) -> Result<ComplementChange, CjError> {
    let eps_sec = epsilon_section(inst, eps)?;
    let theta0 = build_theta(inst)?;
    let theta1 = exp_m(&eps_sec, &theta0);
    let instance = instance_from_theta(inst.m, inst.n, &theta1)?;
    let space = form_space(inst.m, inst.n, x_cutoff);
    let m = m_coderivation(&eps_sec, space.clone());
    let exp_m = exp_coderivation(&m, trunc).expect("M lowers word length");
    Ok(ComplementChange { instance, theta0, theta1, eps_section: eps_sec, space, m, exp_m })
}

/// Closed form of `𝖬₂`: `(𝖬₂(ω₁⊙ω₂))♯ = ω₁♯ε♭ω₂♯ + ω₂♯ε♭ω₁♯`, `𝖬₂(ω⊙α) = ω♯(ε♭α)`,
/// and `−(−1)^{|ω₁|} ε^{ba} ∂_aω₁ ∂_bω₂` for the remaining degrees,
/// with `ε♭(α) = ε(−, α)`.
pub fn m2_closed(inst: &SplitCJInstance, eps: &[Vec<BasePoly>], w1: &Section, w2: &Section) -> Section {
    let ctx = inst.ctx();
    let l = ctx.layout().expect("contact context");
    let n = l.n;
    let e: Vec<Vec<GradedPoly>> = eps.iter().map(|r| r.iter().map(|p| p.to_poly(&ctx)).collect()).collect();
    let d = |w: &Section, a: usize| w.dleft(l.u(a));
    // ω♯(ε♭(β)) for a 1-form β
    let sharp_flat = |w: &Section, beta: &Section| {
        let mut r = GradedPoly::zero(&ctx);
        for a in 0..n {
            let ba = d(beta, a);
            if ba.is_zero() {
                continue;
            }
            for b in 0..n {
                if e[b][a].is_zero() {
                    continue;
                }
                r.add_scaled(&(&(&e[b][a] * &ba) * &d(w, b)), &Q::one());
            }
        }
        r
    };
    match (w1.degree(), w2.degree()) {
        (Some(2), Some(2)) => {
            let mut total = GradedPoly::zero(&ctx);
            for c in 0..n {
                let uc = GradedPoly::gen(&ctx, l.u(c));
                let mut mc = sharp_flat(w1, &d(w2, c));
                mc.add_scaled(&sharp_flat(w2, &d(w1, c)), &Q::one());
                total.add_scaled(&(&uc * &mc), &qr(1, 2));
            }
            total
        }
        (Some(2), Some(1)) => sharp_flat(w1, w2),
        (Some(1), Some(2)) => sharp_flat(w2, w1),
        _ => {
            let mut r = GradedPoly::zero(&ctx);
            for (p, w1p) in w1.split_parity().iter().enumerate() {
                for a in 0..n {
                    for b in 0..n {
                        if e[b][a].is_zero() {
                            continue;
                        }
                        let t = &(&e[b][a] * &d(w1p, a)) * &d(w2, b);
                        r.add_scaled(&t, &-parity_sign(p as i64));
                    }
                }
            }
            r
        }
    }
}

fn coeff_of(s: &Section, j: usize, m: usize) -> Result<BasePoly, CjError> {
    BasePoly::from_poly(&s.dleft(j), m).ok_or(CjError::UnexpectedShape)
}

/// Reads structure functions off a bracket and connection on `Γ(A⊕A†)`.
pub fn instance_from_operations(
    m: usize,
    n: usize,
    bracket: impl Fn(&Section, &Section) -> Section,
    conn: impl Fn(&Section, &Section) -> Section,
) -> Result<SplitCJInstance, CjError> {
    let ctx = Context::contact(m, n);
    let l = ctx.layout().expect("contact context");
    let one = GradedPoly::one(&ctx);
    let mut inst = SplitCJInstance::zero(m, n);
    let e = frame_a(&ctx);
    let ed = frame_a_dual(&ctx);
    let base = |s: &Section| BasePoly::from_poly(s, m).ok_or(CjError::UnexpectedShape);
    for a in 0..n {
        inst.lam[a] = base(&conn(&e[a], &one))?;
        inst.lam_dual[a] = base(&conn(&ed[a], &one))?;
        for i in 0..m {
            let xi = GradedPoly::gen(&ctx, l.x(i));
            inst.rho[i][a] = base(&(&conn(&e[a], &xi) - &(&xi * &inst.lam[a].to_poly(&ctx))))?;
            inst.rho_dual[i][a] = base(&(&conn(&ed[a], &xi) - &(&xi * &inst.lam_dual[a].to_poly(&ctx))))?;
        }
        for b in 0..n {
            let ab = bracket(&e[a], &e[b]);
            let abd = bracket(&ed[a], &ed[b]);
            for k in 0..n {
                inst.c[k][a][b] = coeff_of(&ab, l.pa(k), m)?;
                inst.phi[a][b][k] = coeff_of(&ab, l.u(k), m)?;
                inst.c_dual[k][a][b] = coeff_of(&abd, l.u(k), m)?;
                inst.psi[a][b][k] = coeff_of(&abd, l.pa(k), m)?;
            }
        }
    }
    inst.validate()?;
    Ok(inst)
}

/// Structure functions of the split algebroid encoded by a cubic `Θ`.
pub fn instance_from_theta(m: usize, n: usize, theta: &Section) -> Result<SplitCJInstance, CjError> {
    instance_from_operations(m, n, |u, v| dorfman(theta, u, v), |u, f| nabla(theta, u, f))
}

/// Structure functions after transporting along `ξ + α ↦ ξ + α + ι_α ε` (left contraction in
/// the mirror), computed from the operations of the original instance.
pub fn transported_instance(inst: &SplitCJInstance, eps: &[Vec<BasePoly>]) -> Result<SplitCJInstance, CjError> {
    let theta = build_theta(inst)?;
    let ctx = inst.ctx();
    let n = inst.n;
    let e: Vec<Vec<GradedPoly>> = eps.iter().map(|r| r.iter().map(|p| p.to_poly(&ctx)).collect()).collect();
    let l = ctx.layout().expect("contact context");
    // s ↦ s + sign·ι_αε for the α-part of s
    let shift = |s: &Section, sign: Q| -> Section {
        let mut r = s.clone();
        for a in 0..n {
            let alpha_a = project_p(&s.dleft(l.u(a)));
            if alpha_a.is_zero() {
                continue;
            }
            for b in 0..n {
                if e[a][b].is_zero() {
                    continue;
                }
                r.add_scaled(&(&(&alpha_a * &e[a][b]) * &GradedPoly::gen(&ctx, l.pa(b))), &sign);
            }
        }
        r
    };
    let fwd = |s: &Section| shift(s, Q::one());
    let back = |s: &Section| shift(s, -Q::one());
    instance_from_operations(
        inst.m,
        n,
        |u, v| fwd(&dorfman(&theta, &back(u), &back(v))),
        |u, f| nabla(&theta, &back(u), f),
    )
}

/// Checks whether a section only involves base and `u` generators.
pub fn is_form(s: &Section) -> bool {
    is_basic(s)
}

/// Named fixtures.
pub mod fixtures {
    use super::*;

    /// `m = 0, n = 2`, `λ = (1,0)`, everything else zero.
    pub fn heis2() -> SplitCJInstance {
        let mut i = SplitCJInstance::zero(0, 2);
        i.lam[0] = BasePoly::int(0, 1);
        i
    }

    /// HEIS2 with `λ = (1,1)` and `[e₁,e₂] = e₂`: flatness fails.
    pub fn heis2_broken() -> SplitCJInstance {
        let mut i = SplitCJInstance::zero(0, 2);
        i.lam[0] = BasePoly::int(0, 1);
        i.lam[1] = BasePoly::int(0, 1);
        i.set_c(1, 0, 1, BasePoly::int(0, 1));
        i
    }

    /// The gauge algebroid frame `(𝟙, Δ)` over a line: `λ = (1,0)`, `ρ^x = (0,1)`.
    pub fn omni1() -> SplitCJInstance {
        let mut i = SplitCJInstance::zero(1, 2);
        i.lam[0] = BasePoly::int(1, 1);
        i.rho[0][1] = BasePoly::int(1, 1);
        i
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn theta_of_fixtures() {
        let t = build_theta(&heis2()).unwrap();
        let ctx = t.ctx().clone();
        let l = ctx.layout().unwrap();
        assert_eq!(t, GradedPoly::word(&ctx, &[l.u(0), l.p()]));
        let t = build_theta(&omni1()).unwrap();
        let ctx = t.ctx().clone();
        let l = ctx.layout().unwrap();
        assert_eq!(t, &GradedPoly::word(&ctx, &[l.u(0), l.p()]) + &GradedPoly::word(&ctx, &[l.u(1), l.px(0)]));
        assert!(build_theta(&SplitCJInstance::zero(1, 3)).unwrap().is_zero());
    }

    #[test]
    fn pairing_and_nabla_examples() {
        let inst = heis2();
        let theta = build_theta(&inst).unwrap();
        let ctx = theta.ctx().clone();
        let l = ctx.layout().unwrap();
        let p1 = GradedPoly::gen(&ctx, l.pa(0));
        let u1 = GradedPoly::gen(&ctx, l.u(0));
        let one = GradedPoly::one(&ctx);
        let ops = derived_operations_theta(&theta, &p1, &u1, &one).unwrap();
        assert_eq!(ops.pairing, one);
        assert_eq!(ops.nabla, one);
        assert!(matches!(derived_operations_theta(&theta, &one, &u1, &one), Err(CjError::NotDegreeOne)));
    }

    #[test]
    fn graph_of_heis2_form() {
        let ctx = Context::contact(0, 2);
        let l = ctx.layout().unwrap();
        let eta = GradedPoly::word(&ctx, &[l.u(0), l.u(1)]);
        let f = graph(&eta);
        assert_eq!(f[0], &GradedPoly::gen(&ctx, l.pa(0)) + &GradedPoly::gen(&ctx, l.u(1)));
        assert_eq!(f[1], &GradedPoly::gen(&ctx, l.pa(1)) - &GradedPoly::gen(&ctx, l.u(0)));
        assert_eq!(graph(&GradedPoly::zero(&ctx)), frame_a(&ctx));
    }

    #[test]
    fn left_contraction_example() {
        let inst = heis2();
        let ctx = inst.ctx();
        let l = ctx.layout().unwrap();
        let w = GradedPoly::word(&ctx, &[l.u(0), l.u(1)]);
        let (i, _) = cartan_ops(&inst, &[BasePoly::int(0, 1), BasePoly::zero()], &w);
        assert_eq!(i, GradedPoly::gen(&ctx, l.u(1)));
    }

    #[test]
    fn roundtrip_instance_from_theta() {
        let mut inst = omni1();
        inst.set_c_dual(0, 0, 1, BasePoly::x(1, 0));
        inst.set_psi(0, 1, 1, BasePoly::zero());
        inst.set_c(0, 0, 1, BasePoly::int(1, 2));
        inst.rho_dual[0][0] = BasePoly::int(1, -1);
        let theta = build_theta(&inst).unwrap();
        assert_eq!(instance_from_theta(1, 2, &theta).unwrap(), inst);
    }

    #[test]
    fn non_skew_rejected() {
        let mut inst = heis2();
        inst.c[0][0][1] = BasePoly::int(0, 1);
        assert!(matches!(build_theta(&inst), Err(CjError::NotSkew(_))));
    }
}
