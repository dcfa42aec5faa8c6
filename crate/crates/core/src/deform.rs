//! Deformations of Dirac–Jacobi structures over a point base.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::cjalg::{build_theta, d_a, BasePoly, CjError, DeformationAlgebra, DeformationForm, SplitCJInstance};
use crate::contact::{jacobi_bracket, Section};
use crate::gca::{Context, GradedPoly, Monomial};
use crate::linalg::Matrix;
use crate::random::TestRng;
use crate::rational::{inv_factorial, q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeformError {
    #[error("cohomology needs a point base, got m = {0}")]
    UnsupportedBase(usize),
    #[error("d² ≠ 0 in degree {0}")]
    NotFlat(usize),
    #[error("the curvature Υ_A is nonzero")]
    Curved,
    #[error("η is not closed")]
    NotClosed,
    #[error("degree {0} out of range")]
    Degree(usize),
    #[error(transparent)]
    Cj(#[from] CjError),
}

/// Subsets of `0..n` of size `k` in lexicographic order.
pub fn form_basis(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for a in start..n {
            cur.push(a);
            go(a + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn basis_monomial(ctx: &Arc<Context>, s: &[usize]) -> Monomial {
    let l = ctx.layout().expect("contact context");
    let mut e = vec![0; ctx.len()];
    for &a in s {
        e[l.u(a)] = 1;
    }
    Monomial(e)
}

/// Coordinates of a `k`-form in the monomial basis `u^S`, `S` increasing.
pub fn form_to_vec(ctx: &Arc<Context>, w: &Section, k: usize) -> Result<Vec<Q>, DeformError> {
    let l = ctx.layout().expect("contact context");
    let basis = form_basis(l.n, k);
    let v: Vec<Q> = basis.iter().map(|s| w.coeff(&basis_monomial(ctx, s))).collect();
    if vec_to_form(ctx, &v, k) != *w {
        return Err(DeformError::Degree(k));
    }
    Ok(v)
}

pub fn vec_to_form(ctx: &Arc<Context>, v: &[Q], k: usize) -> Section {
    let l = ctx.layout().expect("contact context");
    let basis = form_basis(l.n, k);
    GradedPoly::from_terms(ctx, basis.iter().zip(v).map(|(s, c)| (basis_monomial(ctx, s), c.clone())))
}

/// Matrices of `d_{A,L}: Ω^k → Ω^{k+1}` for `k = 0..n`.
#[derive(Clone, Debug)]
pub struct ComplexMatrices {
    pub n: usize,
    pub d: Vec<Matrix>,
}

impl ComplexMatrices {
    pub fn new(inst: &SplitCJInstance) -> Result<Self, DeformError> {
        if inst.m != 0 {
            return Err(DeformError::UnsupportedBase(inst.m));
        }
        inst.validate()?;
        let n = inst.n;
        let ctx = inst.ctx();
        let d = d_a(inst);
        let mut mats = Vec::new();
        for k in 0..=n {
            let src = form_basis(n, k);
            let rows = if k < n { form_basis(n, k + 1).len() } else { 0 };
            let cols: Vec<Vec<Q>> = src
                .iter()
                .map(|s| {
                    let img = d.apply(&GradedPoly::term(&ctx, basis_monomial(&ctx, s), Q::one()));
                    if k < n {
                        form_to_vec(&ctx, &img, k + 1).expect("d raises degree by one")
                    } else {
                        Vec::new()
                    }
                })
                .collect();
            mats.push(Matrix::from_columns(rows, &cols));
        }
        Ok(ComplexMatrices { n, d: mats })
    }

    /// First `k` with `d_{k+1} d_k ≠ 0`.
    pub fn first_nonflat_degree(&self) -> Option<usize> {
        (0..self.n.saturating_sub(1)).find(|&k| !self.d[k + 1].mul(&self.d[k]).is_zero())
    }

    pub fn check_flat(&self) -> Result<(), DeformError> {
        match self.first_nonflat_degree() {
            Some(k) => Err(DeformError::NotFlat(k)),
            None => Ok(()),
        }
    }

    pub fn dim(&self, k: usize) -> usize {
        self.d[k].cols
    }

    /// Matrix of `d: Ω^{k−1} → Ω^k` (zero map for `k = 0`).
    pub fn incoming(&self, k: usize) -> Matrix {
        if k == 0 {
            Matrix::zeros(self.dim(0), 0)
        } else {
            self.d[k - 1].clone()
        }
    }
}

/// `H^k` with a basis of representatives complementary to the coboundaries.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub k: usize,
    pub dim: usize,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    pub representatives: Vec<Vec<Q>>,
    incoming: Matrix,
}

impl Cohomology {
    /// Primitive `ξ` with `dξ = v` supported on the first pivot columns, if `v` is exact.
    pub fn primitive(&self, v: &[Q]) -> Option<Vec<Q>> {
        self.incoming.solve(v)
    }

    /// Coordinates of the class of a cocycle in the representative basis.
    pub fn class_coords(&self, v: &[Q]) -> Vec<Q> {
        let mut cols: Vec<Vec<Q>> = self.representatives.clone();
        for j in 0..self.incoming.cols {
            cols.push(self.incoming.column(j));
        }
        let a = Matrix::from_columns(v.len(), &cols);
        let x = a.solve(v).expect("cocycle lies in span of representatives and coboundaries");
        x[..self.dim].to_vec()
    }

    pub fn is_exact(&self, v: &[Q]) -> bool {
        self.primitive(v).is_some()
    }
}

pub fn cohomology(inst: &SplitCJInstance, k: usize) -> Result<Cohomology, DeformError> {
    let cm = ComplexMatrices::new(inst)?;
    cm.check_flat()?;
    cohomology_of(&cm, k)
}

pub fn cohomology_of(cm: &ComplexMatrices, k: usize) -> Result<Cohomology, DeformError> {
    if k > cm.n {
        return Err(DeformError::Degree(k));
    }
    let dimk = cm.dim(k);
    let cocycles = if k < cm.n { cm.d[k].nullspace() } else { identity_basis(dimk) };
    let incoming = cm.incoming(k);
    let coboundary_dim = incoming.rank();
    let mut reps = Vec::new();
    let mut span: Vec<Vec<Q>> = (0..incoming.cols).map(|j| incoming.column(j)).collect();
    let mut rank = coboundary_dim;
    for z in cocycles.iter() {
        let mut trial = span.clone();
        trial.push(z.clone());
        let r = Matrix::from_columns(dimk, &trial).rank();
        if r > rank {
            rank = r;
            span = trial;
            reps.push(z.clone());
        }
    }
    Ok(Cohomology {
        k,
        dim: reps.len(),
        cocycle_dim: cocycles.len(),
        coboundary_dim,
        representatives: reps,
        incoming,
    })
}

fn identity_basis(d: usize) -> Vec<Vec<Q>> {
    (0..d)
        .map(|i| {
            let mut v = vec![Q::zero(); d];
            v[i] = Q::one();
            v
        })
        .collect()
}

/// `Kur[η] = [m₂(η,η)] ∈ H³`.
#[derive(Clone, Debug)]
pub struct KuranishiClass {
    pub representative: Section,
    pub coords: Vec<Q>,
}

impl KuranishiClass {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

fn require_setting(inst: &SplitCJInstance) -> Result<(ComplexMatrices, DeformationAlgebra), DeformError> {
    let cm = ComplexMatrices::new(inst)?;
    cm.check_flat()?;
    let da = DeformationAlgebra::new(inst)?;
    if !da.closed(&[]).is_zero() {
        return Err(DeformError::Curved);
    }
    Ok((cm, da))
}

pub fn kuranishi(inst: &SplitCJInstance, eta: &Section) -> Result<KuranishiClass, DeformError> {
    let (cm, da) = require_setting(inst)?;
    if !da.closed(std::slice::from_ref(eta)).is_zero() {
        return Err(DeformError::NotClosed);
    }
    let rep = da.closed(&[eta.clone(), eta.clone()]);
    let h3 = cohomology_of(&cm, 3.min(cm.n))?;
    let coords = if cm.n < 3 { Vec::new() } else { h3.class_coords(&form_to_vec(&inst.ctx(), &rep, 3)?) };
    Ok(KuranishiClass { representative: rep, coords })
}

#[derive(Clone, Debug)]
pub struct Obstruction {
    pub order: usize,
    /// The cumulative residual at that order; a non-exact 3-cocycle.
    pub residual: Section,
    pub coords: Vec<Q>,
}

/// `η_t = Σ t^k η_k`, possibly stopped by an obstruction.
#[derive(Clone, Debug)]
pub struct FormalCurve {
    pub coeffs: Vec<Section>,
    pub obstruction: Option<Obstruction>,
}

impl FormalCurve {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn as_forms(&self) -> Result<Vec<DeformationForm>, CjError> {
        self.coeffs.iter().map(DeformationForm::from_section).collect()
    }
}

/// Coefficient of `t^k` in `½Σ m₂(η_i,η_j) + ⅙Σ m₃(η_i,η_j,η_l)` over indices `≥ 1`.
fn nonlinear_part(da: &DeformationAlgebra, eta: &[Section], k: usize) -> Section {
    let ctx = da.ctx();
    let get = |i: usize| eta.get(i - 1).cloned().unwrap_or_else(|| GradedPoly::zero(&ctx));
    let mut r = GradedPoly::zero(&ctx);
    for i in 1..k {
        let j = k - i;
        r.add_scaled(&da.closed(&[get(i), get(j)]), &inv_factorial(2));
    }
    for i in 1..k {
        for j in 1..(k - i) {
            let l = k - i - j;
            r.add_scaled(&da.closed(&[get(i), get(j), get(l)]), &inv_factorial(3));
        }
    }
    r
}

/// Solves the MC equation order by order starting from a closed `η₁`.
pub fn extend_mc(inst: &SplitCJInstance, eta1: &Section, order: usize) -> Result<FormalCurve, DeformError> {
    let (cm, da) = require_setting(inst)?;
    if !da.closed(std::slice::from_ref(eta1)).is_zero() {
        return Err(DeformError::NotClosed);
    }
    let ctx = inst.ctx();
    let n = inst.n;
    let mut coeffs = vec![eta1.clone()];
    if n < 3 {
        while coeffs.len() < order {
            coeffs.push(GradedPoly::zero(&ctx));
        }
        return Ok(FormalCurve { coeffs, obstruction: None });
    }
    let h3 = cohomology_of(&cm, 3)?;
    for k in 2..=order {
        let res = nonlinear_part(&da, &coeffs, k);
        let v = form_to_vec(&ctx, &res, 3)?;
        let neg: Vec<Q> = v.iter().map(|c| -c).collect();
        match h3.primitive(&neg) {
            Some(x) => coeffs.push(vec_to_form(&ctx, &x, 2)),
            None => {
                let coords = h3.class_coords(&v);
                return Ok(FormalCurve { coeffs, obstruction: Some(Obstruction { order: k, residual: res, coords }) });
            }
        }
    }
    Ok(FormalCurve { coeffs, obstruction: None })
}

/// Coefficients of `t^0..t^{3N}` of the MC residual of `Σ t^k η_k`, using derived brackets.
pub fn mc_residual_series(inst: &SplitCJInstance, coeffs: &[Section]) -> Result<Vec<Section>, DeformError> {
    let da = DeformationAlgebra::new(inst)?;
    let ctx = inst.ctx();
    let nn = coeffs.len();
    let mut out = vec![GradedPoly::zero(&ctx); 3 * nn + 1];
    out[0] = da.derived(&[]);
    for (i, a) in coeffs.iter().enumerate() {
        out[i + 1].add_scaled(&da.derived(std::slice::from_ref(a)), &Q::one());
        for (j, b) in coeffs.iter().enumerate() {
            out[i + j + 2].add_scaled(&da.derived(&[a.clone(), b.clone()]), &inv_factorial(2));
            for (l, c) in coeffs.iter().enumerate() {
                out[i + j + l + 3].add_scaled(&da.derived(&[a.clone(), b.clone(), c.clone()]), &inv_factorial(3));
            }
        }
    }
    Ok(out)
}

/// Entry in `{-1, 0, 1}`, zero with probability `1 − density`.
fn sparse_entry(rng: &mut TestRng, density: f64) -> BasePoly {
    if rng.gen_bool(density) {
        BasePoly::int(0, if rng.gen_bool(0.5) { 1 } else { -1 })
    } else {
        BasePoly::zero()
    }
}

fn random_dual_side(inst: &mut SplitCJInstance, rng: &mut TestRng, density: f64, with_psi: bool) {
    let n = inst.n;
    for a in 0..n {
        inst.lam_dual[a] = sparse_entry(rng, density);
    }
    for k in 0..n {
        for a in 0..n {
            for b in (a + 1)..n {
                let v = sparse_entry(rng, density);
                inst.set_c_dual(k, a, b, v);
            }
        }
    }
    if with_psi && n >= 3 {
        let v = sparse_entry(rng, density);
        inst.set_psi(0, 1, 2, v);
    }
}

fn is_cj(inst: &SplitCJInstance) -> bool {
    build_theta(inst).map(|t| jacobi_bracket(&t, &t).is_zero()).unwrap_or(false)
}

/// Result of a seeded fixture search.
#[derive(Clone, Debug)]
pub struct SearchHit {
    pub instance: SplitCJInstance,
    pub eta: DeformationForm,
    pub attempts: usize,
}

/// Searches point-base rank-3 instances with trivial `A` and random sparse `A†` for a CJ
/// instance and a 2-form `u^a u^b` with nonzero Kuranishi class.
pub fn search_obstructed(seed: u64, max_attempts: usize) -> Option<SearchHit> {
    let mut rng = crate::random::rng(seed);
    for attempt in 1..=max_attempts {
        let mut inst = SplitCJInstance::zero(0, 3);
        random_dual_side(&mut inst, &mut rng, 0.3, true);
        if inst.dual_is_trivial() || !is_cj(&inst) {
            continue;
        }
        for s in form_basis(3, 2) {
            let mut eta = DeformationForm::zero(3);
            eta.set(s[0], s[1], BasePoly::int(0, 1));
            let sec = eta.to_section(&inst.ctx());
            if let Ok(k) = kuranishi(&inst, &sec) {
                if !k.is_zero() {
                    return Some(SearchHit { instance: inst, eta, attempts: attempt });
                }
            }
        }
    }
    None
}

/// Searches rank-3 instances with random sparse `A` (no `Υ_A`) and `A†` (no `Υ_{A†}`) for a CJ
/// instance with `H³ = 0` and a closed 2-form from the cocycle basis with `m₂(η,η) ≠ 0`.
pub fn search_dgla(seed: u64, max_attempts: usize) -> Option<SearchHit> {
    let mut rng = crate::random::rng(seed);
    for attempt in 1..=max_attempts {
        let mut inst = SplitCJInstance::zero(0, 3);
        for a in 0..3 {
            inst.lam[a] = sparse_entry(&mut rng, 0.3);
        }
        for k in 0..3 {
            for a in 0..3 {
                for b in (a + 1)..3 {
                    let v = sparse_entry(&mut rng, 0.3);
                    inst.set_c(k, a, b, v);
                }
            }
        }
        random_dual_side(&mut inst, &mut rng, 0.3, false);
        if inst.dual_is_trivial() || !is_cj(&inst) {
            continue;
        }
        let Ok(cm) = ComplexMatrices::new(&inst) else { continue };
        if cm.check_flat().is_err() || cohomology_of(&cm, 3).map(|h| h.dim) != Ok(0) {
            continue;
        }
        let Ok(da) = DeformationAlgebra::new(&inst) else { continue };
        let ctx = inst.ctx();
        for z in cm.d[2].nullspace() {
            let sec = vec_to_form(&ctx, &z, 2);
            if !da.closed(&[sec.clone(), sec.clone()]).is_zero() {
                let eta = DeformationForm::from_section(&sec).ok()?;
                return Some(SearchHit { instance: inst, eta, attempts: attempt });
            }
        }
    }
    None
}

/// Searches rank-3 point-base instances with every structure function random and sparse for a
/// CJ instance with `d_{A,L} ≠ 0`, a nonzero A†-bracket and `Υ_{A†} ≠ 0`.
pub fn search_full(seed: u64, max_attempts: usize) -> Option<(SplitCJInstance, usize)> {
    let mut rng = crate::random::rng(seed);
    for attempt in 1..=max_attempts {
        let mut inst = SplitCJInstance::zero(0, 3);
        for a in 0..3 {
            inst.lam[a] = sparse_entry(&mut rng, 0.3);
        }
        for k in 0..3 {
            for a in 0..3 {
                for b in (a + 1)..3 {
                    let v = sparse_entry(&mut rng, 0.3);
                    inst.set_c(k, a, b, v);
                }
            }
        }
        let v = sparse_entry(&mut rng, 0.3);
        inst.set_phi(0, 1, 2, v);
        random_dual_side(&mut inst, &mut rng, 0.3, true);
        let bracket_nonzero = inst.c_dual.iter().flatten().flatten().any(|p| !p.is_zero());
        if inst.psi[0][1][2].is_zero() || !bracket_nonzero || d_a(&inst).f.is_zero() && inst.c.iter().flatten().flatten().all(|p| p.is_zero()) {
            continue;
        }
        if is_cj(&inst) {
            return Some((inst, attempt));
        }
    }
    None
}

/// All `η` with integer components in `[-r, r]` satisfying the MC equation.
pub fn small_mc_solutions(inst: &SplitCJInstance, r: i64) -> Result<Vec<DeformationForm>, DeformError> {
    let da = DeformationAlgebra::new(inst)?;
    let n = inst.n;
    let pairs = form_basis(n, 2);
    let mut out = Vec::new();
    let total = (2 * r + 1).pow(pairs.len() as u32);
    for idx in 0..total {
        let mut eta = DeformationForm::zero(n);
        let mut t = idx;
        for p in &pairs {
            let v = t % (2 * r + 1) - r;
            t /= 2 * r + 1;
            eta.set(p[0], p[1], BasePoly::constant(inst.m, q(v)));
        }
        if mc_residual_closed(&da, &eta.to_section(&inst.ctx())).is_zero() {
            out.push(eta);
        }
    }
    Ok(out)
}

/// `m₀ + m₁η + ½m₂(η,η) + ⅙m₃(η,η,η)` from the closed formulas.
pub fn mc_residual_closed(da: &DeformationAlgebra, eta: &Section) -> Section {
    let mut r = da.closed(&[]);
    r.add_scaled(&da.closed(std::slice::from_ref(eta)), &Q::one());
    r.add_scaled(&da.closed(&[eta.clone(), eta.clone()]), &inv_factorial(2));
    r.add_scaled(&da.closed(&[eta.clone(), eta.clone(), eta.clone()]), &inv_factorial(3));
    r
}

/// The same residual from V-data derived brackets.
pub fn mc_residual_derived(da: &DeformationAlgebra, eta: &Section) -> Section {
    let mut r = da.derived(&[]);
    r.add_scaled(&da.derived(std::slice::from_ref(eta)), &Q::one());
    r.add_scaled(&da.derived(&[eta.clone(), eta.clone()]), &inv_factorial(2));
    r.add_scaled(&da.derived(&[eta.clone(), eta.clone(), eta.clone()]), &inv_factorial(3));
    r
}
