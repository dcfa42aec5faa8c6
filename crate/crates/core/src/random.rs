//! Seeded generators for random test data.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contact::{ContactVectorField, LineDerivation};
use crate::gca::{Context, GradedDerivation, GradedPoly, Monomial};
use crate::rational::q;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero-ish integer coefficient in `[-r, r]`.
pub fn coeff(rng: &mut TestRng, r: i64) -> crate::Q {
    q(rng.gen_range(-r..=r))
}

/// Random monomial of total degree exactly `deg`, if one was hit.
pub fn random_monomial(ctx: &Context, rng: &mut TestRng, deg: u32) -> Option<Monomial> {
    for _ in 0..50 {
        let mut e = vec![0u32; ctx.len()];
        let mut d = 0;
        let mut order: Vec<usize> = (0..ctx.len()).collect();
        order.shuffle(rng);
        for j in order {
            let w = ctx.weight(j);
            if w == 0 {
                e[j] = rng.gen_range(0..=1);
                continue;
            }
            let mx = if ctx.is_odd(j) { 1 } else { 2 };
            let k = rng.gen_range(0..=mx);
            if d + k * w <= deg {
                e[j] = k;
                d += k * w;
            }
        }
        if d == deg {
            return Some(Monomial(e));
        }
    }
    None
}

/// Homogeneous random polynomial of total degree `deg` with up to `terms` terms.
pub fn random_poly(ctx: &Arc<Context>, rng: &mut TestRng, deg: u32, terms: usize) -> GradedPoly {
    let mut p = GradedPoly::zero(ctx);
    for _ in 0..terms {
        if let Some(m) = random_monomial(ctx, rng, deg) {
            p.add_term(m, coeff(rng, 3));
        }
    }
    p
}

/// Random polynomial in the first `m` (degree-0) generators of total x-degree ≤ `maxdeg`.
pub fn random_base_poly(ctx: &Arc<Context>, rng: &mut TestRng, m: usize, maxdeg: u32) -> GradedPoly {
    let mut p = GradedPoly::constant(ctx, coeff(rng, 2));
    if maxdeg >= 1 {
        for i in 0..m {
            p.add_term(Monomial::generator(ctx.len(), i), coeff(rng, 2));
        }
    }
    p
}

/// Random base polynomial: constant plus linear terms when `maxdeg ≥ 1`, each coefficient in `[-2,2]`.
pub fn random_base(rng: &mut TestRng, m: usize, maxdeg: u32) -> crate::cjalg::BasePoly {
    let mut p = crate::cjalg::BasePoly::constant(m, coeff(rng, 2));
    if maxdeg >= 1 {
        for i in 0..m {
            let mut e = vec![0; m];
            e[i] = 1;
            p.add_term(e, coeff(rng, 2));
        }
    }
    p
}

/// A random (generally non-CJ) instance with entries of x-degree ≤ `maxdeg`.
pub fn random_instance(rng: &mut TestRng, m: usize, n: usize, maxdeg: u32) -> crate::cjalg::SplitCJInstance {
    let mut inst = crate::cjalg::SplitCJInstance::zero(m, n);
    for a in 0..n {
        inst.lam[a] = random_base(rng, m, maxdeg);
        inst.lam_dual[a] = random_base(rng, m, maxdeg);
        for i in 0..m {
            inst.rho[i][a] = random_base(rng, m, maxdeg);
            inst.rho_dual[i][a] = random_base(rng, m, maxdeg);
        }
    }
    for k in 0..n {
        for a in 0..n {
            for b in (a + 1)..n {
                let v = random_base(rng, m, maxdeg);
                inst.set_c(k, a, b, v);
                let v = random_base(rng, m, maxdeg);
                inst.set_c_dual(k, a, b, v);
            }
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                let v = random_base(rng, m, maxdeg);
                inst.set_phi(a, b, c, v);
                let v = random_base(rng, m, maxdeg);
                inst.set_psi(a, b, c, v);
            }
        }
    }
    inst
}

/// Random `Ω^k(A;L)` element `Σ f_S u^S` with base coefficients of degree ≤ `maxdeg`.
pub fn random_form(ctx: &Arc<Context>, rng: &mut TestRng, k: usize, maxdeg: u32) -> GradedPoly {
    let l = ctx.layout().expect("contact context");
    let mut p = GradedPoly::zero(ctx);
    for mask in 0u32..(1 << l.n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let word: Vec<usize> = (0..l.n).filter(|a| mask & (1 << a) != 0).map(|a| l.u(a)).collect();
        let f = random_base(rng, l.m, maxdeg).to_poly(ctx);
        p.add_scaled(&(&f * &GradedPoly::word(ctx, &word)), &crate::Q::from_integer(1.into()));
    }
    p
}

/// Homogeneous derivation of the given degree with random values on every generator.
pub fn random_derivation(ctx: &Arc<Context>, rng: &mut TestRng, deg: i64) -> GradedDerivation {
    let mut d = GradedDerivation::zero(ctx, deg);
    for j in 0..ctx.len() {
        let w = ctx.weight(j) as i64 + deg;
        let v = if w >= 0 { random_poly(ctx, rng, w as u32, 2) } else { GradedPoly::zero(ctx) };
        d.set(j, v);
    }
    d
}

pub fn random_vector_field(ctx: &Arc<Context>, rng: &mut TestRng, deg: i64) -> ContactVectorField {
    ContactVectorField { field: random_derivation(ctx, rng, deg) }
}

/// `δ = f + fx^i D_i + fu^a D_a` of degree `k` with x-linear coefficients.
pub fn random_line_derivation(ctx: &Arc<Context>, rng: &mut TestRng, k: i64) -> LineDerivation {
    let l = ctx.layout().expect("contact context");
    let mut d = LineDerivation::zero(ctx, k);
    if k >= 0 {
        d.f = random_form(ctx, rng, k as usize, 1);
        for i in 0..l.m {
            d.fx[i] = random_form(ctx, rng, k as usize, 1);
        }
    }
    if k < l.n as i64 {
        for a in 0..l.n {
            d.fu[a] = random_form(ctx, rng, (k + 1) as usize, 1);
        }
    }
    d
}
