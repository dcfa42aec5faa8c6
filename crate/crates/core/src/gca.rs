//! Graded-commutative polynomials with exact rational coefficients.
//!
//! Generators carry a bidegree `(ε, δ)`; the parity is `(ε + δ) mod 2` and the
//! total degree is `ε + δ`. Monomials are stored as exponent vectors in the
//! context's canonical generator order, so an odd generator has exponent 0 or 1.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{fmt_q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GcaError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("not a permutation")]
    NotAPermutation,
    #[error("polynomials live in different algebra contexts")]
    ContextMismatch,
    #[error("derivation has no value on generator `{0}`")]
    MissingGeneratorValue(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub bidegree: (u32, u32),
}

impl Generator {
    pub fn new(name: impl Into<String>, bidegree: (u32, u32)) -> Self {
        Generator { name: name.into(), bidegree }
    }

    pub fn weight(&self) -> u32 {
        self.bidegree.0 + self.bidegree.1
    }

    pub fn is_odd(&self) -> bool {
        self.weight() % 2 == 1
    }
}

/// Index layout of a degree-2 contact context `J¹[2]L_A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ContactLayout {
    pub m: usize,
    pub n: usize,
    pub mirror: bool,
}

impl ContactLayout {
    pub fn x(&self, i: usize) -> usize {
        i
    }
    pub fn u(&self, a: usize) -> usize {
        self.m + a
    }
    pub fn pa(&self, a: usize) -> usize {
        self.m + self.n + a
    }
    pub fn px(&self, i: usize) -> usize {
        self.m + 2 * self.n + i
    }
    pub fn p(&self) -> usize {
        2 * self.m + 2 * self.n
    }
    pub fn len(&self) -> usize {
        2 * self.m + 2 * self.n + 1
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Whether generator `j` is one of the fiber momenta `p_a, p_i, p`.
    pub fn is_momentum(&self, j: usize) -> bool {
        j >= self.m + self.n
    }
}

/// An algebra context: the ordered list of generators.
#[derive(Debug)]
pub struct Context {
    gens: Vec<Generator>,
    odd: Vec<bool>,
    weight: Vec<u32>,
    layout: Option<ContactLayout>,
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens && self.layout == other.layout
    }
}
impl Eq for Context {}

impl Context {
    /// A context with the given generators; their order is the canonical order.
    pub fn new(gens: Vec<Generator>) -> Result<Arc<Context>, GcaError> {
        Self::build(gens, None)
    }

    fn build(gens: Vec<Generator>, layout: Option<ContactLayout>) -> Result<Arc<Context>, GcaError> {
        let mut seen = std::collections::HashSet::new();
        for g in &gens {
            if !seen.insert(g.name.clone()) {
                return Err(GcaError::DuplicateName(g.name.clone()));
            }
        }
        let odd = gens.iter().map(|g| g.is_odd()).collect();
        let weight = gens.iter().map(|g| g.weight()).collect();
        Ok(Arc::new(Context { gens, odd, weight, layout }))
    }

    /// The contact context over base dimension `m` and fiber rank `n`, interned.
    pub fn contact(m: usize, n: usize) -> Arc<Context> {
        Self::contact_kind(m, n, false)
    }

    /// The mirror (A† side) contact context with the same dimensions.
    pub fn contact_mirror(m: usize, n: usize) -> Arc<Context> {
        Self::contact_kind(m, n, true)
    }

    fn contact_kind(m: usize, n: usize, mirror: bool) -> Arc<Context> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize, bool), Arc<Context>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("context cache poisoned");
        guard
            .entry((m, n, mirror))
            .or_insert_with(|| {
                let t = if mirror { "~" } else { "" };
                let mut gens = Vec::new();
                for i in 0..m {
                    gens.push(Generator::new(format!("x{}", i + 1), (0, 0)));
                }
                for a in 0..n {
                    gens.push(Generator::new(format!("u{t}{}", a + 1), (0, 1)));
                }
                for a in 0..n {
                    gens.push(Generator::new(format!("p{t}_{}", a + 1), (1, 0)));
                }
                for i in 0..m {
                    gens.push(Generator::new(format!("p{t}_x{}", i + 1), (1, 1)));
                }
                gens.push(Generator::new(format!("p{t}"), (1, 1)));
                Self::build(gens, Some(ContactLayout { m, n, mirror })).expect("distinct names")
            })
            .clone()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generator(&self, j: usize) -> &Generator {
        &self.gens[j]
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn is_odd(&self, j: usize) -> bool {
        self.odd[j]
    }

    pub fn weight(&self, j: usize) -> u32 {
        self.weight[j]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, GcaError> {
        self.gens
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| GcaError::UnknownGenerator(name.to_string()))
    }

    pub fn layout(&self) -> Option<ContactLayout> {
        self.layout
    }

    pub fn same(a: &Arc<Context>, b: &Arc<Context>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

/// Exponent vector in canonical generator order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(len: usize) -> Self {
        Monomial(vec![0; len])
    }

    pub fn generator(len: usize, j: usize) -> Self {
        let mut e = vec![0; len];
        e[j] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self, ctx: &Context) -> u32 {
        self.0.iter().enumerate().map(|(j, &e)| e * ctx.weight(j)).sum()
    }

    pub fn bidegree(&self, ctx: &Context) -> (u32, u32) {
        let mut b = (0, 0);
        for (j, &e) in self.0.iter().enumerate() {
            let g = ctx.generator(j).bidegree;
            b.0 += e * g.0;
            b.1 += e * g.1;
        }
        b
    }

    /// Number of odd generators present (each with exponent 1).
    pub fn odd_count(&self, ctx: &Context) -> usize {
        self.0.iter().enumerate().filter(|&(j, &e)| e > 0 && ctx.is_odd(j)).count()
    }
}

/// Product of two monomials: `None` if an odd generator repeats.
pub fn mono_mul(ctx: &Context, a: &Monomial, b: &Monomial) -> Option<(bool, Monomial)> {
    let mut neg = false;
    let n = ctx.len();
    // moving each odd generator of `b` left past the odd generators of `a` with larger index
    let mut odd_after = 0usize;
    for j in (0..n).rev() {
        if ctx.is_odd(j) && b.0[j] > 0 {
            if a.0[j] > 0 {
                return None;
            }
            if odd_after % 2 == 1 {
                neg = !neg;
            }
        }
        if ctx.is_odd(j) && a.0[j] > 0 {
            odd_after += 1;
        }
    }
    let e = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
    Some((neg, Monomial(e)))
}

/// Koszul normal form of a word of generator indices.
pub fn normalize_indices(ctx: &Context, word: &[usize]) -> Option<(i32, Monomial)> {
    let mut inv = 0usize;
    for i in 0..word.len() {
        for j in (i + 1)..word.len() {
            let (a, b) = (word[i], word[j]);
            if ctx.is_odd(a) && ctx.is_odd(b) {
                if a == b {
                    return None;
                }
                if a > b {
                    inv += 1;
                }
            }
        }
    }
    let mut e = vec![0; ctx.len()];
    for &w in word {
        e[w] += 1;
    }
    Some((if inv.is_multiple_of(2) { 1 } else { -1 }, Monomial(e)))
}

/// Koszul normal form of a word given by generator names.
pub fn normalize(ctx: &Context, word: &[&str]) -> Result<Option<(i32, Monomial)>, GcaError> {
    let idx = word.iter().map(|w| ctx.index_of(w)).collect::<Result<Vec<_>, _>>()?;
    Ok(normalize_indices(ctx, &idx))
}

/// Sign picked up by rearranging `(v_0, …, v_{n-1})` into `(v_{perm[0]}, …, v_{perm[n-1]})`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<i32, GcaError> {
    if perm.len() != degrees.len() {
        return Err(GcaError::LengthMismatch(perm.len(), degrees.len()));
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(GcaError::NotAPermutation);
        }
        seen[p] = true;
    }
    Ok(koszul_sign_unchecked(perm, degrees))
}

pub(crate) fn koszul_sign_unchecked(perm: &[usize], degrees: &[i64]) -> i32 {
    let mut inv = 0usize;
    for i in 0..perm.len() {
        if degrees[perm[i]].rem_euclid(2) == 0 {
            continue;
        }
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] && degrees[perm[j]].rem_euclid(2) == 1 {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// A polynomial: finite map from monomials to nonzero rationals.
#[derive(Clone)]
pub struct GradedPoly {
    ctx: Arc<Context>,
    terms: BTreeMap<Monomial, Q>,
}

impl PartialEq for GradedPoly {
    fn eq(&self, other: &Self) -> bool {
        Context::same(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}
impl Eq for GradedPoly {}

impl GradedPoly {
    pub fn zero(ctx: &Arc<Context>) -> Self {
        GradedPoly { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Arc<Context>, c: Q) -> Self {
        Self::term(ctx, Monomial::one(ctx.len()), c)
    }

    pub fn one(ctx: &Arc<Context>) -> Self {
        Self::constant(ctx, Q::one())
    }

    pub fn gen(ctx: &Arc<Context>, j: usize) -> Self {
        Self::term(ctx, Monomial::generator(ctx.len(), j), Q::one())
    }

    pub fn term(ctx: &Arc<Context>, m: Monomial, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        GradedPoly { ctx: ctx.clone(), terms }
    }

    /// Product of the generators in `word`, normalized.
    pub fn word(ctx: &Arc<Context>, word: &[usize]) -> Self {
        match normalize_indices(ctx, word) {
            None => Self::zero(ctx),
            Some((s, m)) => Self::term(ctx, m, Q::from_integer(s.into())),
        }
    }

    pub fn from_terms(ctx: &Arc<Context>, it: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Self::zero(ctx);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn ctx(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Q> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    /// Constant term.
    pub fn constant_term(&self) -> Q {
        self.coeff(&Monomial::one(self.ctx.len()))
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &GradedPoly, c: &Q) {
        self.check(other);
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Q) -> GradedPoly {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        GradedPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    fn check(&self, other: &GradedPoly) {
        assert!(Context::same(&self.ctx, &other.ctx), "{}", GcaError::ContextMismatch);
    }

    pub fn checked_mul(&self, other: &GradedPoly) -> Result<GradedPoly, GcaError> {
        if !Context::same(&self.ctx, &other.ctx) {
            return Err(GcaError::ContextMismatch);
        }
        Ok(self.mul_raw(other))
    }

    fn mul_raw(&self, other: &GradedPoly) -> GradedPoly {
        let mut r = GradedPoly::zero(&self.ctx);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((neg, m)) = mono_mul(&self.ctx, a, b) {
                    let c = ca * cb;
                    r.add_term(m, if neg { -c } else { c });
                }
            }
        }
        r
    }

    pub fn checked_add(&self, other: &GradedPoly) -> Result<GradedPoly, GcaError> {
        if !Context::same(&self.ctx, &other.ctx) {
            return Err(GcaError::ContextMismatch);
        }
        Ok(self + other)
    }

    /// Total degree if homogeneous and nonzero.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.degree(&self.ctx));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Parity if all terms share one (zero counts as even).
    pub fn parity(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.degree(&self.ctx) % 2);
        match it.next() {
            None => Some(0),
            Some(d) => it.all(|e| e == d).then_some(d),
        }
    }

    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.keys().map(|m| m.bidegree(&self.ctx));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Even and odd parts.
    pub fn split_parity(&self) -> [GradedPoly; 2] {
        let mut out = [GradedPoly::zero(&self.ctx), GradedPoly::zero(&self.ctx)];
        for (m, c) in &self.terms {
            let p = (m.degree(&self.ctx) % 2) as usize;
            out[p].terms.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn by_degree(&self) -> BTreeMap<u32, GradedPoly> {
        let mut out: BTreeMap<u32, GradedPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree(&self.ctx))
                .or_insert_with(|| GradedPoly::zero(&self.ctx))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    pub fn by_bidegree(&self) -> BTreeMap<(u32, u32), GradedPoly> {
        let mut out: BTreeMap<(u32, u32), GradedPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.bidegree(&self.ctx))
                .or_insert_with(|| GradedPoly::zero(&self.ctx))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> GradedPoly {
        GradedPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Left partial derivative with respect to generator `j`.
    pub fn dleft(&self, j: usize) -> GradedPoly {
        let mut r = GradedPoly::zero(&self.ctx);
        let odd = self.ctx.is_odd(j);
        for (m, c) in &self.terms {
            let e = m.0[j];
            if e == 0 {
                continue;
            }
            let mut neg = false;
            if odd {
                let before = (0..j).filter(|&i| m.0[i] > 0 && self.ctx.is_odd(i)).count();
                neg = before % 2 == 1;
            }
            let mut mm = m.clone();
            mm.0[j] -= 1;
            let v = c * Q::from_integer(e.into());
            r.add_term(mm, if neg { -v } else { v });
        }
        r
    }

    /// Whether any term involves generator `j`.
    pub fn involves(&self, j: usize) -> bool {
        self.terms.keys().any(|m| m.0[j] > 0)
    }

    /// Algebra substitution: generator `j` of `self`'s context goes to `images[j]` in `target`.
    pub fn substitute(&self, target: &Arc<Context>, images: &[GradedPoly]) -> GradedPoly {
        let mut r = GradedPoly::zero(target);
        let mut powers: HashMap<(usize, u32), GradedPoly> = HashMap::new();
        for (m, c) in &self.terms {
            let mut t = GradedPoly::constant(target, c.clone());
            for (j, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = powers
                    .entry((j, e))
                    .or_insert_with(|| {
                        let mut p = GradedPoly::one(target);
                        for _ in 0..e {
                            p = &p * &images[j];
                        }
                        p
                    })
                    .clone();
                t = &t * &pw;
                if t.is_zero() {
                    break;
                }
            }
            r.add_scaled(&t, &Q::one());
        }
        r
    }
}

impl Add for &GradedPoly {
    type Output = GradedPoly;
    fn add(self, o: &GradedPoly) -> GradedPoly {
        let mut r = self.clone();
        r.add_scaled(o, &Q::one());
        r
    }
}

impl Sub for &GradedPoly {
    type Output = GradedPoly;
    fn sub(self, o: &GradedPoly) -> GradedPoly {
        let mut r = self.clone();
        r.add_scaled(o, &-Q::one());
        r
    }
}

impl Mul for &GradedPoly {
    type Output = GradedPoly;
    fn mul(self, o: &GradedPoly) -> GradedPoly {
        self.check(o);
        self.mul_raw(o)
    }
}

impl Neg for &GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        self.scale(&-Q::one())
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(j, &e)| {
                    let n = &self.ctx.generator(j).name;
                    if e == 1 {
                        n.clone()
                    } else {
                        format!("{n}^{e}")
                    }
                })
                .collect();
            let cs = fmt_q(c);
            let neg = cs.starts_with('-');
            let abs = cs.trim_start_matches('-');
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs == "1" {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{abs}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedPoly({self})")
    }
}

/// A graded derivation given by its values on generators.
#[derive(Clone, Debug)]
pub struct GradedDerivation {
    pub ctx: Arc<Context>,
    pub degree: i64,
    pub values: Vec<Option<GradedPoly>>,
}

impl GradedDerivation {
    pub fn new(ctx: &Arc<Context>, degree: i64) -> Self {
        GradedDerivation { ctx: ctx.clone(), degree, values: vec![None; ctx.len()] }
    }

    /// The derivation vanishing on every generator.
    pub fn zero(ctx: &Arc<Context>, degree: i64) -> Self {
        GradedDerivation { ctx: ctx.clone(), degree, values: vec![Some(GradedPoly::zero(ctx)); ctx.len()] }
    }

    /// `∂/∂z_j` (left derivative).
    pub fn partial(ctx: &Arc<Context>, j: usize) -> Self {
        let mut d = Self::zero(ctx, -(ctx.weight(j) as i64));
        d.values[j] = Some(GradedPoly::one(ctx));
        d
    }

    pub fn set(&mut self, j: usize, v: GradedPoly) -> &mut Self {
        self.values[j] = Some(v);
        self
    }

    pub fn value(&self, j: usize) -> Option<&GradedPoly> {
        self.values[j].as_ref()
    }

    pub fn parity(&self) -> i64 {
        self.degree.rem_euclid(2)
    }

    /// `D(f) = Σ_j D(z_j) ∂f/∂z_j`.
    pub fn apply(&self, f: &GradedPoly) -> Result<GradedPoly, GcaError> {
        if !Context::same(&self.ctx, f.ctx()) {
            return Err(GcaError::ContextMismatch);
        }
        let mut r = GradedPoly::zero(&self.ctx);
        for j in 0..self.ctx.len() {
            if !f.involves(j) {
                continue;
            }
            let v = self.values[j]
                .as_ref()
                .ok_or_else(|| GcaError::MissingGeneratorValue(self.ctx.generator(j).name.clone()))?;
            if v.is_zero() {
                continue;
            }
            r.add_scaled(&(v * &f.dleft(j)), &Q::one());
        }
        Ok(r)
    }

    /// Graded commutator `[D, D'] = DD' − (−1)^{|D||D'|} D'D`.
    pub fn commutator(&self, other: &GradedDerivation) -> Result<GradedDerivation, GcaError> {
        let sign = if self.parity() * other.parity() == 1 { Q::one() } else { -Q::one() };
        let mut out = GradedDerivation::new(&self.ctx, self.degree + other.degree);
        for j in 0..self.ctx.len() {
            let z = GradedPoly::gen(&self.ctx, j);
            let a = self.apply(&other.apply(&z)?)?;
            let b = other.apply(&self.apply(&z)?)?;
            let mut v = a;
            v.add_scaled(&b, &sign);
            out.values[j] = Some(v);
        }
        Ok(out)
    }
}

pub fn derivation_apply(d: &GradedDerivation, f: &GradedPoly) -> Result<GradedPoly, GcaError> {
    d.apply(f)
}

pub fn mul(f: &GradedPoly, g: &GradedPoly) -> Result<GradedPoly, GcaError> {
    f.checked_mul(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn ctx() -> Arc<Context> {
        Context::contact(1, 2)
    }

    #[test]
    fn normalize_examples() {
        let c = ctx();
        let (s, m) = normalize(&c, &["u2", "u1"]).unwrap().unwrap();
        assert_eq!(s, -1);
        assert_eq!(m, normalize(&c, &["u1", "u2"]).unwrap().unwrap().1);
        assert!(normalize(&c, &["u1", "u1"]).unwrap().is_none());
        let (s, m) = normalize(&c, &["p", "u1"]).unwrap().unwrap();
        assert_eq!(s, 1);
        assert_eq!(m, normalize(&c, &["u1", "p"]).unwrap().unwrap().1);
        assert!(matches!(normalize(&c, &["zz"]), Err(GcaError::UnknownGenerator(_))));
    }

    #[test]
    fn mul_examples() {
        let c = ctx();
        let l = c.layout().unwrap();
        let u1 = GradedPoly::gen(&c, l.u(0));
        let u2 = GradedPoly::gen(&c, l.u(1));
        let u12 = GradedPoly::word(&c, &[l.u(0), l.u(1)]);
        assert_eq!(&u1 * &u2, u12);
        assert_eq!(&u2 * &u1, -&u12);
        let p = GradedPoly::gen(&c, l.p());
        let pp = &p * &p;
        assert_eq!(pp.terms().values().next().unwrap(), &q(1));
        assert_eq!(&(&u1 + &u2) * &u1, -&u12);
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&[1, 0], &[1, 0]).unwrap(), 1);
        assert_eq!(koszul_sign(&[1, 2, 0], &[1, 1, 1]).unwrap(), 1);
        assert!(koszul_sign(&[0], &[1, 1]).is_err());
    }

    #[test]
    fn derivation_examples() {
        let c = Context::contact(0, 2);
        let l = c.layout().unwrap();
        let u1 = GradedPoly::gen(&c, l.u(0));
        let u2 = GradedPoly::gen(&c, l.u(1));
        let p = GradedPoly::gen(&c, l.p());
        let dp = GradedDerivation::partial(&c, l.p());
        assert_eq!(dp.apply(&(&u1 * &p)).unwrap(), u1);
        let du1 = GradedDerivation::partial(&c, l.u(0));
        assert_eq!(du1.apply(&(&u1 * &u2)).unwrap(), u2);
        // D_1 = ∂/∂u1 + p_1 ∂/∂p on u1 p
        let mut d = GradedDerivation::zero(&c, -1);
        d.set(l.u(0), GradedPoly::one(&c));
        d.set(l.p(), GradedPoly::gen(&c, l.pa(0)));
        let p1 = GradedPoly::gen(&c, l.pa(0));
        assert_eq!(d.apply(&(&u1 * &p)).unwrap(), &p + &(&p1 * &u1));
    }
}
