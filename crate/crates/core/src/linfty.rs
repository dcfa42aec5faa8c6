//! Symmetric-coalgebra machinery: coderivations and coalgebra morphisms from
//! Taylor coefficients, codifferential and morphism checks, Maurer–Cartan
//! residuals, décalage, and exponential flows.
//!
//! A graded space is given by basis keys with integer degrees. Elements of `V`
//! are [`Vector`]s; elements of `S V` are [`SymVector`]s keyed by sorted words.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::gca::koszul_sign_unchecked;
use crate::rational::{inv_factorial, parity_sign, Q};

pub trait Key: Ord + Clone + Debug + std::hash::Hash + Send + Sync + 'static {}
impl<T: Ord + Clone + Debug + std::hash::Hash + Send + Sync + 'static> Key for T {}

pub type Vector<K> = BTreeMap<K, Q>;
pub type SymVector<K> = BTreeMap<Vec<K>, Q>;
pub type DegreeFn<K> = Arc<dyn Fn(&K) -> i64 + Send + Sync>;
pub type CoeffFn<K> = Arc<dyn Fn(&[K]) -> Vector<K> + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinftyError {
    #[error("Taylor coefficient of arity {0} is not defined")]
    MissingCoefficient(usize),
    #[error("coderivation does not lower word length; the exponential series would not terminate")]
    NotPronilpotent,
    #[error("element is not of degree {expected}")]
    DegreeMismatch { expected: i64 },
    #[error("bracket family has no arity bound")]
    UnboundedArity,
}

pub fn vadd<K: Key>(acc: &mut Vector<K>, other: &Vector<K>, c: &Q) {
    if c.is_zero() {
        return;
    }
    for (k, v) in other {
        let e = acc.entry(k.clone()).or_insert_with(Q::zero);
        *e += v * c;
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

pub fn vscale<K: Key>(v: &Vector<K>, c: &Q) -> Vector<K> {
    if c.is_zero() {
        return Vector::new();
    }
    v.iter().map(|(k, x)| (k.clone(), x * c)).collect()
}

fn add_entry<K: Ord>(acc: &mut BTreeMap<K, Q>, k: K, c: Q) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match acc.entry(k) {
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

/// A graded vector space with a chosen basis (possibly a truncation of an infinite one).
#[derive(Clone)]
pub struct GradedSpace<K: Key> {
    pub basis: Vec<K>,
    degree: DegreeFn<K>,
}

impl<K: Key> GradedSpace<K> {
    pub fn new(basis: Vec<K>, degree: DegreeFn<K>) -> Self {
        GradedSpace { basis, degree }
    }

    pub fn degree(&self, k: &K) -> i64 {
        (self.degree)(k)
    }

    pub fn degree_fn(&self) -> DegreeFn<K> {
        self.degree.clone()
    }

    pub fn is_odd(&self, k: &K) -> bool {
        self.degree(k).rem_euclid(2) == 1
    }

    /// Sorts a word into canonical order; `None` if an odd key repeats.
    pub fn normalize(&self, word: &[K]) -> Option<(i32, Vec<K>)> {
        let mut idx: Vec<usize> = (0..word.len()).collect();
        idx.sort_by(|&a, &b| word[a].cmp(&word[b]).then(a.cmp(&b)));
        for w in idx.windows(2) {
            if word[w[0]] == word[w[1]] && self.is_odd(&word[w[0]]) {
                return None;
            }
        }
        let degs: Vec<i64> = word.iter().map(|k| self.degree(k)).collect();
        let s = koszul_sign_unchecked(&idx, &degs);
        Some((s, idx.iter().map(|&i| word[i].clone()).collect()))
    }

    /// Degree of a word in `S V`.
    pub fn word_degree(&self, word: &[K]) -> i64 {
        word.iter().map(|k| self.degree(k)).sum()
    }

    /// All canonical basis words of length `n`.
    pub fn words(&self, n: usize) -> Vec<Vec<K>> {
        let mut basis = self.basis.clone();
        basis.sort();
        basis.dedup();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.words_rec(&basis, 0, n, &mut cur, &mut out);
        out
    }

    fn words_rec(&self, basis: &[K], start: usize, n: usize, cur: &mut Vec<K>, out: &mut Vec<Vec<K>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..basis.len() {
            let next = if self.is_odd(&basis[i]) { i + 1 } else { i };
            cur.push(basis[i].clone());
            self.words_rec(basis, next, n, cur, out);
            cur.pop();
        }
    }

    /// `a ⊙ b` in `S V`.
    pub fn sym_mul(&self, a: &SymVector<K>, b: &SymVector<K>) -> SymVector<K> {
        let mut out = SymVector::new();
        for (wa, ca) in a {
            for (wb, cb) in b {
                let mut w = wa.clone();
                w.extend(wb.iter().cloned());
                if let Some((s, n)) = self.normalize(&w) {
                    add_entry(&mut out, n, ca * cb * Q::from_integer(s.into()));
                }
            }
        }
        out
    }

    /// Embeds a vector as an element of `S¹V`.
    pub fn as_sym(&self, v: &Vector<K>) -> SymVector<K> {
        v.iter().map(|(k, c)| (vec![k.clone()], c.clone())).collect()
    }

    /// `v^{⊙k}`.
    pub fn sym_power(&self, v: &Vector<K>, k: usize) -> SymVector<K> {
        let mut acc: SymVector<K> = [(Vec::new(), Q::one())].into_iter().collect();
        let s = self.as_sym(v);
        for _ in 0..k {
            acc = self.sym_mul(&acc, &s);
        }
        acc
    }

    /// The word `w` as an element of `S V`.
    pub fn word_elem(&self, w: &[K]) -> SymVector<K> {
        let mut out = SymVector::new();
        if let Some((s, n)) = self.normalize(w) {
            out.insert(n, Q::from_integer(s.into()));
        }
        out
    }
}

/// Finite-basis space with keys `0..degrees.len()`.
pub fn finite_space(degrees: Vec<i64>) -> GradedSpace<usize> {
    let basis = (0..degrees.len()).collect();
    let d = Arc::new(degrees);
    GradedSpace::new(basis, Arc::new(move |k: &usize| d[*k]))
}

/// Projection of `S V` onto `S¹V`.
pub fn pr1<K: Key>(x: &SymVector<K>) -> Vector<K> {
    x.iter().filter(|(w, _)| w.len() == 1).map(|(w, c)| (w[0].clone(), c.clone())).collect()
}

/// Wraps a coefficient function with a cache on canonical words.
pub fn memoize<K: Key>(f: CoeffFn<K>) -> CoeffFn<K> {
    let cache: Arc<Mutex<HashMap<Vec<K>, Vector<K>>>> = Arc::new(Mutex::new(HashMap::new()));
    Arc::new(move |w: &[K]| {
        if let Some(v) = cache.lock().expect("cache").get(w) {
            return v.clone();
        }
        let v = f(w);
        cache.lock().expect("cache").insert(w.to_vec(), v.clone());
        v
    })
}

/// A coderivation of `S V` given by its Taylor coefficients `Q_n : SⁿV → V`.
#[derive(Clone)]
pub struct TaylorCoderivation<K: Key> {
    pub space: GradedSpace<K>,
    pub degree: i64,
    /// `Q_0(1)`, stored separately.
    pub curvature: Vector<K>,
    coeff: CoeffFn<K>,
    /// Coefficients vanish identically above this arity.
    pub max_arity: Option<usize>,
    /// Coefficients are only known up to this arity.
    pub defined_up_to: Option<usize>,
}

impl<K: Key> TaylorCoderivation<K> {
    /// `coeff` receives canonical (sorted) words of length ≥ 1.
    pub fn new(space: GradedSpace<K>, degree: i64, curvature: Vector<K>, coeff: CoeffFn<K>, max_arity: Option<usize>) -> Self {
        TaylorCoderivation { space, degree, curvature, coeff, max_arity, defined_up_to: None }
    }

    pub fn zero(space: GradedSpace<K>, degree: i64) -> Self {
        Self::new(space, degree, Vector::new(), Arc::new(|_| Vector::new()), Some(0))
    }

    /// Only `Q_1 = d`.
    pub fn differential(space: GradedSpace<K>, degree: i64, d: CoeffFn<K>) -> Self {
        Self::new(space, degree, Vector::new(), d, Some(1))
    }

    pub fn with_defined_up_to(mut self, n: usize) -> Self {
        self.defined_up_to = Some(n);
        self
    }

    pub fn memoized(mut self) -> Self {
        self.coeff = memoize(self.coeff);
        self
    }

    /// `Q_n` on an arbitrary (unsorted) word.
    pub fn coefficient(&self, word: &[K]) -> Result<Vector<K>, LinftyError> {
        let n = word.len();
        if n == 0 {
            return Ok(self.curvature.clone());
        }
        if let Some(d) = self.defined_up_to {
            if n > d {
                return Err(LinftyError::MissingCoefficient(n));
            }
        }
        if let Some(m) = self.max_arity {
            if n > m {
                return Ok(Vector::new());
            }
        }
        match self.space.normalize(word) {
            None => Ok(Vector::new()),
            Some((s, w)) => Ok(vscale(&(self.coeff)(&w), &Q::from_integer(s.into()))),
        }
    }

    pub fn scaled(&self, c: Q) -> Self {
        let f = self.coeff.clone();
        let c2 = c.clone();
        TaylorCoderivation {
            space: self.space.clone(),
            degree: self.degree,
            curvature: vscale(&self.curvature, &c),
            coeff: Arc::new(move |w| vscale(&f(w), &c2)),
            max_arity: self.max_arity,
            defined_up_to: self.defined_up_to,
        }
    }
}

/// Unshuffle reconstruction `Q(v₁⊙…⊙v_n) = Σ ε(σ;v) Q_i(v_σ(1)…v_σ(i)) ⊙ v_σ(i+1)…`.
pub fn coderivation_apply<K: Key>(q: &TaylorCoderivation<K>, word: &[K]) -> Result<SymVector<K>, LinftyError> {
    let sp = &q.space;
    let n = word.len();
    let degs: Vec<i64> = word.iter().map(|k| sp.degree(k)).collect();
    let mut out = SymVector::new();
    let top = q.max_arity.map_or(n, |m| m.min(n));
    for mask in 0u32..(1u32 << n) {
        let i = mask.count_ones() as usize;
        if i > top {
            continue;
        }
        let sel: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let rest: Vec<usize> = (0..n).filter(|j| mask & (1 << j) == 0).collect();
        let args: Vec<K> = sel.iter().map(|&j| word[j].clone()).collect();
        let val = q.coefficient(&args)?;
        if val.is_empty() {
            continue;
        }
        let perm: Vec<usize> = sel.iter().chain(rest.iter()).cloned().collect();
        let s = Q::from_integer(koszul_sign_unchecked(&perm, &degs).into());
        for (k, c) in val {
            let mut w = vec![k];
            w.extend(rest.iter().map(|&j| word[j].clone()));
            if let Some((s2, nw)) = sp.normalize(&w) {
                add_entry(&mut out, nw, &c * &s * Q::from_integer(s2.into()));
            }
        }
    }
    Ok(out)
}

pub fn coderivation_apply_sym<K: Key>(q: &TaylorCoderivation<K>, x: &SymVector<K>) -> Result<SymVector<K>, LinftyError> {
    let mut out = SymVector::new();
    for (w, c) in x {
        for (w2, c2) in coderivation_apply(q, w)? {
            add_entry(&mut out, w2, c2 * c);
        }
    }
    Ok(out)
}

/// A degree-0 coalgebra morphism `S V → S V` given by Taylor coefficients.
#[derive(Clone)]
pub struct TaylorMorphism<K: Key> {
    pub space: GradedSpace<K>,
    coeff: CoeffFn<K>,
    pub defined_up_to: Option<usize>,
}

impl<K: Key> TaylorMorphism<K> {
    pub fn new(space: GradedSpace<K>, coeff: CoeffFn<K>) -> Self {
        TaylorMorphism { space, coeff, defined_up_to: None }
    }

    pub fn identity(space: GradedSpace<K>) -> Self {
        Self::new(
            space,
            Arc::new(|w: &[K]| {
                if w.len() == 1 {
                    [(w[0].clone(), Q::one())].into_iter().collect()
                } else {
                    Vector::new()
                }
            }),
        )
    }

    pub fn with_defined_up_to(mut self, n: usize) -> Self {
        self.defined_up_to = Some(n);
        self
    }

    pub fn memoized(mut self) -> Self {
        self.coeff = memoize(self.coeff);
        self
    }

    /// `Φ_n` on an arbitrary word.
    pub fn coefficient(&self, word: &[K]) -> Result<Vector<K>, LinftyError> {
        let n = word.len();
        if n == 0 {
            return Ok(Vector::new());
        }
        if let Some(d) = self.defined_up_to {
            if n > d {
                return Err(LinftyError::MissingCoefficient(n));
            }
        }
        match self.space.normalize(word) {
            None => Ok(Vector::new()),
            Some((s, w)) => Ok(vscale(&(self.coeff)(&w), &Q::from_integer(s.into()))),
        }
    }
}

/// Set partitions of `0..n`, blocks ordered by their least element.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(j: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if j == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(j);
            rec(j + 1, n, cur, out);
            cur[b].pop();
        }
        cur.push(vec![j]);
        rec(j + 1, n, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), &mut out);
    out
}

/// Partition-sum reconstruction of a coalgebra morphism on a word.
pub fn morphism_apply<K: Key>(phi: &TaylorMorphism<K>, word: &[K]) -> Result<SymVector<K>, LinftyError> {
    let sp = &phi.space;
    let n = word.len();
    let mut out = SymVector::new();
    if n == 0 {
        out.insert(Vec::new(), Q::one());
        return Ok(out);
    }
    let degs: Vec<i64> = word.iter().map(|k| sp.degree(k)).collect();
    for blocks in set_partitions(n) {
        let perm: Vec<usize> = blocks.iter().flatten().cloned().collect();
        let s = Q::from_integer(koszul_sign_unchecked(&perm, &degs).into());
        let mut acc: SymVector<K> = [(Vec::new(), s)].into_iter().collect();
        for b in &blocks {
            let args: Vec<K> = b.iter().map(|&j| word[j].clone()).collect();
            let v = phi.coefficient(&args)?;
            if v.is_empty() {
                acc.clear();
                break;
            }
            acc = sp.sym_mul(&acc, &sp.as_sym(&v));
        }
        for (w, c) in acc {
            add_entry(&mut out, w, c);
        }
    }
    Ok(out)
}

pub fn morphism_apply_sym<K: Key>(phi: &TaylorMorphism<K>, x: &SymVector<K>) -> Result<SymVector<K>, LinftyError> {
    let mut out = SymVector::new();
    for (w, c) in x {
        for (w2, c2) in morphism_apply(phi, w)? {
            add_entry(&mut out, w2, c2 * c);
        }
    }
    Ok(out)
}

/// `Φ ∘ Ψ` with Taylor coefficients `pr₁ Φ(Ψ(w))`.
pub fn compose<K: Key>(phi: &TaylorMorphism<K>, psi: &TaylorMorphism<K>) -> TaylorMorphism<K> {
    let (phi, psi) = (phi.clone(), psi.clone());
    let space = phi.space.clone();
    TaylorMorphism::new(
        space,
        Arc::new(move |w: &[K]| {
            let inner = morphism_apply(&psi, w).expect("inner morphism");
            pr1(&morphism_apply_sym(&phi, &inner).expect("outer morphism"))
        }),
    )
}

/// A witness list of nonzero residuals.
#[derive(Clone, Debug)]
pub struct ResidualReport<K: Key> {
    pub words_checked: usize,
    pub failures: Vec<(Vec<K>, SymVector<K>)>,
}

impl<K: Key> ResidualReport<K> {
    pub fn is_empty(&self) -> bool {
        self.failures.is_empty()
    }

    /// Smallest arity with a nonzero residual.
    pub fn first_failing_arity(&self) -> Option<usize> {
        self.failures.iter().map(|(w, _)| w.len()).min()
    }
}

/// All canonical basis words of length ≤ `n`.
pub fn words_upto<K: Key>(space: &GradedSpace<K>, n: usize) -> Vec<Vec<K>> {
    (0..=n).flat_map(|k| space.words(k)).collect()
}

/// `Q∘Q` on every basis word of length ≤ `n`.
pub fn check_codifferential<K: Key>(q: &TaylorCoderivation<K>, n: usize) -> Result<ResidualReport<K>, LinftyError> {
    let mut rep = ResidualReport { words_checked: 0, failures: Vec::new() };
    for w in words_upto(&q.space, n) {
        rep.words_checked += 1;
        let once = coderivation_apply(q, &w)?;
        let twice = coderivation_apply_sym(q, &once)?;
        if !twice.is_empty() {
            rep.failures.push((w, twice));
        }
    }
    Ok(rep)
}

/// `Q'∘Φ − Φ∘Q` on every basis word of length ≤ `n`.
pub fn check_morphism<K: Key>(
    phi: &TaylorMorphism<K>,
    q: &TaylorCoderivation<K>,
    q2: &TaylorCoderivation<K>,
    n: usize,
) -> Result<ResidualReport<K>, LinftyError> {
    let mut rep = ResidualReport { words_checked: 0, failures: Vec::new() };
    for w in words_upto(&q.space, n) {
        rep.words_checked += 1;
        let a = coderivation_apply_sym(q2, &morphism_apply(phi, &w)?)?;
        let b = morphism_apply_sym(phi, &coderivation_apply(q, &w)?)?;
        let mut r = a;
        for (k, c) in b {
            add_entry(&mut r, k, -c);
        }
        if !r.is_empty() {
            rep.failures.push((w, r));
        }
    }
    Ok(rep)
}

/// A curved or flat L∞[1] structure.
#[derive(Clone)]
pub struct LInftyStructure<K: Key> {
    pub brackets: TaylorCoderivation<K>,
}

impl<K: Key> LInftyStructure<K> {
    pub fn new(brackets: TaylorCoderivation<K>) -> Self {
        LInftyStructure { brackets }
    }

    pub fn curvature(&self) -> &Vector<K> {
        &self.brackets.curvature
    }

    pub fn is_curved(&self) -> bool {
        !self.brackets.curvature.is_empty()
    }

    /// `m_k` on a word.
    pub fn bracket(&self, word: &[K]) -> Result<Vector<K>, LinftyError> {
        self.brackets.coefficient(word)
    }

    pub fn space(&self) -> &GradedSpace<K> {
        &self.brackets.space
    }
}

/// `m₀ + Σ_k (1/k!) m_k(η,…,η)`.
pub fn mc_residual<K: Key>(l: &LInftyStructure<K>, eta: &Vector<K>) -> Result<Vector<K>, LinftyError> {
    let sp = l.space();
    if eta.keys().any(|k| sp.degree(k) != 0) {
        return Err(LinftyError::DegreeMismatch { expected: 0 });
    }
    let top = l.brackets.max_arity.ok_or(LinftyError::UnboundedArity)?;
    let mut out = l.curvature().clone();
    for k in 1..=top {
        let pw = sp.sym_power(eta, k);
        let f = inv_factorial(k);
        for (w, c) in pw {
            vadd(&mut out, &l.bracket(&w)?, &(c * &f));
        }
    }
    Ok(out)
}

/// A family of multibrackets evaluated on ordered words.
#[derive(Clone)]
pub struct MultiBracket<K: Key> {
    pub degree: DegreeFn<K>,
    pub eval: Arc<dyn Fn(&[K]) -> Vector<K> + Send + Sync>,
}

impl<K: Key> MultiBracket<K> {
    pub fn from_coderivation(q: &TaylorCoderivation<K>) -> Self {
        let q = q.clone();
        MultiBracket { degree: q.space.degree_fn(), eval: Arc::new(move |w| q.coefficient(w).expect("coefficient")) }
    }
}

/// `(−1)^k (−1)^{Σ_i (k−i)|v_i|}` with `|v_i|` the unshifted degrees.
pub fn decalage_sign(unshifted: &[i64]) -> Q {
    let k = unshifted.len() as i64;
    let e: i64 = unshifted.iter().enumerate().map(|(i, d)| (k - (i as i64 + 1)) * d).sum();
    parity_sign(k + e)
}

/// From brackets `𝔪_k` on `V[1]` to brackets `μ_k` on `V` (degrees shift up by one).
pub fn decalage<K: Key>(m: &MultiBracket<K>) -> MultiBracket<K> {
    let d = m.degree.clone();
    let f = m.eval.clone();
    let d2 = d.clone();
    MultiBracket {
        degree: Arc::new(move |k| d2(k) + 1),
        eval: Arc::new(move |w: &[K]| {
            let un: Vec<i64> = w.iter().map(|k| d(k) + 1).collect();
            vscale(&f(w), &decalage_sign(&un))
        }),
    }
}

/// Inverse of [`decalage`].
pub fn decalage_inverse<K: Key>(mu: &MultiBracket<K>) -> MultiBracket<K> {
    let d = mu.degree.clone();
    let f = mu.eval.clone();
    let d2 = d.clone();
    MultiBracket {
        degree: Arc::new(move |k| d2(k) - 1),
        eval: Arc::new(move |w: &[K]| {
            let un: Vec<i64> = w.iter().map(|k| d(k)).collect();
            vscale(&f(w), &decalage_sign(&un))
        }),
    }
}

/// `M` applied `j` times to a word, as an element of `S V`.
fn power_apply<K: Key>(m: &TaylorCoderivation<K>, x: &SymVector<K>, j: usize) -> Result<SymVector<K>, LinftyError> {
    let mut cur = x.clone();
    for _ in 0..j {
        if cur.is_empty() {
            break;
        }
        cur = coderivation_apply_sym(m, &cur)?;
    }
    Ok(cur)
}

/// `e^M` on a word as a linear map of `S V` (series truncated where it vanishes).
pub fn exp_apply<K: Key>(m: &TaylorCoderivation<K>, word: &[K]) -> Result<SymVector<K>, LinftyError> {
    let sp = &m.space;
    let mut out = SymVector::new();
    let mut cur = sp.word_elem(word);
    let mut k = 0usize;
    while !cur.is_empty() {
        let f = inv_factorial(k);
        for (w, c) in &cur {
            add_entry(&mut out, w.clone(), c * &f);
        }
        k += 1;
        if k > word.len() + 1 {
            return Err(LinftyError::NotPronilpotent);
        }
        cur = power_apply(m, &cur, 1)?;
    }
    Ok(out)
}

/// The flow `e^M` as a Taylor morphism, for `M` lowering word length.
pub fn exp_coderivation<K: Key>(m: &TaylorCoderivation<K>, n: usize) -> Result<TaylorMorphism<K>, LinftyError> {
    if !m.curvature.is_empty() {
        return Err(LinftyError::NotPronilpotent);
    }
    for k in &m.space.basis {
        if !m.coefficient(std::slice::from_ref(k))?.is_empty() {
            return Err(LinftyError::NotPronilpotent);
        }
    }
    let m2 = m.clone();
    let space = m.space.clone();
    Ok(TaylorMorphism::new(space, Arc::new(move |w: &[K]| pr1(&exp_apply(&m2, w).expect("flow"))))
        .with_defined_up_to(n)
        .memoized())
}

/// Taylor coefficients of a black-box coderivation: `pr₁ ∘ Q` on words.
pub fn extract_taylor<K: Key>(apply: impl Fn(&[K]) -> SymVector<K>, word: &[K]) -> Vector<K> {
    pr1(&apply(word))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn vec1(k: usize, c: i64) -> Vector<usize> {
        [(k, q(c))].into_iter().collect()
    }

    #[test]
    fn derivation_case() {
        // V = span(e0 deg 0, e1 deg 1), d e0 = e1
        let sp = finite_space(vec![0, 1]);
        let d = TaylorCoderivation::differential(
            sp.clone(),
            1,
            Arc::new(|w: &[usize]| if w == [0] { vec1(1, 1) } else { Vector::new() }),
        );
        let r = coderivation_apply(&d, &[0, 0]).unwrap();
        // d(e0⊙e0) = 2 e1⊙e0 = 2 e0⊙e1
        assert_eq!(r, [(vec![0, 1], q(2))].into_iter().collect());
        assert!(check_codifferential(&d, 4).unwrap().is_empty());
        let z = TaylorCoderivation::zero(sp, 1);
        assert!(coderivation_apply(&z, &[0, 1]).unwrap().is_empty());
    }

    #[test]
    fn d_squared_nonzero_is_caught() {
        let sp = finite_space(vec![0, 1, 2]);
        let d = TaylorCoderivation::differential(
            sp,
            1,
            Arc::new(|w: &[usize]| match w {
                [0] => vec1(1, 1),
                [1] => vec1(2, 1),
                _ => Vector::new(),
            }),
        );
        let rep = check_codifferential(&d, 2).unwrap();
        assert_eq!(rep.first_failing_arity(), Some(1));
    }

    #[test]
    fn morphism_identity_and_arity_two() {
        let sp = finite_space(vec![0, 1, 0]);
        let id = TaylorMorphism::identity(sp.clone());
        for w in words_upto(&sp, 3) {
            assert_eq!(morphism_apply(&id, &w).unwrap(), sp.word_elem(&w));
        }
        // Φ_1 = id, Φ_2(e0⊙e2) = e1... degree must be 0: use Φ_2(e0⊙e0) = e2
        let phi = TaylorMorphism::new(
            sp.clone(),
            Arc::new(|w: &[usize]| match w {
                [k] => vec1(*k, 1),
                [0, 0] => vec1(2, 1),
                _ => Vector::new(),
            }),
        );
        let r = morphism_apply(&phi, &[0, 0]).unwrap();
        let mut e: SymVector<usize> = [(vec![0, 0], q(1))].into_iter().collect();
        e.insert(vec![2], q(1));
        assert_eq!(r, e);
    }

    #[test]
    fn missing_coefficient() {
        let sp = finite_space(vec![0]);
        let phi = TaylorMorphism::identity(sp).with_defined_up_to(1);
        assert_eq!(morphism_apply(&phi, &[0, 0]), Err(LinftyError::MissingCoefficient(2)));
    }

    #[test]
    fn decalage_signs() {
        let sp = finite_space(vec![0, 0]);
        let m = MultiBracket {
            degree: sp.degree_fn(),
            eval: Arc::new(|w: &[usize]| vec1(w[0], 1)),
        };
        let mu = decalage(&m);
        assert_eq!((mu.eval)(&[0]), vec1(0, -1));
        // two shifted-degree-0 elements: unshifted degrees 1,1 → (−1)^2 (−1)^{1} = −1
        assert_eq!((mu.eval)(&[0, 1]), vec1(0, -1));
        let back = decalage_inverse(&mu);
        assert_eq!((back.eval)(&[0, 1]), vec1(0, 1));
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let sp = finite_space(vec![0, -1]);
        let z = TaylorCoderivation::zero(sp.clone(), 0);
        let e = exp_coderivation(&z, 4).unwrap();
        for w in words_upto(&sp, 3) {
            assert_eq!(morphism_apply(&e, &w).unwrap(), sp.word_elem(&w));
        }
        let d = TaylorCoderivation::differential(sp, 0, Arc::new(|w: &[usize]| vec1(w[0], 1)));
        assert!(matches!(exp_coderivation(&d, 3), Err(LinftyError::NotPronilpotent)));
    }
}
