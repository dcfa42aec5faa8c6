//! V-data and higher derived brackets over a graded Lie algebra oracle.

use std::fmt::Debug;
use std::sync::Arc;

use num_traits::One;
use thiserror::Error;

use crate::contact::{jacobi_bracket, project_p, shifted_degree, Section};
use crate::rational::{parity_sign, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VDataError {
    #[error("argument {0} is not in the abelian subalgebra")]
    OutsideSubalgebra(usize),
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
}

/// A graded Lie algebra given as a black box.
pub trait GlaOracle: Clone + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;
    fn bracket(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Degree if homogeneous.
    fn degree(&self, a: &Self::Elem) -> Option<i64>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, c: &Q) -> Self::Elem;
}

/// The contact-model oracle: sections of `𝓛` with the Jacobi bracket, graded by `|s| − 2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ContactOracle;

impl GlaOracle for ContactOracle {
    type Elem = Section;
    fn bracket(&self, a: &Section, b: &Section) -> Section {
        jacobi_bracket(a, b)
    }
    fn degree(&self, a: &Section) -> Option<i64> {
        shifted_degree(a)
    }
    fn is_zero(&self, a: &Section) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Section, b: &Section) -> Section {
        a + b
    }
    fn scale(&self, a: &Section, c: &Q) -> Section {
        a.scale(c)
    }
}

pub type Predicate<E> = Arc<dyn Fn(&E) -> bool + Send + Sync>;
pub type Projection<E> = Arc<dyn Fn(&E) -> E + Send + Sync>;

/// `(𝔥, 𝔞, P, Φ)`.
#[derive(Clone)]
pub struct VData<O: GlaOracle> {
    pub oracle: O,
    pub in_subalgebra: Predicate<O::Elem>,
    pub projection: Projection<O::Elem>,
    pub phi: O::Elem,
}

impl<O: GlaOracle> VData<O> {
    pub fn project(&self, a: &O::Elem) -> O::Elem {
        (self.projection)(a)
    }

    pub fn is_curved(&self) -> bool {
        !self.oracle.is_zero(&self.project(&self.phi))
    }

    pub fn with_phi(&self, phi: O::Elem) -> Self {
        VData { oracle: self.oracle.clone(), in_subalgebra: self.in_subalgebra.clone(), projection: self.projection.clone(), phi }
    }
}

/// V-data of the contact model: `𝔞 = Γ(𝓛)^{(0,•)}`, `P` = restriction to the zero section, `Φ = −Θ`.
pub fn contact_vdata(theta: &Section) -> VData<ContactOracle> {
    VData {
        oracle: ContactOracle,
        in_subalgebra: Arc::new(|s: &Section| project_p(s) == *s),
        projection: Arc::new(project_p),
        phi: theta.scale(&-Q::one()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
    pub curved: bool,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Sample elements of `𝔥` and of the abelian subalgebra.
#[derive(Clone, Debug)]
pub struct VDataSamples<E> {
    pub h: Vec<E>,
    pub a: Vec<E>,
}

fn record<E: Debug>(checks: &mut Vec<AxiomCheck>, name: &'static str, witness: Option<E>) {
    checks.push(AxiomCheck { name, passed: witness.is_none(), witness: witness.map(|w| format!("{w:?}")) });
}

/// Sample-checks every V-data axiom and the oracle's graded Lie identities.
pub fn validate<O: GlaOracle>(v: &VData<O>, samples: &VDataSamples<O::Elem>) -> ValidationReport {
    let o = &v.oracle;
    let mut checks = Vec::new();

    let w = samples.h.iter().find(|h| {
        let p = v.project(h);
        v.project(&p) != p
    });
    record(&mut checks, "projection_idempotent", w);

    let w = samples.h.iter().find(|h| !(v.in_subalgebra)(&v.project(h)));
    record(&mut checks, "projection_image_in_subalgebra", w);

    let mut wit = None;
    'ab: for a in &samples.a {
        for b in &samples.a {
            let r = o.bracket(a, b);
            if !o.is_zero(&r) {
                wit = Some(r);
                break 'ab;
            }
        }
    }
    record(&mut checks, "subalgebra_abelian", wit);

    let kers: Vec<O::Elem> = samples.h.iter().map(|h| o.add(h, &o.scale(&v.project(h), &-Q::one()))).collect();
    let mut wit = None;
    'k: for a in &kers {
        for b in &kers {
            let r = v.project(&o.bracket(a, b));
            if !o.is_zero(&r) {
                wit = Some(r);
                break 'k;
            }
        }
    }
    record(&mut checks, "kernel_is_subalgebra", wit);

    let pp = o.bracket(&v.phi, &v.phi);
    record(&mut checks, "phi_maurer_cartan", (!o.is_zero(&pp)).then_some(pp));

    let mut wit = None;
    let hs: Vec<&O::Elem> = samples.h.iter().take(6).collect();
    'j: for a in &hs {
        for b in &hs {
            let (Some(da), Some(db)) = (o.degree(a), o.degree(b)) else { continue };
            let s = parity_sign(da * db);
            let anti = o.add(&o.bracket(a, b), &o.scale(&o.bracket(b, a), &s));
            if !o.is_zero(&anti) {
                wit = Some(anti);
                break 'j;
            }
            for c in &hs {
                let lhs = o.bracket(a, &o.bracket(b, c));
                let rhs = o.add(&o.bracket(&o.bracket(a, b), c), &o.scale(&o.bracket(b, &o.bracket(a, c)), &s));
                let r = o.add(&lhs, &o.scale(&rhs, &-Q::one()));
                if !o.is_zero(&r) {
                    wit = Some(r);
                    break 'j;
                }
            }
        }
    }
    record(&mut checks, "oracle_graded_lie", wit);

    ValidationReport { checks, curved: v.is_curved() }
}

/// `P[…[Φ, a₁], …, a_k]`; for `k = 0` this is the curvature `P(Φ)`.
pub fn higher_derived_bracket<O: GlaOracle>(v: &VData<O>, k: usize, args: &[O::Elem]) -> Result<O::Elem, VDataError> {
    if args.len() != k {
        return Err(VDataError::Arity { expected: k, got: args.len() });
    }
    if let Some(i) = args.iter().position(|a| !(v.in_subalgebra)(a)) {
        return Err(VDataError::OutsideSubalgebra(i));
    }
    let mut acc = v.phi.clone();
    for a in args {
        acc = v.oracle.bracket(&acc, a);
    }
    Ok(v.project(&acc))
}
