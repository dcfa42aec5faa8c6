//! JSON instance files.
//!
//! Polynomials are maps from exponent vectors (written `"[1,0]"`, `"[]"` on a point base) to
//! rationals written `"num/den"`. A bare rational string is accepted as a constant.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cjalg::{BasePoly, CjError, DeformationForm, SplitCJInstance};
use crate::rational::{parse_q, Q};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("schema violation: {0}")]
    Structure(#[from] CjError),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PolyJson {
    Constant(String),
    Map(BTreeMap<String, String>),
}

type P1 = Vec<PolyJson>;
type P2 = Vec<Vec<PolyJson>>;
type P3 = Vec<Vec<Vec<PolyJson>>>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub m: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<P2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<P3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<P1>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_dual: Option<P2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_dual: Option<P3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_dual: Option<P1>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upsilon: Option<P3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upsilon_dual: Option<P3>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub deformations: BTreeMap<String, P2>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub epsilons: BTreeMap<String, P2>,
}

/// A loaded instance with its named extras.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedInstance {
    pub name: Option<String>,
    pub instance: SplitCJInstance,
    pub deformations: BTreeMap<String, DeformationForm>,
    pub epsilons: BTreeMap<String, Vec<Vec<BasePoly>>>,
}

fn fmt_exact(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn parse_exps(key: &str, m: usize) -> Result<Vec<u32>, InstanceError> {
    let e: Vec<u32> = serde_json::from_str(key).map_err(|_| InstanceError::Schema(format!("bad exponent vector {key:?}")))?;
    if e.len() != m {
        return Err(InstanceError::Schema(format!("exponent vector {key:?} has length {} instead of {m}", e.len())));
    }
    Ok(e)
}

fn parse_rational(s: &str) -> Result<Q, InstanceError> {
    parse_q(s).ok_or_else(|| InstanceError::Schema(format!("bad rational {s:?}")))
}

fn poly_from_json(p: &PolyJson, m: usize) -> Result<BasePoly, InstanceError> {
    let mut out = BasePoly::zero();
    match p {
        PolyJson::Constant(s) => out.add_term(vec![0; m], parse_rational(s)?),
        PolyJson::Map(map) => {
            for (k, v) in map {
                out.add_term(parse_exps(k, m)?, parse_rational(v)?);
            }
        }
    }
    Ok(out)
}

fn poly_to_json(p: &BasePoly) -> PolyJson {
    PolyJson::Map(p.0.iter().map(|(e, c)| (serde_json::to_string(e).expect("exponents"), fmt_exact(c))).collect())
}

fn shape_err(what: &str) -> InstanceError {
    InstanceError::Schema(format!("{what} has the wrong shape"))
}

fn load1(v: &Option<P1>, len: usize, m: usize, what: &str) -> Result<Vec<BasePoly>, InstanceError> {
    match v {
        None => Ok(vec![BasePoly::zero(); len]),
        Some(v) if v.len() == len => v.iter().map(|p| poly_from_json(p, m)).collect(),
        _ => Err(shape_err(what)),
    }
}

fn load2(v: &Option<P2>, r: usize, c: usize, m: usize, what: &str) -> Result<Vec<Vec<BasePoly>>, InstanceError> {
    match v {
        None => Ok(vec![vec![BasePoly::zero(); c]; r]),
        Some(v) if v.len() == r => v.iter().map(|row| load1(&Some(row.clone()), c, m, what)).collect(),
        _ => Err(shape_err(what)),
    }
}

fn load3(v: &Option<P3>, n: usize, m: usize, what: &str) -> Result<Vec<Vec<Vec<BasePoly>>>, InstanceError> {
    match v {
        None => Ok(vec![vec![vec![BasePoly::zero(); n]; n]; n]),
        Some(v) if v.len() == n => v.iter().map(|s| load2(&Some(s.clone()), n, n, m, what)).collect(),
        _ => Err(shape_err(what)),
    }
}

fn skew_check(t: &[Vec<BasePoly>], what: &str) -> Result<(), InstanceError> {
    for (a, row) in t.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            if *v != t[b][a].neg() {
                return Err(InstanceError::Schema(format!("{what}[{a}][{b}] is not skew")));
            }
        }
    }
    Ok(())
}

fn is_zero1(v: &[BasePoly]) -> bool {
    v.iter().all(|p| p.is_zero())
}

fn save1(v: &[BasePoly]) -> Option<P1> {
    (!is_zero1(v)).then(|| v.iter().map(poly_to_json).collect())
}

fn save2(v: &[Vec<BasePoly>]) -> Option<P2> {
    (!v.iter().all(|r| is_zero1(r))).then(|| v.iter().map(|r| r.iter().map(poly_to_json).collect()).collect())
}

fn save3(v: &[Vec<Vec<BasePoly>>]) -> Option<P3> {
    (!v.iter().flatten().all(|r| is_zero1(r))).then(|| v.iter().map(|s| s.iter().map(|r| r.iter().map(poly_to_json).collect()).collect()).collect())
}

impl InstanceFile {
    pub fn to_loaded(&self) -> Result<LoadedInstance, InstanceError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(InstanceError::Schema(format!("unsupported schema_version {}", self.schema_version)));
        }
        let (m, n) = (self.m, self.n);
        let instance = SplitCJInstance {
            m,
            n,
            rho: load2(&self.rho, m, n, m, "rho")?,
            c: load3(&self.c, n, m, "c")?,
            lam: load1(&self.lambda, n, m, "lambda")?,
            rho_dual: load2(&self.rho_dual, m, n, m, "rho_dual")?,
            c_dual: load3(&self.c_dual, n, m, "c_dual")?,
            lam_dual: load1(&self.lambda_dual, n, m, "lambda_dual")?,
            phi: load3(&self.upsilon, n, m, "upsilon")?,
            psi: load3(&self.upsilon_dual, n, m, "upsilon_dual")?,
        };
        instance.validate()?;
        let mut deformations = BTreeMap::new();
        for (k, v) in &self.deformations {
            let comps = load2(&Some(v.clone()), n, n, m, k)?;
            skew_check(&comps, k)?;
            deformations.insert(k.clone(), DeformationForm { n, comps });
        }
        let mut epsilons = BTreeMap::new();
        for (k, v) in &self.epsilons {
            let comps = load2(&Some(v.clone()), n, n, m, k)?;
            skew_check(&comps, k)?;
            epsilons.insert(k.clone(), comps);
        }
        Ok(LoadedInstance { name: self.name.clone(), instance, deformations, epsilons })
    }

    pub fn from_loaded(l: &LoadedInstance) -> Self {
        let i = &l.instance;
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            name: l.name.clone(),
            m: i.m,
            n: i.n,
            rho: save2(&i.rho),
            c: save3(&i.c),
            lambda: save1(&i.lam),
            rho_dual: save2(&i.rho_dual),
            c_dual: save3(&i.c_dual),
            lambda_dual: save1(&i.lam_dual),
            upsilon: save3(&i.phi),
            upsilon_dual: save3(&i.psi),
            deformations: l.deformations.iter().map(|(k, v)| (k.clone(), save2(&v.comps).unwrap_or_else(|| zero_json(i.n)))).collect(),
            epsilons: l.epsilons.iter().map(|(k, v)| (k.clone(), save2(v).unwrap_or_else(|| zero_json(i.n)))).collect(),
        }
    }
}

fn zero_json(n: usize) -> P2 {
    vec![vec![PolyJson::Map(BTreeMap::new()); n]; n]
}

impl LoadedInstance {
    pub fn new(instance: SplitCJInstance) -> Self {
        LoadedInstance { name: None, instance, deformations: BTreeMap::new(), epsilons: BTreeMap::new() }
    }
}

pub fn parse_instance(text: &str) -> Result<LoadedInstance, InstanceError> {
    let f: InstanceFile = serde_json::from_str(text)?;
    f.to_loaded()
}

pub fn load_instance(path: &Path) -> Result<LoadedInstance, InstanceError> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn to_json(l: &LoadedInstance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_loaded(l)).expect("serializable") + "\n"
}

pub fn save_instance(l: &LoadedInstance, path: &Path) -> Result<(), InstanceError> {
    std::fs::write(path, to_json(l))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cjalg::fixtures::omni1;

    #[test]
    fn roundtrip() {
        let mut l = LoadedInstance::new(omni1());
        l.instance.set_c_dual(0, 0, 1, BasePoly::x(1, 0));
        let mut eta = DeformationForm::zero(2);
        eta.set(0, 1, BasePoly::int(1, 3));
        l.deformations.insert("e12".into(), eta);
        l.epsilons.insert("zero".into(), vec![vec![BasePoly::zero(); 2]; 2]);
        assert_eq!(parse_instance(&to_json(&l)).unwrap(), l);
    }

    #[test]
    fn shorthand_and_errors() {
        let l = parse_instance(r#"{"schema_version":1,"m":0,"n":2,"lambda":["1",{}]}"#).unwrap();
        assert_eq!(l.instance, crate::cjalg::fixtures::heis2());
        assert!(matches!(parse_instance("{"), Err(InstanceError::Parse(_))));
        assert!(matches!(
            parse_instance(r#"{"schema_version":1,"m":0,"n":2,"lambda":["1"]}"#),
            Err(InstanceError::Schema(_))
        ));
        let bad = r#"{"schema_version":1,"m":0,"n":2,"c":[[["0","1"],["1","0"]],[["0","0"],["0","0"]]]}"#;
        assert!(matches!(parse_instance(bad), Err(InstanceError::Structure(CjError::NotSkew(_)))));
        assert!(parse_instance(r#"{"schema_version":1,"m":0,"n":1,"lambda":["1/0"]}"#).is_err());
    }
}
