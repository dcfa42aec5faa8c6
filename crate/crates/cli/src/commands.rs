use std::sync::Arc;

use cjde_core::cjalg::fixtures::{heis2, omni1};
use cjde_core::cjalg::*;
use cjde_core::contact::{hamiltonian_lift, jacobi_bracket, Section};
use cjde_core::deform::*;
use cjde_core::gca::{Context, GradedPoly, Monomial};
use cjde_core::instance::LoadedInstance;
use cjde_core::linfty::{check_morphism, SymVector, TaylorMorphism, Vector};
use cjde_core::random::*;
use cjde_core::rational::{fmt_q, parity_sign};
use cjde_core::Q;
use num_traits::One;
use rand::Rng;
use serde_json::{json, Value};

use crate::report::Report;

#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn s(p: &GradedPoly) -> Value {
    p.to_string().into()
}

fn qs(v: &[Q]) -> Value {
    v.iter().map(fmt_q).collect::<Vec<_>>().into()
}

fn nonzero(p: &GradedPoly) -> Option<String> {
    (!p.is_zero()).then(|| p.to_string())
}

fn fmt_word(ctx: &Arc<Context>, w: &[Monomial]) -> String {
    let parts: Vec<String> = w.iter().map(|m| GradedPoly::term(ctx, m.clone(), Q::one()).to_string()).collect();
    format!("({})", parts.join(" . "))
}

/// A residual in `S V`, terms in canonical word order.
fn fmt_sym(ctx: &Arc<Context>, v: &SymVector<Monomial>) -> String {
    let parts: Vec<String> = v.iter().map(|(w, c)| format!("{}*{}", fmt_q(c), fmt_word(ctx, w))).collect();
    parts.join(" + ")
}

fn x_cutoff(inst: &SplitCJInstance) -> u32 {
    u32::from(inst.m > 0)
}

pub fn check(l: &LoadedInstance, r: &mut Report) {
    let inst = &l.instance;
    let mut fields = vec![("m", json!(inst.m)), ("n", json!(inst.n))];
    if let Some(name) = &l.name {
        fields.push(("name", name.clone().into()));
    }
    r.pass("schema", fields);
    let rep = check_cj_axioms(inst, false).expect("validated on load");
    r.verdict("maurer_cartan", nonzero(&rep.mc_residual), vec![]);
    let first = |v: &[(String, Section)]| v.first().map(|(k, p)| format!("{k}: {p}"));
    r.verdict(
        "jacobi_identity",
        first(&rep.jacobi_residuals),
        vec![("triples", json!(rep.triples_checked)), ("failures", json!(rep.jacobi_residuals.len()))],
    );
    r.verdict("flatness", first(&rep.flatness_residuals), vec![("failures", json!(rep.flatness_residuals.len()))]);
    let bic = (!rep.biconditional_holds()).then(|| format!("mc_holds={} axioms_hold={}", rep.mc_holds(), rep.direct_hold()));
    r.verdict("mc_iff_axioms", bic, vec![]);
}

pub enum EtaSource {
    Named(String),
    Random(u64),
}

fn random_eta(inst: &SplitCJInstance, seed: u64) -> DeformationForm {
    let mut g = rng(seed);
    let mut eta = DeformationForm::zero(inst.n);
    for a in 0..inst.n {
        for b in (a + 1)..inst.n {
            eta.set(a, b, random_base(&mut g, inst.m, 1));
        }
    }
    eta
}

pub fn deform(l: &LoadedInstance, src: EtaSource, order: usize, r: &mut Report) -> Result<(), InputError> {
    let inst = &l.instance;
    let ctx = inst.ctx();
    let (form, label) = match src {
        EtaSource::Named(n) => {
            let f = l.deformations.get(&n).ok_or_else(|| InputError(format!("unknown deformation {n:?}")))?;
            (f.clone(), n)
        }
        EtaSource::Random(seed) => (random_eta(inst, seed), format!("random:{seed}")),
    };
    let eta = form.to_section(&ctx);
    r.pass("deformation", vec![("eta", s(&eta)), ("source", label.into())]);
    let da = DeformationAlgebra::new(inst).expect("validated on load");
    let closed = mc_residual_closed(&da, &eta);
    let derived = mc_residual_derived(&da, &eta);
    r.verdict("maurer_cartan", nonzero(&closed), vec![]);
    r.verdict("mc_closed_vs_derived", nonzero(&(&closed - &derived)), vec![]);
    let (dj, witness) = is_dirac_jacobi(&da.theta, &graph(&eta)).expect("graphs are Lagrangian");
    let witness = witness.map(|((a, b, c), v)| format!("T({a},{b},{c}) = {v}"));
    r.verdict("graph_dirac_jacobi", witness, vec![]);
    let agree = closed.is_zero() == dj;
    r.verdict(
        "mc_iff_dirac_jacobi",
        (!agree).then(|| format!("mc_residual={closed} dirac_jacobi={dj}")),
        vec![],
    );

    if inst.m > 0 {
        r.unsupported("kuranishi", "cohomology needs a point base");
        r.unsupported("extension", "cohomology needs a point base");
        return Ok(());
    }
    let d_eta = da.closed(std::slice::from_ref(&eta));
    r.verdict("cocycle", nonzero(&d_eta), vec![]);
    match kuranishi(inst, &eta) {
        Ok(k) => {
            let w = (!k.is_zero()).then(|| k.representative.to_string());
            r.verdict("kuranishi", w, vec![("class", qs(&k.coords))]);
        }
        Err(e) => {
            r.unsupported("kuranishi", &e.to_string());
            r.unsupported("extension", &e.to_string());
            return Ok(());
        }
    }
    let curve = extend_mc(inst, &eta, order).expect("closed, flat, uncurved");
    match &curve.obstruction {
        Some(ob) => r.fail(
            "extension",
            &ob.residual,
            vec![("obstructed_at", json!(ob.order)), ("class", qs(&ob.coords))],
        ),
        None => {
            let series = mc_residual_series(inst, &curve.coeffs).expect("same setting");
            let bad = series.iter().take(order + 1).position(|c| !c.is_zero());
            let coeffs: Vec<Value> = curve.coeffs.iter().map(s).collect();
            r.verdict(
                "extension",
                bad.map(|k| format!("t^{k}: {}", series[k])),
                vec![("order", json!(order)), ("coefficients", coeffs.into())],
            );
        }
    }
    Ok(())
}

pub fn complement(l: &LoadedInstance, name: &str, trunc: usize, corrupt_m2: bool, r: &mut Report) -> Result<(), InputError> {
    let inst = &l.instance;
    let eps = l.epsilons.get(name).ok_or_else(|| InputError(format!("unknown epsilon {name:?}")))?;
    let ch = change_complement(inst, eps, x_cutoff(inst), trunc).map_err(|e| InputError(e.to_string()))?;
    let transported = transported_instance(inst, eps).map_err(|e| InputError(e.to_string()))?;
    let rebuilt = build_theta(&transported).expect("transported instance is valid");
    r.verdict(
        "transported_theta",
        nonzero(&(&rebuilt - &ch.theta1)),
        vec![("theta0", s(&ch.theta0)), ("theta1", s(&ch.theta1))],
    );

    let mut phi = ch.exp_m.clone();
    if corrupt_m2 {
        let orig = ch.exp_m.clone();
        let sp = ch.space.clone();
        let hit = sp.words(2).into_iter().find_map(|w| {
            let d = sp.word_degree(&w);
            sp.basis.iter().find(|b| sp.degree(b) == d).map(|b| (w, b.clone()))
        });
        let (target, bump) = hit.map_or((None, None), |(w, b)| (Some(w), Some(b)));
        phi = TaylorMorphism::new(
            ch.space.clone(),
            Arc::new(move |w: &[Monomial]| {
                let mut v: Vector<Monomial> = orig.coefficient(w).expect("within truncation");
                if Some(w) == target.as_deref() {
                    if let Some(b) = &bump {
                        *v.entry(b.clone()).or_default() += Q::one();
                    }
                }
                v
            }),
        )
        .with_defined_up_to(trunc);
    }
    let q0 = DeformationAlgebra::new(inst).expect("validated on load").linfty(x_cutoff(inst)).brackets;
    let q1 = DeformationAlgebra::from_theta(&transported, ch.theta1.clone()).linfty(x_cutoff(inst)).brackets;
    let rep = check_morphism(&phi, &q0, &q1, trunc).map_err(|e| InputError(e.to_string()))?;
    let ctx = inst.ctx();
    let witness = rep.failures.first().map(|(w, v)| format!("{}: {}", fmt_word(&ctx, w), fmt_sym(&ctx, v)));
    r.verdict(
        "morphism",
        witness,
        vec![("trunc", json!(trunc)), ("words", json!(rep.words_checked)), ("failures", json!(rep.failures.len()))],
    );

    let sec = |k: &Monomial| GradedPoly::term(&ctx, k.clone(), Q::one());
    let mut bad = None;
    'outer: for a in &ch.space.basis {
        for b in &ch.space.basis {
            let derived = m_k_sections(&ch.eps_section, &[sec(a), sec(b)]);
            let closed = m2_closed(inst, eps, &sec(a), &sec(b));
            if derived != closed {
                bad = Some(format!("M2({}, {}): {}", sec(a), sec(b), &derived - &closed));
                break 'outer;
            }
        }
    }
    r.verdict("m2_closed_form", bad, vec![]);
    Ok(())
}

pub fn cohomology_cmd(l: &LoadedInstance, degree: Option<usize>, r: &mut Report) -> Result<(), InputError> {
    let inst = &l.instance;
    if inst.m > 0 {
        return Err(InputError("cohomology needs a point base (m = 0)".into()));
    }
    let cm = ComplexMatrices::new(inst).map_err(|e| InputError(e.to_string()))?;
    if let Err(e) = cm.check_flat() {
        r.fail("flatness", e, vec![]);
        return Ok(());
    }
    r.pass("flatness", vec![]);
    let degrees: Vec<usize> = match degree {
        Some(k) if k > inst.n => return Err(InputError(format!("degree {k} exceeds rank {}", inst.n))),
        Some(k) => vec![k],
        None => (0..=inst.n).collect(),
    };
    let ctx = inst.ctx();
    for k in degrees {
        let h = cohomology_of(&cm, k).map_err(|e| InputError(e.to_string()))?;
        let reps: Vec<Value> = h.representatives.iter().map(|v| s(&vec_to_form(&ctx, v, k))).collect();
        r.pass(
            &format!("H^{k}"),
            vec![
                ("dim", json!(h.dim)),
                ("cocycles", json!(h.cocycle_dim)),
                ("coboundaries", json!(h.coboundary_dim)),
                ("representatives", reps.into()),
            ],
        );
    }
    Ok(())
}

pub fn selftest(seed: u64, r: &mut Report) {
    let mut g = rng(seed);

    let mut bad = None;
    for _ in 0..50 {
        let ctx = Context::contact(g.gen_range(0..=2), g.gen_range(1..=3));
        let ds: Vec<u32> = (0..3).map(|_| g.gen_range(0..=4)).collect();
        let [a, b, c] = [0, 1, 2].map(|i| random_poly(&ctx, &mut g, ds[i], 3));
        let sg = parity_sign((ds[0] as i64 - 2) * (ds[1] as i64 - 2));
        let mut res = jacobi_bracket(&a, &jacobi_bracket(&b, &c));
        res.add_scaled(&jacobi_bracket(&jacobi_bracket(&a, &b), &c), &-Q::one());
        res.add_scaled(&jacobi_bracket(&b, &jacobi_bracket(&a, &c)), &-sg);
        if bad.is_none() {
            bad = nonzero(&res);
        }
    }
    r.verdict("jacobi_identity", bad, vec![("samples", json!(50))]);

    let mut bad = None;
    for _ in 0..30 {
        let ctx = Context::contact(g.gen_range(0..=2), g.gen_range(1..=3));
        let (k1, k2) = (g.gen_range(-1..=2), g.gen_range(-1..=2));
        let d1 = random_line_derivation(&ctx, &mut g, k1);
        let d2 = random_line_derivation(&ctx, &mut g, k2);
        let (h1, h2) = (hamiltonian_lift(&d1).expect("lift"), hamiltonian_lift(&d2).expect("lift"));
        let res = &jacobi_bracket(&h1, &h2) + &hamiltonian_lift(&d1.commutator(&d2)).expect("lift");
        if bad.is_none() {
            bad = nonzero(&res);
        }
    }
    r.verdict("hamiltonian_lift", bad, vec![("samples", json!(30))]);

    let mut bad = None;
    let mut instances = vec![heis2(), omni1()];
    for _ in 0..10 {
        let (m, n) = (g.gen_range(0..=1), g.gen_range(2..=3));
        instances.push(random_instance(&mut g, m, n, 1));
    }
    for (i, inst) in instances.iter().enumerate() {
        let rep = check_cj_axioms(inst, true).expect("valid instance");
        if (i < 2 && !rep.all_pass()) || !rep.biconditional_holds() {
            bad.get_or_insert(format!("instance {i}: mc_holds={} axioms_hold={}", rep.mc_holds(), rep.direct_hold()));
        }
    }
    r.verdict("mc_iff_axioms", bad, vec![("instances", json!(instances.len()))]);

    let mut bad = None;
    for inst in &instances[..4] {
        let da = DeformationAlgebra::new(inst).expect("valid instance");
        let ctx = inst.ctx();
        for _ in 0..5 {
            let f: Vec<Section> = (0..3)
                .map(|_| {
                    let k = g.gen_range(0..=inst.n);
                    random_form(&ctx, &mut g, k, 1)
                })
                .collect();
            for k in 0..=3 {
                let diff = &da.derived(&f[..k]) - &da.closed(&f[..k]);
                if bad.is_none() {
                    bad = nonzero(&diff).map(|w| format!("arity {k}: {w}"));
                }
            }
        }
    }
    r.verdict("derived_vs_closed", bad, vec![]);

    let inst = heis2();
    let mut eps = vec![vec![BasePoly::zero(); 2]; 2];
    let v = g.gen_range(1..=3);
    eps[0][1] = BasePoly::int(0, v);
    eps[1][0] = BasePoly::int(0, -v);
    let ch = change_complement(&inst, &eps, 0, 4).expect("valid epsilon");
    let t = transported_instance(&inst, &eps).expect("valid epsilon");
    let q0 = DeformationAlgebra::new(&inst).expect("valid").linfty(0).brackets;
    let q1 = DeformationAlgebra::from_theta(&t, ch.theta1.clone()).linfty(0).brackets;
    let rep = check_morphism(&ch.exp_m, &q0, &q1, 4).expect("within truncation");
    let ctx = inst.ctx();
    let w = rep.failures.first().map(|(w, v)| format!("{}: {}", fmt_word(&ctx, w), fmt_sym(&ctx, v)));
    r.verdict("complement_morphism", w, vec![("words", json!(rep.words_checked))]);
}
