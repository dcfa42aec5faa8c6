//! Fixture files are regenerated by `cargo test --test fixtures -- --ignored` and must match the
//! seeded searches byte for byte.

use std::path::PathBuf;

use cjde_core::cjalg::fixtures::{heis2, heis2_broken, omni1};
use cjde_core::cjalg::{BasePoly, DeformationAlgebra, DeformationForm};
use cjde_core::deform::{mc_residual_closed, search_dgla, search_full, search_obstructed, small_mc_solutions};
use cjde_core::instance::{to_json, LoadedInstance};

pub const OBST1_SEED: u64 = 1;
pub const DGLA1_SEED: u64 = 0;
pub const DEF1_SEED: u64 = 0;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn named(name: &str, inst: cjde_core::cjalg::SplitCJInstance) -> LoadedInstance {
    let mut l = LoadedInstance::new(inst);
    l.name = Some(name.to_string());
    l
}

fn generate() -> Vec<(&'static str, String)> {
    let mut out = Vec::new();

    let mut h = named("HEIS2", heis2());
    let mut e12 = DeformationForm::zero(2);
    e12.set(0, 1, BasePoly::int(0, 1));
    h.deformations.insert("e12".into(), e12);
    let mut eps = vec![vec![BasePoly::zero(); 2]; 2];
    eps[0][1] = BasePoly::int(0, 1);
    eps[1][0] = BasePoly::int(0, -1);
    h.epsilons.insert("eps1".into(), eps);
    h.epsilons.insert("zero".into(), vec![vec![BasePoly::zero(); 2]; 2]);
    out.push(("heis2.json", to_json(&h)));

    out.push(("heis2-broken.json", to_json(&named("HEIS2-broken", heis2_broken()))));

    let mut o = named("OMNI1", omni1());
    let mut eta = DeformationForm::zero(2);
    eta.set(0, 1, BasePoly::x(1, 0));
    o.deformations.insert("x_e12".into(), eta);
    out.push(("omni1.json", to_json(&o)));

    let hit = search_obstructed(OBST1_SEED, 1000).expect("OBST1 search");
    let mut ob = named(&format!("OBST1 (search_obstructed seed {OBST1_SEED}, attempt {})", hit.attempts), hit.instance);
    ob.deformations.insert("eta1".into(), hit.eta);
    out.push(("obst1.json", to_json(&ob)));

    let hit = search_dgla(DGLA1_SEED, 100_000).expect("dgLa search");
    let mut dg = named(&format!("DGLA1 (search_dgla seed {DGLA1_SEED}, attempt {})", hit.attempts), hit.instance);
    dg.deformations.insert("eta1".into(), hit.eta);
    out.push(("dgla1.json", to_json(&dg)));

    let (inst, attempts) = search_full(DEF1_SEED, 100_000).expect("DEF1 search");
    let da = DeformationAlgebra::new(&inst).unwrap();
    let sols = small_mc_solutions(&inst, 1).unwrap();
    let mut d = named(&format!("DEF1 (search_full seed {DEF1_SEED}, attempt {attempts})"), inst.clone());
    for (i, s) in sols.iter().filter(|s| s.comps.iter().flatten().any(|p| !p.is_zero())).take(2).enumerate() {
        d.deformations.insert(format!("mc{}", i + 1), s.clone());
    }
    let mut bad = DeformationForm::zero(3);
    bad.set(0, 1, BasePoly::int(0, 1));
    bad.set(0, 2, BasePoly::int(0, 1));
    bad.set(1, 2, BasePoly::int(0, 1));
    if mc_residual_closed(&da, &bad.to_section(&inst.ctx())).is_zero() {
        bad.set(1, 2, BasePoly::int(0, 2));
    }
    d.deformations.insert("bad1".into(), bad);
    let mut eps = vec![vec![BasePoly::zero(); 3]; 3];
    for (a, b, v) in [(0, 1, 1), (0, 2, -1), (1, 2, 2)] {
        eps[a][b] = BasePoly::int(0, v);
        eps[b][a] = BasePoly::int(0, -v);
    }
    d.epsilons.insert("eps1".into(), eps);
    out.push(("def1.json", to_json(&d)));
    out
}

#[test]
#[ignore]
fn regenerate_fixtures() {
    std::fs::create_dir_all(dir()).unwrap();
    for (name, text) in generate() {
        std::fs::write(dir().join(name), text).unwrap();
    }
}

#[test]
fn fixture_files_match_generators() {
    for (name, text) in generate() {
        let on_disk = std::fs::read_to_string(dir().join(name)).unwrap_or_default();
        assert_eq!(on_disk, text, "{name} is stale; regenerate with --ignored");
    }
}
