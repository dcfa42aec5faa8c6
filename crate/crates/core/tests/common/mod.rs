#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use cjde_core::gca::{Context, GradedPoly};
use cjde_core::instance::{load_instance, LoadedInstance};
use cjde_core::random::{random_poly, TestRng};

pub fn fixture(name: &str) -> LoadedInstance {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    load_instance(&p).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn nonzero_poly(ctx: &Arc<Context>, r: &mut TestRng, deg: u32) -> GradedPoly {
    for _ in 0..20 {
        let p = random_poly(ctx, r, deg, 3);
        if !p.is_zero() {
            return p;
        }
    }
    random_poly(ctx, r, deg, 3)
}
