//! One-time derivation of the golden graph fixtures: line complexes
//! computed straight from the defining functions by path lifting, then
//! truncated to balls and stored as SPG files. The family generators
//! are required (and tested) to reproduce these bytes combinatorially.
//!
//! Run from the workspace root:
//!   cargo run -p speiser-core --example gen_fixtures

use num_complex::Complex64;
use speiser_core::analytic::CatalogFunction;
use speiser_core::graph::spg::write_spg_file;
use speiser_core::graph::{ball_of_patch, validate};
use speiser_core::lifting::{graph_from_function, Rect};

fn main() {
    let out = std::path::Path::new("fixtures");
    std::fs::create_dir_all(out).expect("create fixtures dir");

    // a (e^{e^z} - 1) + 1 with a = 10, marked point ln ln 1.1 (a real
    // preimage of the base point), ball of radius 3
    let f = CatalogFunction::double_exp(10.0);
    let w = (1.0f64 + 0.1).ln().ln();
    let lifted = graph_from_function(
        &f,
        Rect::square(16.0),
        30,
        1e-10,
        Some(Complex64::new(w, 0.0)),
        4,
    )
    .expect("lift double exp");
    let b = ball_of_patch(&lifted.patch, 3, 10_000).expect("ball");
    assert!(validate(&b).is_valid());
    write_spg_file(&out.join("dexp_a10_r3.spg"), &b).expect("write");
    println!("dexp_a10_r3.spg: {} vertices, {} edges", b.vertex_count(), b.edge_count());

    // e^z + 1, ball of radius 5; the box is tall enough for six hops of
    // the vertical pi-spaced preimage ladder
    let f = CatalogFunction::exp_plus_one();
    let r = 0.75 * std::f64::consts::PI + 6.0 * std::f64::consts::PI + 2.0;
    let lifted = graph_from_function(&f, Rect::square(r), 30, 1e-10, None, 6).expect("lift exp");
    let b = ball_of_patch(&lifted.patch, 5, 10_000).expect("ball");
    assert!(validate(&b).is_valid());
    write_spg_file(&out.join("exp_r5.spg"), &b).expect("write");
    println!("exp_r5.spg: {} vertices, {} edges", b.vertex_count(), b.edge_count());
}
