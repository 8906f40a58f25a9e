//! One test per shipping criterion. Each prints a single
//! `ACCEPTANCE n (...): PASS/FAIL` line with the measured numbers and
//! enforces the stated tolerance and runtime budget.

use std::time::Instant;

use num_complex::Complex64;
use speiser_core::analytic::{glue_h, order_estimate, CatalogFunction};
use speiser_core::convergence::{
    embedding_convergence_check, translation_asymptotics_check, uniform_convergence_check,
    CompactSpec, PointedSequence,
};
use speiser_core::families::{
    binary_tree_scheme, double_exp_scheme, exp_scheme, hyperbolic_scheme,
};
use speiser_core::graph::canonical::brute_force_isomorphic;
use speiser_core::graph::spg::read_spg_file;
use speiser_core::graph::{ball_of_patch, distances_from, PatchBuilder, Twin};
use speiser_core::lifting::{graph_from_function, lift_path, LiftStatus, PathSample, Rect};
use speiser_core::surgery::{collide_patch, collide_scheme, CollisionSpec};
use speiser_core::typeest::effective_resistance;
use speiser_core::{
    ball, canonical_code, isometric_embed, rooted_isomorphic, validate, BaseCurve, Color,
    GraphScheme, SpeiserPatch, SphereValue,
};

const BUDGET: usize = 1_000_000;

fn re(x: f64) -> SphereValue {
    SphereValue::real(x)
}

fn inf() -> SphereValue {
    SphereValue::Infinity
}

fn es(e: speiser_core::Error) -> String {
    e.to_string()
}

macro_rules! ck {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn finish(n: usize, name: &str, budget_s: f64, t0: Instant, r: Result<String, String>) {
    let dt = t0.elapsed().as_secs_f64();
    match &r {
        Ok(d) => println!("ACCEPTANCE {n} ({name}): PASS — {d} [{dt:.2}s / {budget_s:.0}s]"),
        Err(d) => println!("ACCEPTANCE {n} ({name}): FAIL — {d} [{dt:.2}s / {budget_s:.0}s]"),
    }
    if let Err(d) = r {
        panic!("acceptance {n} failed: {d}");
    }
    assert!(dt < budget_s, "acceptance {n} overran its {budget_s}s budget: {dt:.2}s");
}

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

// the 2d-cycle forced for z^d: alternating colors, edge types
// alternating 0/1 around the cycle, no boundary
fn forced_cycle(d: usize, base: BaseCurve, root_color: Color) -> SpeiserPatch {
    let n = (2 * d) as u64;
    let mut b = PatchBuilder::new(base);
    b.root(0);
    for i in 0..n {
        let color = if i % 2 == 0 { root_color } else { root_color.other() };
        let prev = (i + n - 1) % n;
        let next = (i + 1) % n;
        let (tp, tn) = if i % 2 == 0 { (0u16, 1u16) } else { (1, 0) };
        let slots = if i % 2 == 0 {
            vec![(tp, Some(prev)), (tn, Some(next))]
        } else {
            vec![(tn, Some(next)), (tp, Some(prev))]
        };
        b.vertex(i, color, slots);
    }
    b.build().unwrap()
}

#[test]
fn acceptance_1_graph_from_function_oracle() {
    let t0 = Instant::now();
    let r = (|| {
        for d in 2usize..=4 {
            let f = CatalogFunction::z_pow(d as u32);
            let lifted = graph_from_function(&f, Rect::square(2.0), 30, 1e-10, None, 2 * d)
                .map_err(es)?;
            let gen = &lifted.patch;
            ck!(validate(gen).is_valid(), "z^{d}: generated patch invalid: {}", validate(gen));
            ck!(
                gen.vertex_count() == 2 * d,
                "z^{d}: got {} vertices, the cycle needs {}",
                gen.vertex_count(),
                2 * d
            );
            let root_color = gen.vertices[&gen.root].color;
            let want = forced_cycle(d, gen.base.clone(), root_color);
            ck!(
                canonical_code(gen).map_err(es)? == canonical_code(&want).map_err(es)?,
                "z^{d}: patch is not the forced {}-cycle",
                2 * d
            );
        }
        let f = CatalogFunction::exp_plus_one();
        let lifted = graph_from_function(&f, Rect::square(8.0), 30, 1e-10, None, 8).map_err(es)?;
        let gen = &lifted.patch;
        ck!(validate(gen).is_valid(), "exp window patch invalid");
        let host = exp_scheme();
        let emb = isometric_embed(gen, &host, 8, None, BUDGET).map_err(es)?;
        ck!(
            !emb.embeddings.is_empty(),
            "the e^z+1 window patch does not embed into the exp line complex"
        );
        let b1 = ball_of_patch(gen, 1, BUDGET).map_err(es)?;
        let s1 = ball(&host, 1, BUDGET).map_err(es)?;
        ck!(
            rooted_isomorphic(&b1, &s1, None).map_err(es)?,
            "radius-1 ball of the e^z+1 patch differs from the exp scheme ball"
        );
        Ok(format!(
            "z^2,z^3,z^4 give exact 2d-cycles; e^z+1 window ({} vertices) embeds in the exp complex",
            gen.vertex_count()
        ))
    })();
    finish(1, "graph-from-function oracle", 10.0, t0, r);
}

#[test]
fn acceptance_2_collision_chain_reproduces_the_figure() {
    let t0 = Instant::now();
    let r = (|| {
        let d4 = double_exp_scheme(re(-9.0), re(-3.0)).map_err(es)?;
        let step1 = collide_scheme(d4.as_ref(), CollisionSpec { moving: re(-9.0), target: inf() })
            .map_err(es)?;
        let hyp = hyperbolic_scheme(re(-3.0)).map_err(es)?;
        for r in 1..=4 {
            let a = ball(&step1, r, BUDGET).map_err(es)?;
            let b = ball(&hyp, r, BUDGET).map_err(es)?;
            ck!(
                canonical_code(&a).map_err(es)? == canonical_code(&b).map_err(es)?,
                "intermediate is not the hyperbolic scheme at radius {r}"
            );
        }
        let step2 = collide_scheme(&step1, CollisionSpec { moving: re(-3.0), target: inf() })
            .map_err(es)?;
        let path = exp_scheme();
        for r in 1..=4 {
            let a = ball(&step2, r, BUDGET).map_err(es)?;
            let b = ball(&path, r, BUDGET).map_err(es)?;
            ck!(
                canonical_code(&a).map_err(es)? == canonical_code(&b).map_err(es)?,
                "final collapse is not the exp scheme at radius {r}"
            );
        }
        // the shipped double-exp ball collapses the same way at the patch level
        let fx = read_spg_file(&fixture("dexp_a10_r3.spg")).map_err(es)?;
        let collided =
            collide_patch(&fx, CollisionSpec { moving: re(-9.0), target: inf() }).map_err(es)?;
        for r in 1..=3 {
            let a = ball_of_patch(&collided, r, BUDGET).map_err(es)?;
            let b = ball(&path, r, BUDGET).map_err(es)?;
            ck!(
                canonical_code(&a).map_err(es)? == canonical_code(&b).map_err(es)?,
                "collided fixture ball differs from the exp scheme at radius {r}"
            );
        }
        Ok("dexp -> hyperbolic -> exp exact at radii 1..4; fixture collapses at radii 1..3".into())
    })();
    finish(2, "collision chain", 30.0, t0, r);
}

#[test]
fn acceptance_3_monodromy_of_the_perturbed_square() {
    let t0 = Instant::now();
    let r = (|| {
        let f = CatalogFunction::from_formula("z^2 + 0.1").map_err(es)?;
        let tol = 1e-10;

        // loop around the critical value 1/n = 0.1 swaps the branches
        let around = PathSample::circle(Complex64::new(0.1, 0.0), 0.05, 1.0, 512);
        let z0 = Complex64::new(0.05f64.sqrt(), 0.0);
        let lift = lift_path(&f, &around, z0, tol).map_err(es)?;
        ck!(lift.status == LiftStatus::Completed, "swap loop stalled: {:?}", lift.status);
        let swap_err = (lift.endpoint() + z0).norm();
        ck!(swap_err <= 1e-8, "loop around 0.1 did not swap branches, error {swap_err:.3e}");

        // loop around a regular point closes up
        let elsewhere = PathSample::circle(Complex64::new(1.0, 0.0), 0.2, 1.0, 512);
        let z1 = Complex64::new(1.1f64.sqrt(), 0.0);
        let lift = lift_path(&f, &elsewhere, z1, tol).map_err(es)?;
        ck!(lift.status == LiftStatus::Completed, "closed loop stalled: {:?}", lift.status);
        let close_err = (lift.endpoint() - z1).norm();
        ck!(close_err <= 1e-8, "loop around 1.0 did not close, error {close_err:.3e}");

        Ok(format!("swap error {swap_err:.2e}, closure error {close_err:.2e}"))
    })();
    finish(3, "monodromy", 5.0, t0, r);
}

#[test]
fn acceptance_4_kernel_convergence_data() {
    let t0 = Instant::now();
    let r = (|| {
        let seq = PointedSequence::squares_perturbed();
        let ns = [10u64, 100, 1000];

        let k_uniform = CompactSpec::new(2.0, 0.1).with_grid(41);
        let rep = uniform_convergence_check(&seq, &k_uniform, &ns, 0.05).map_err(es)?;
        ck!(rep.pass, "uniform check failed its decay verdict");
        for (row, &n) in rep.rows.iter().zip(&ns) {
            let plane = row.plane_sup.ok_or("uniform row missing the plane sup")?;
            let err = (plane - 1.0 / n as f64).abs();
            ck!(err <= 1e-12, "n={n}: plane sup {plane} misses 1/n by {err:.3e}");
        }

        // the embedding compact must keep the oracle's branch points
        // +-sqrt(1/n) inside its hole, so it uses the wider one
        let k_embed = CompactSpec::new(2.0, 0.5).with_grid(21);
        let rep = embedding_convergence_check(&seq, &k_embed, &ns, 1e-8, 0.05).map_err(es)?;
        ck!(rep.pass, "embedding check failed its decay verdict");
        let pts = k_embed.grid_points(&seq.exceptional);
        let mut prev = f64::INFINITY;
        let mut worst = 0.0f64;
        for (row, &n) in rep.rows.iter().zip(&ns) {
            let c = 1.0 / n as f64;
            let mut oracle = 0.0f64;
            for &z in &pts {
                let phi = z * (Complex64::new(1.0, 0.0) - c / (z * z)).sqrt();
                oracle = oracle.max((phi - z).norm());
            }
            let gap = (row.sup - oracle).abs();
            worst = worst.max(gap);
            ck!(gap <= 1e-8, "n={n}: embedding sup {} vs oracle {} (gap {gap:.3e})", row.sup, oracle);
            ck!(row.sup < prev, "n={n}: embedding rows are not decreasing");
            prev = row.sup;
        }
        Ok(format!("plane sup exactly 1/n; embedding matches the branch oracle to {worst:.2e}"))
    })();
    finish(4, "kernel convergence data", 30.0, t0, r);
}

#[test]
fn acceptance_5_translation_asymptotics() {
    let t0 = Instant::now();
    let r = (|| {
        let scales = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6];
        let k = CompactSpec::new(1.0, 1e-9).with_grid(41);
        let rep = translation_asymptotics_check(&scales, &k, 1e-8, 0.01).map_err(es)?;
        ck!(rep.pass, "translation check failed its decay verdict");
        let mut worst_gap = 0.0f64;
        for row in &rep.rows {
            let gap = row.route_gap.ok_or("row missing the route gap")?;
            worst_gap = worst_gap.max(gap);
            ck!(gap <= 1e-8, "a={}: lifting and closed form disagree by {gap:.3e}", row.index);
        }
        let mut ratios = Vec::new();
        for w in rep.rows.windows(2) {
            let ratio = w[1].sup / w[0].sup;
            ck!(
                (1.0 / 30.0..=0.3).contains(&ratio),
                "decade ratio {ratio:.4} outside [1/30, 3/10] at a={}",
                w[1].index
            );
            ratios.push(format!("{ratio:.3}"));
        }
        Ok(format!("decade ratios [{}], route gap {worst_gap:.2e}", ratios.join(", ")))
    })();
    finish(5, "translation asymptotics", 60.0, t0, r);
}

#[test]
fn acceptance_6_order_estimates() {
    let t0 = Instant::now();
    let r = (|| {
        let rows = order_estimate(&CatalogFunction::exp_plus_one(), &[50.0], 64).map_err(es)?;
        let rho_exp = rows[0].rho.ok_or("no rho for e^z+1 at r=50")?;
        ck!((0.98..=1.02).contains(&rho_exp), "rho(e^z+1, 50) = {rho_exp}");

        let rows =
            order_estimate(&CatalogFunction::double_exp(10.0), &[10.0, 15.0, 20.0], 64)
                .map_err(es)?;
        let rhos: Vec<f64> = rows
            .iter()
            .map(|r| r.rho.ok_or("missing rho".to_string()))
            .collect::<Result<_, _>>()?;
        ck!(rhos[2] >= 5.0, "rho(dexp, 20) = {} below 5", rhos[2]);
        ck!(rhos[0] < rhos[1] && rhos[1] < rhos[2], "rho not increasing: {rhos:?}");
        Ok(format!("rho(e^z+1, 50) = {rho_exp:.4}; dexp rho = {rhos:.3?}"))
    })();
    finish(6, "order estimates", 10.0, t0, r);
}

#[test]
fn acceptance_7_gluing_asymptotics() {
    let t0 = Instant::now();
    let r = (|| {
        let left = (glue_h(-20.0) + 20.0).abs();
        ck!(left <= 1e-6, "|h(-20) + 20| = {left:.3e}");
        let x = 1e6;
        let right = (glue_h(x) / x.ln() - 1.0).abs();
        ck!(right <= 1e-6, "|h(1e6)/ln(1e6) - 1| = {right:.3e}");
        ck!(glue_h(x).is_finite(), "h overflowed at 1e6");
        Ok(format!("|h(-20)+20| = {left:.2e}, |h(1e6)/ln 1e6 - 1| = {right:.2e}"))
    })();
    finish(7, "gluing asymptotics", 1.0, t0, r);
}

#[test]
fn acceptance_8_resistance_suite() {
    let t0 = Instant::now();
    let r = (|| {
        let exp = exp_scheme();
        let radii: Vec<usize> = (1..=20).collect();
        let prof = effective_resistance(&exp, &radii, 1e-10).map_err(es)?;
        let mut worst = 0.0f64;
        for (i, &r) in radii.iter().enumerate() {
            let err = (prof.resistance[i] - r as f64 / 2.0).abs();
            worst = worst.max(err);
            ck!(err <= 1e-8, "exp R({r}) = {} misses r/2 by {err:.3e}", prof.resistance[i]);
        }

        let chain: Vec<usize> = (2..=10).collect();
        let d4 = double_exp_scheme(re(-9.0), re(-3.0)).map_err(es)?;
        let d4c = collide_scheme(d4.as_ref(), CollisionSpec { moving: re(-9.0), target: inf() })
            .map_err(es)?;
        let hyp = hyperbolic_scheme(re(-3.0)).map_err(es)?;
        let hypc = collide_scheme(&hyp, CollisionSpec { moving: re(-3.0), target: inf() })
            .map_err(es)?;
        let before = effective_resistance(d4.as_ref(), &chain, 1e-10).map_err(es)?;
        let after = effective_resistance(&d4c, &chain, 1e-10).map_err(es)?;
        for (i, &r) in chain.iter().enumerate() {
            ck!(
                after.resistance[i] >= before.resistance[i] - 1e-9,
                "deleting edges lowered R at radius {r} on the dexp link"
            );
        }
        let before = effective_resistance(&hyp, &chain, 1e-10).map_err(es)?;
        let after = effective_resistance(&hypc, &chain, 1e-10).map_err(es)?;
        for (i, &r) in chain.iter().enumerate() {
            ck!(
                after.resistance[i] >= before.resistance[i] - 1e-9,
                "deleting edges lowered R at radius {r} on the hyperbolic link"
            );
        }

        let tree = binary_tree_scheme();
        let tr: Vec<usize> = (1..=14).collect();
        let prof_t = effective_resistance(&tree, &tr, 1e-10).map_err(es)?;
        let plateau = *prof_t.resistance.last().unwrap();
        ck!(prof_t.resistance.iter().all(|&v| v < 2.0), "tree profile reached 2.0");
        let last_gap = prof_t.resistance[13] - prof_t.resistance[12];
        ck!(last_gap <= 1e-3, "tree profile still climbing by {last_gap:.3e}");
        Ok(format!(
            "exp R=r/2 to {worst:.2e}; Rayleigh holds on both links; tree plateau {plateau:.4}"
        ))
    })();
    finish(8, "resistance suite", 60.0, t0, r);
}

// compact deterministic rerun of the randomized suites: local
// corruption is caught, canonical code agrees with brute-force search,
// distance is a metric, derivatives match finite differences, lifts are
// homotopy invariant
#[test]
fn acceptance_9_invariant_suites() {
    let t0 = Instant::now();
    let r = (|| {
        let schemes: Vec<Box<dyn GraphScheme>> = vec![
            Box::new(exp_scheme()),
            double_exp_scheme(re(-9.0), re(-9.0)).map_err(es)?,
            double_exp_scheme(re(-9.0), re(-3.0)).map_err(es)?,
            Box::new(hyperbolic_scheme(re(-3.0)).map_err(es)?),
        ];

        // validation: each local corruption is caught
        let mut corruptions = 0;
        for s in &schemes {
            for radius in 2..=3 {
                let p = ball(s.as_ref(), radius, BUDGET).map_err(es)?;
                ck!(validate(&p).is_valid(), "clean ball failed validation");
                for which in 0..3 {
                    for pick in [0usize, 5] {
                        let mut q = p.clone();
                        let interior_halves: Vec<u32> = (0..q.half_edges.len() as u32)
                            .filter(|&h| {
                                matches!(q.half(h).twin, Twin::Half(_))
                                    && !q.vertices[&q.half(h).owner].boundary
                            })
                            .collect();
                        match which {
                            0 => {
                                let h = interior_halves[pick % interior_halves.len()];
                                q.half_edges[h as usize].twin = Twin::Dangling;
                            }
                            1 => {
                                let interior: Vec<u64> = q
                                    .vertices
                                    .iter()
                                    .filter(|(_, d)| !d.boundary)
                                    .map(|(&v, _)| v)
                                    .collect();
                                let v = interior[pick % interior.len()];
                                let c = q.vertices[&v].color.other();
                                q.vertices.get_mut(&v).unwrap().color = c;
                            }
                            _ => {
                                let h = interior_halves[pick % interior_halves.len()];
                                let k = q.k() as u16;
                                q.half_edges[h as usize].etype =
                                    (q.half_edges[h as usize].etype + 1) % k;
                            }
                        }
                        ck!(!validate(&q).is_valid(), "corruption {which} went unnoticed");
                        corruptions += 1;
                    }
                }
            }
        }

        // canonical code vs exhaustive search on small balls
        let mut pool: Vec<SpeiserPatch> = vec![ball(schemes[0].as_ref(), 1, BUDGET).map_err(es)?];
        pool.push(ball(schemes[0].as_ref(), 2, BUDGET).map_err(es)?);
        for s in &schemes[1..] {
            pool.push(ball(s.as_ref(), 1, BUDGET).map_err(es)?);
        }
        for (i, p) in pool.iter().enumerate() {
            ck!(p.vertex_count() <= 8, "pool entry {i} too large for brute force");
            for (j, q) in pool.iter().enumerate() {
                let fast = canonical_code(p).map_err(es)? == canonical_code(q).map_err(es)?;
                let slow = brute_force_isomorphic(p, q);
                ck!(fast == slow, "code and search disagree on pool pair ({i},{j})");
                ck!(fast == (i == j), "pool entries not pairwise distinct ({i},{j})");
            }
            // id renaming: rebuild with shifted ids, must stay isomorphic
            let mut b = PatchBuilder::new(p.base.clone());
            b.root(p.root + 1000);
            for (&v, vd) in &p.vertices {
                let slots = vd
                    .rotation
                    .iter()
                    .map(|&h| (p.half(h).etype, p.other_end(h).map(|u| u + 1000)))
                    .collect();
                b.vertex(v + 1000, vd.color, slots);
            }
            let shifted = b.build().map_err(es)?;
            ck!(
                canonical_code(p).map_err(es)? == canonical_code(&shifted).map_err(es)?,
                "canonical code changed under id renaming (pool entry {i})"
            );
            ck!(brute_force_isomorphic(p, &shifted), "search lost the renamed copy ({i})");
        }

        // metric axioms on a mid-size ball
        let p = ball(schemes[2].as_ref(), 3, BUDGET).map_err(es)?;
        let ids: Vec<u64> = p.vertices.keys().copied().collect();
        let step = (ids.len() / 5).max(1);
        let sample: Vec<u64> = ids.iter().step_by(step).copied().collect();
        for &u in &sample {
            let du = distances_from(&p, u).map_err(es)?;
            ck!(du[&u] == 0, "d(u,u) != 0");
            for &v in &sample {
                let dv = distances_from(&p, v).map_err(es)?;
                ck!(du[&v] == dv[&u], "distance not symmetric");
                ck!(u == v || du[&v] >= 1, "distinct vertices at distance 0");
                for &w in &sample {
                    ck!(du[&w] <= du[&v] + dv[&w], "triangle inequality fails");
                }
            }
        }

        // derivatives against central differences
        let fns = [
            CatalogFunction::z_pow(2),
            CatalogFunction::z_pow(3),
            CatalogFunction::exp_plus_one(),
            CatalogFunction::double_exp(10.0),
        ];
        let h = 1e-6;
        for f in &fns {
            for &re_z in &[-1.2, 0.0, 0.7] {
                for &im_z in &[-0.9, 0.4, 1.1] {
                    for &ang in &[0.0, 1.1, 2.6] {
                        let z = Complex64::new(re_z, im_z);
                        let dir = Complex64::new(0.0, ang).exp();
                        let fd = (f.eval(z + h * dir) - f.eval(z - h * dir)) / (2.0 * h * dir);
                        let exact = f.deriv(z);
                        ck!(
                            (fd - exact).norm() <= 1e-5 * (1.0 + exact.norm()),
                            "finite difference misses the derivative at z={z}"
                        );
                    }
                }
            }
        }

        // homotopy invariance: arc vs detour lifts agree
        let f = CatalogFunction::from_formula("z^2 + 0.1").map_err(es)?;
        let z0 = Complex64::new(0.9f64.sqrt(), 0.0);
        for &turns in &[0.11f64, 0.33, 0.62, 0.91] {
            let theta = std::f64::consts::TAU * turns;
            let direct = PathSample::circle(Complex64::new(0.0, 0.0), 1.0, turns, 256);
            let m = 50;
            let arcsteps = 8 + (150.0 * turns) as usize;
            let mut vals = Vec::new();
            for i in 0..=m {
                vals.push(Complex64::new(1.0 + i as f64 / m as f64, 0.0));
            }
            for i in 1..=arcsteps {
                let a = theta * i as f64 / arcsteps as f64;
                vals.push(2.0 * Complex64::new(0.0, a).exp());
            }
            for i in 1..=m {
                vals.push((2.0 - i as f64 / m as f64) * Complex64::new(0.0, theta).exp());
            }
            let knots: Vec<f64> =
                (0..vals.len()).map(|i| i as f64 / (vals.len() - 1) as f64).collect();
            let detour = PathSample::new(knots, vals).map_err(es)?;
            let a = lift_path(&f, &direct, z0, 1e-10).map_err(es)?;
            let b = lift_path(&f, &detour, z0, 1e-10).map_err(es)?;
            ck!(a.status == LiftStatus::Completed, "direct lift stalled");
            ck!(b.status == LiftStatus::Completed, "detour lift stalled");
            let gap = (a.endpoint() - b.endpoint()).norm();
            ck!(gap <= 1e-8, "homotopic lifts split by {gap:.3e} at turns={turns}");
        }

        Ok(format!(
            "{corruptions} corruptions caught; code==search on {} pool pairs; metric, derivative, homotopy checks clean",
            pool.len() * pool.len()
        ))
    })();
    finish(9, "invariant suites", 120.0, t0, r);
}
