//! Numerical path lifting and everything built on it: preimage search,
//! disk-chain branch continuation, inverse-branch composition on grids,
//! and extraction of the line complex of an explicit function.

use std::collections::{BTreeMap, VecDeque};

use num_complex::Complex64;

use crate::analytic::{singular_values, CatalogFunction};
use crate::error::{Error, Result};
use crate::graph::{Color, PatchBuilder, SpeiserPatch, VertexId};
use crate::sphere::{spherical_distance, spherical_distance_c, BaseCurve, SphereValue};

const NEWTON_TOL: f64 = 1e-12;

fn near_critical(fp: Complex64, fval: Complex64) -> bool {
    !fp.is_finite() || fp.norm() < 1e-8 * (1.0 + fval.norm())
}

// ---- paths ----

/// Piecewise-linear path in the plane, sampled at strictly increasing
/// parameter knots in [0, 1].
#[derive(Clone, Debug)]
pub struct PathSample {
    pub knots: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl PathSample {
    pub fn new(knots: Vec<f64>, values: Vec<Complex64>) -> Result<PathSample> {
        if knots.len() != values.len() || knots.len() < 2 {
            return Err(Error::Lift("path needs matching knots and values, at least 2".into()));
        }
        for w in knots.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Lift("path knots must strictly increase".into()));
            }
        }
        for v in &values {
            if !v.is_finite() {
                return Err(Error::Lift("path values must be finite".into()));
            }
        }
        Ok(PathSample { knots, values })
    }

    pub fn segment(a: Complex64, b: Complex64, steps: usize) -> PathSample {
        let n = steps.max(1);
        let knots = (0..=n).map(|i| i as f64 / n as f64).collect::<Vec<_>>();
        let values = knots.iter().map(|&t| a + (b - a) * t).collect();
        PathSample { knots, values }
    }

    /// Polyline through the given corners, `steps` sub-knots per leg.
    pub fn polyline(corners: &[Complex64], steps: usize) -> PathSample {
        let legs = corners.len() - 1;
        let n = steps.max(1);
        let mut knots = vec![0.0];
        let mut values = vec![corners[0]];
        for (l, pair) in corners.windows(2).enumerate() {
            for i in 1..=n {
                let t = i as f64 / n as f64;
                knots.push((l as f64 + t) / legs as f64);
                values.push(pair[0] + (pair[1] - pair[0]) * t);
            }
        }
        PathSample { knots, values }
    }

    /// Circle around a center, `turns` may be fractional or negative.
    pub fn circle(center: Complex64, radius: f64, turns: f64, steps_per_turn: usize) -> PathSample {
        let n = ((steps_per_turn.max(8)) as f64 * turns.abs()).ceil() as usize;
        let knots = (0..=n).map(|i| i as f64 / n as f64).collect::<Vec<_>>();
        let values = knots
            .iter()
            .map(|&t| {
                let ang = 2.0 * std::f64::consts::PI * turns * t;
                center + radius * Complex64::new(ang.cos(), ang.sin())
            })
            .collect();
        PathSample { knots, values }
    }

    pub fn start(&self) -> Complex64 {
        self.values[0]
    }
}

// ---- path lifting ----

#[derive(Clone, Debug, PartialEq)]
pub enum LiftStatus {
    Completed,
    /// the continuation ran into a zero of the derivative near this point
    NearCritical(Complex64),
    /// |z| exceeded the escape bound (asymptotic-tract behavior)
    Escaped(f64),
}

#[derive(Clone, Debug)]
pub struct LiftResult {
    pub knots: Vec<f64>,
    pub points: Vec<Complex64>,
    /// spherical distance between f(point) and the path value per knot
    pub residuals: Vec<f64>,
    pub status: LiftStatus,
}

impl LiftResult {
    pub fn endpoint(&self) -> Complex64 {
        *self.points.last().unwrap()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    /// Lifted point nearest the given parameter.
    pub fn at(&self, t: f64) -> Complex64 {
        let mut best = 0;
        for (i, &k) in self.knots.iter().enumerate() {
            if (k - t).abs() < (self.knots[best] - t).abs() {
                best = i;
            }
        }
        self.points[best]
    }
}

pub fn lift_path(f: &CatalogFunction, path: &PathSample, z0: Complex64, tol: f64) -> Result<LiftResult> {
    lift_path_with(f, path, z0, tol, 1e9)
}

/// Predictor-corrector continuation of f(z(t)) = path(t) starting at z0.
/// The step is halved until the Newton corrector lands within tol/2 of the
/// path without straying from the predictor, so the lift cannot hop onto
/// a different branch.
pub fn lift_path_with(
    f: &CatalogFunction,
    path: &PathSample,
    z0: Complex64,
    tol: f64,
    escape: f64,
) -> Result<LiftResult> {
    if !(tol > 0.0) {
        return Err(Error::Lift(format!("tolerance must be positive, got {tol}")));
    }
    let r0 = (f.eval(z0) - path.start()).norm();
    if !(r0 <= tol) {
        return Err(Error::Lift(format!(
            "start point is not over the path start (residual {r0:.3e} > tol {tol:.3e})"
        )));
    }

    let mut out = LiftResult {
        knots: vec![path.knots[0]],
        points: vec![z0],
        residuals: vec![r0],
        status: LiftStatus::Completed,
    };
    let mut z = z0;
    for seg in 0..path.values.len() - 1 {
        let (wa, wb) = (path.values[seg], path.values[seg + 1]);
        let mut s = 0.0f64;
        let mut step = 1.0f64;
        let mut w_cur = wa;
        while s < 1.0 {
            step = step.min(1.0 - s);
            let w_next = wa + (wb - wa) * (s + step);
            match advance(f, z, w_cur, w_next, tol) {
                Some(zn) => {
                    z = zn;
                    s += step;
                    w_cur = w_next;
                    step = (step * 2.0).min(1.0);
                    if z.norm() > escape {
                        out.status = LiftStatus::Escaped(z.norm());
                        out.knots.push(path.knots[seg] + s * (path.knots[seg + 1] - path.knots[seg]));
                        out.points.push(z);
                        out.residuals.push(spherical_distance_c(f.eval(z), w_cur));
                        return Ok(out);
                    }
                }
                None => {
                    step *= 0.5;
                    if step < 1e-12 {
                        let fp = f.deriv(z);
                        let fv = f.eval(z);
                        if !fp.is_finite() || fp.norm() < 1e-4 * (1.0 + fv.norm()) {
                            out.status = LiftStatus::NearCritical(z);
                            return Ok(out);
                        }
                        return Err(Error::Lift(format!(
                            "continuation stalled near z = {z} (t around {})",
                            path.knots[seg]
                        )));
                    }
                }
            }
        }
        out.knots.push(path.knots[seg + 1]);
        out.points.push(z);
        out.residuals.push(spherical_distance_c(f.eval(z), wb));
    }
    Ok(out)
}

// one predictor-corrector step; None asks the caller to halve
fn advance(
    f: &CatalogFunction,
    z: Complex64,
    w_cur: Complex64,
    w_next: Complex64,
    tol: f64,
) -> Option<Complex64> {
    let fp = f.deriv(z);
    if near_critical(fp, w_cur) {
        return None;
    }
    let predicted = (w_next - w_cur) / fp;
    if predicted.norm() > 0.25 * (1.0 + z.norm()) {
        return None; // step too large for the local scale, halve instead
    }
    let mut zt = z + predicted;
    let leash = 3.0 * predicted.norm() + 1e-13;
    for _ in 0..30 {
        let fv = f.eval(zt);
        if !fv.is_finite() {
            return None;
        }
        let r = fv - w_next;
        // accept on plane residual, or on spherical residual where the
        // values are so large that the plane target sits below the
        // rounding floor of f
        if r.norm() <= tol * 0.5 || spherical_distance_c(fv, w_next) <= tol * 0.5 {
            if (zt - z).norm() > leash {
                return None; // corrector wandered off the local branch
            }
            return Some(zt);
        }
        let fpt = f.deriv(zt);
        if near_critical(fpt, fv) {
            return None;
        }
        // derivative drifting across the step means the linearization
        // (and with it the branch) cannot be trusted; halve instead.
        // Within a 25% drift the corrector stays inside the injective
        // neighborhood of the start point, so it cannot change sheets.
        if (fpt - fp).norm() > 0.25 * fp.norm() {
            return None;
        }
        zt -= r / fpt;
        if !zt.is_finite() || (zt - z).norm() > leash {
            return None;
        }
    }
    None
}

// ---- preimage search ----

/// Axis-aligned closed rectangle in the plane.
#[derive(Clone, Copy, Debug)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn square(r: f64) -> Rect {
        Rect { re_min: -r, re_max: r, im_min: -r, im_max: r }
    }

    pub fn centered(c: Complex64, r: f64) -> Rect {
        Rect { re_min: c.re - r, re_max: c.re + r, im_min: c.im - r, im_max: c.im + r }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let eps = 1e-9;
        z.re >= self.re_min - eps
            && z.re <= self.re_max + eps
            && z.im >= self.im_min - eps
            && z.im <= self.im_max + eps
    }

    pub fn corner_radius(&self) -> f64 {
        let re = self.re_min.abs().max(self.re_max.abs());
        let im = self.im_min.abs().max(self.im_max.abs());
        re.hypot(im)
    }
}

/// Preimages of a regular value inside a closed box, found by Newton
/// iteration from a grid of seeds, deduplicated and sorted.
pub fn preimages(
    f: &CatalogFunction,
    target: Complex64,
    rect: Rect,
    grid: usize,
) -> Result<Vec<Complex64>> {
    for sv in singular_values(f)? {
        if sv.critical {
            if let Some(c) = sv.value.as_complex() {
                if (c - target).norm() <= 1e-9 {
                    return Err(Error::CriticalTarget);
                }
            }
        }
    }
    let g = grid.max(2);
    let dre = rect.re_max - rect.re_min;
    let dim = rect.im_max - rect.im_min;
    let far = 1e6 * (1.0 + dre.hypot(dim)) + rect.corner_radius();
    let mut found: Vec<Complex64> = Vec::new();
    for iy in 0..g {
        for ix in 0..g {
            let mut z = Complex64::new(
                rect.re_min + (ix as f64 + 0.5) / g as f64 * dre,
                rect.im_min + (iy as f64 + 0.5) / g as f64 * dim,
            );
            let mut ok = false;
            for _ in 0..60 {
                let fv = f.eval(z);
                if !fv.is_finite() {
                    break;
                }
                let r = fv - target;
                if r.norm() <= NEWTON_TOL {
                    ok = true;
                    break;
                }
                let fp = f.deriv(z);
                if near_critical(fp, fv) {
                    break;
                }
                z -= r / fp;
                if !z.is_finite() || z.norm() > far {
                    break;
                }
            }
            if !ok || !rect.contains(z) {
                continue;
            }
            if (f.eval(z) - target).norm() > 1e-10 {
                continue;
            }
            if found.iter().all(|p| (p - z).norm() > 1e-8) {
                found.push(z);
            }
        }
    }
    found.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(found)
}

// ---- disk chains ----

/// Chain of spherical disks, consecutive ones overlapping.
#[derive(Clone, Debug)]
pub struct DiskChain {
    pub centers: Vec<Complex64>,
    pub radii: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct BranchCertificate {
    pub disk: usize,
    pub center_preimage: Complex64,
    pub residual: f64,
    /// preimage of the midpoint toward the next center, witnessing that
    /// the branch continues smoothly through the overlap
    pub witness_preimage: Complex64,
}

/// Continue the inverse branch pinned by z0 along the disk chain.
/// Every disk must avoid the singular values of f, so the branch is
/// well defined on each disk.
pub fn continue_chain(
    f: &CatalogFunction,
    chain: &DiskChain,
    z0: Complex64,
) -> Result<Vec<BranchCertificate>> {
    if chain.centers.is_empty() || chain.centers.len() != chain.radii.len() {
        return Err(Error::Lift("disk chain needs matching centers and radii".into()));
    }
    let svs = singular_values(f)?;
    for (i, (&p, &r)) in chain.centers.iter().zip(&chain.radii).enumerate() {
        if !(r > 0.0) {
            return Err(Error::Lift(format!("disk {i} has nonpositive radius")));
        }
        let pv = SphereValue::finite(p.re, p.im);
        for sv in &svs {
            if spherical_distance(pv, sv.value) < r {
                return Err(Error::DiskContainsSingular { index: i, value: sv.value.to_string() });
            }
        }
        if i + 1 < chain.centers.len() {
            let qv = chain.centers[i + 1];
            if spherical_distance(pv, SphereValue::finite(qv.re, qv.im)) >= r {
                return Err(Error::ChainBroken { index: i });
            }
        }
    }
    let tol = 1e-10;
    let r0 = (f.eval(z0) - chain.centers[0]).norm();
    if r0 > tol {
        return Err(Error::Lift(format!(
            "z0 is not a preimage of the first center (residual {r0:.3e})"
        )));
    }
    let mut certs = Vec::with_capacity(chain.centers.len());
    let mut q = z0;
    for i in 0..chain.centers.len() {
        let (witness, next_q) = if i + 1 < chain.centers.len() {
            let path = PathSample::segment(chain.centers[i], chain.centers[i + 1], 32);
            let lift = lift_path(f, &path, q, tol)?;
            if lift.status != LiftStatus::Completed {
                return Err(Error::Lift(format!("continuation failed inside disk {i}: {:?}", lift.status)));
            }
            (lift.at(0.5), Some(lift.endpoint()))
        } else {
            (q, None)
        };
        certs.push(BranchCertificate {
            disk: i,
            center_preimage: q,
            residual: (f.eval(q) - chain.centers[i]).norm(),
            witness_preimage: witness,
        });
        if let Some(nq) = next_q {
            q = nq;
        }
    }
    Ok(certs)
}

// ---- inverse branch composition on a grid ----

#[derive(Clone, Debug)]
pub struct BranchMap {
    pub points: Vec<Complex64>,
    pub values: Vec<Complex64>,
    pub max_residual: f64,
}

impl BranchMap {
    pub fn value_at(&self, z: Complex64) -> Option<Complex64> {
        self.points
            .iter()
            .position(|p| (p - z).norm() < 1e-12)
            .map(|i| self.values[i])
    }
}

/// Samples of g^{-1} o f on the given grid points, where the branch of
/// g^{-1} is pinned by g(w_g) = f(w_f). Paths run along a breadth-first
/// spanning tree of the grid so lifts share prefixes; each tree edge is
/// lifted under g along the f-image of the straight segment.
pub fn inverse_branch_compose(
    f: &CatalogFunction,
    g: &CatalogFunction,
    w_f: Complex64,
    w_g: Complex64,
    points: &[Complex64],
    tol: f64,
) -> Result<BranchMap> {
    if points.is_empty() {
        return Err(Error::Lift("no grid points supplied".into()));
    }
    let base_gap = (f.eval(w_f) - g.eval(w_g)).norm();
    if !(base_gap <= tol.max(1e-9)) {
        return Err(Error::Lift(format!(
            "base points disagree: |f(w_f) - g(w_g)| = {base_gap:.3e}"
        )));
    }

    // adjacency radius from the smallest grid gap; 1.45x picks up diagonals
    let mut h = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in points.iter().skip(i + 1) {
            h = h.min((a - b).norm());
        }
    }
    let link = if h.is_finite() { 1.45 * h } else { 0.0 };

    let mut root = 0;
    for (i, p) in points.iter().enumerate() {
        if (p - w_f).norm() < (points[root] - w_f).norm() {
            root = i;
        }
    }

    let lift_edge = |from: Complex64, start: Complex64, to: Complex64| -> Result<LiftResult> {
        let samples = 24;
        let knots: Vec<f64> = (0..=samples).map(|i| i as f64 / samples as f64).collect();
        let values: Vec<Complex64> = knots
            .iter()
            .map(|&t| f.eval(from + (to - from) * t))
            .collect();
        let path = PathSample::new(knots, values)?;
        lift_path(g, &path, start, tol)
    };

    // a couple of plane-Newton steps at the node target, so residuals
    // do not pile up along deep tree branches
    let polish = |z0: Complex64, target: Complex64| -> Complex64 {
        let mut z = z0;
        for _ in 0..4 {
            let r = g.eval(z) - target;
            if !r.is_finite() || r.norm() <= 0.25 * tol {
                break;
            }
            let gp = g.deriv(z);
            if near_critical(gp, target) {
                break;
            }
            let step = r / gp;
            if !step.is_finite() || step.norm() > 0.5 * (1.0 + z.norm()) {
                break;
            }
            z -= step;
        }
        z
    };

    let mut values: Vec<Option<Complex64>> = vec![None; points.len()];
    let first = lift_edge(w_f, w_g, points[root])?;
    if first.status != LiftStatus::Completed {
        return Err(Error::BranchEdge { from: root, to: root, n: format!("{:?}", first.status) });
    }
    values[root] = Some(polish(first.endpoint(), f.eval(points[root])));

    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let vu = values[u].unwrap();
        for v in 0..points.len() {
            if values[v].is_some() || (points[u] - points[v]).norm() > link {
                continue;
            }
            let lift = lift_edge(points[u], vu, points[v])
                .map_err(|e| Error::BranchEdge { from: u, to: v, n: e.to_string() })?;
            if lift.status != LiftStatus::Completed {
                return Err(Error::BranchEdge { from: u, to: v, n: format!("{:?}", lift.status) });
            }
            values[v] = Some(polish(lift.endpoint(), f.eval(points[v])));
            queue.push_back(v);
        }
    }
    if let Some(i) = values.iter().position(|v| v.is_none()) {
        return Err(Error::Lift(format!(
            "grid point {} ({}) is unreachable from the base point",
            i, points[i]
        )));
    }

    let values: Vec<Complex64> = values.into_iter().map(Option::unwrap).collect();
    let mut max_residual = 0.0f64;
    for (p, v) in points.iter().zip(&values) {
        max_residual = max_residual.max((g.eval(*v) - f.eval(*p)).norm());
    }
    if max_residual > tol {
        return Err(Error::Lift(format!(
            "branch residual {max_residual:.3e} exceeds tolerance {tol:.3e}"
        )));
    }
    Ok(BranchMap { points: points.to_vec(), values, max_residual })
}

// ---- line-complex extraction ----

pub struct LiftedPatch {
    pub patch: SpeiserPatch,
    pub positions: BTreeMap<VertexId, Complex64>,
}

const ANCHOR_CROSS: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ANCHOR_CIRCLE: Complex64 = Complex64 { re: 0.0, im: -1.0 };
const MATCH_TOL: f64 = 1e-6;
const VERTEX_BUDGET: usize = 100_000;

/// Extract the line complex of f over the base curve through its real
/// singular values: vertices are the preimages of +-i inside the box,
/// found by breadth-first lifting from a root over i; `hops` bounds the
/// expansion depth, so balls of radius < hops around the root are exact
/// for everything that stays inside the box.
pub fn graph_from_function(
    f: &CatalogFunction,
    rect: Rect,
    grid: usize,
    tol: f64,
    marked: Option<Complex64>,
    hops: usize,
) -> Result<LiftedPatch> {
    let svs = singular_values(f)?;
    let mut labels = Vec::new();
    let mut critical_finite = Vec::new();
    for sv in &svs {
        match sv.value.as_complex() {
            Some(c) => {
                if c.im != 0.0 {
                    return Err(Error::Lift(format!(
                        "finite singular value {} is off the real line; the real-line base curve does not apply",
                        sv.value
                    )));
                }
                labels.push(sv.value);
                if sv.critical {
                    critical_finite.push(c);
                }
            }
            None => labels.push(SphereValue::Infinity),
        }
    }
    let base = BaseCurve::standard(labels)?;
    let k = base.k();
    let escape = 4.0 * rect.corner_radius().max(1.0);

    // root: preimage of i over the marked point, or the smallest cross
    // found by grid search when the marked value sits on a critical value
    let marked_pt = marked.unwrap_or(Complex64::new(0.0, 0.0));
    let fm = f.eval(marked_pt);
    let mut root_pos = None;
    let marked_critical = !fm.is_finite()
        || critical_finite.iter().any(|c| (c - fm).norm() <= 1e-9);
    if !marked_critical {
        let path = PathSample::segment(fm, ANCHOR_CROSS, 32);
        if let Ok(lift) = lift_path_with(f, &path, marked_pt, tol, escape) {
            if lift.status == LiftStatus::Completed && rect.contains(lift.endpoint()) {
                root_pos = Some(lift.endpoint());
            }
        }
    }
    let root_pos = match root_pos {
        Some(p) => p,
        None => *preimages(f, ANCHOR_CROSS, rect, grid.max(10))?
            .first()
            .ok_or_else(|| Error::Lift("no cross vertex found inside the box".into()))?,
    };

    struct Vert {
        pos: Complex64,
        color: Color,
        depth: usize,
    }
    // the base-graph edge through crossing c, one leg per half plane.
    // Legs are log-spirals rather than plane chords: a chord to a far
    // crossing hugs the real axis spherically and brushes the singular
    // values there, where inverse branches crowd together and a lift
    // can slip onto a neighboring sheet. All finite singular values
    // are real, so the two routes are homotopic and the spiral only
    // adds clearance. Cyclic tangent order at the anchors is the same
    // for both, so rotation extraction below is unaffected.
    fn edge_curve(cross_first: bool, c: f64, steps_per_leg: usize) -> PathSample {
        let sign = if cross_first { 1.0 } else { -1.0 };
        let half_pi = std::f64::consts::FRAC_PI_2;
        let n = steps_per_leg;
        let mut knots = Vec::with_capacity(2 * n + 1);
        let mut vals = Vec::with_capacity(2 * n + 1);
        if c.abs() < 1e-9 {
            // crossing at the origin: the spiral degenerates and plain
            // chords are spherically harmless anyway
            for s in 0..=n {
                let t = s as f64 / n as f64;
                knots.push(0.5 * t);
                vals.push(Complex64::new(c * t, sign * (1.0 - t)));
            }
            for s in 1..=n {
                let t = s as f64 / n as f64;
                knots.push(0.5 + 0.5 * t);
                vals.push(Complex64::new(c * (1.0 - t), -sign * t));
            }
            return PathSample::new(knots, vals).unwrap();
        }
        let lr = c.abs().ln();
        let th_c = if c < 0.0 { std::f64::consts::PI } else { 0.0 };
        for s in 0..=n {
            let t = s as f64 / n as f64;
            knots.push(0.5 * t);
            let th = (1.0 - t) * half_pi + t * th_c;
            vals.push(Complex64::from_polar((t * lr).exp(), sign * th));
        }
        for s in 1..=n {
            let t = s as f64 / n as f64;
            knots.push(0.5 + 0.5 * t);
            let th = (1.0 - t) * th_c + t * half_pi;
            vals.push(Complex64::from_polar(((1.0 - t) * lr).exp(), -sign * th));
        }
        PathSample::new(knots, vals).unwrap()
    }
    let mut verts: Vec<Vert> = vec![Vert { pos: root_pos, color: Color::Cross, depth: 0 }];
    let mut edges: BTreeMap<(usize, u16), Option<usize>> = BTreeMap::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(v) = queue.pop_front() {
        if verts[v].depth >= hops {
            continue;
        }
        let (pos, color, depth) = (verts[v].pos, verts[v].color, verts[v].depth);
        for j in 0..k as u16 {
            let path = edge_curve(color == Color::Cross, base.crossing(j as usize), 24);
            let lift = lift_path_with(f, &path, pos, tol, escape)?;
            let end = match lift.status {
                LiftStatus::Completed if rect.contains(lift.endpoint()) => Some(lift.endpoint()),
                _ => None,
            };
            let prior = edges.get(&(v, j)).copied();
            match end {
                None => match prior {
                    Some(Some(u)) => {
                        return Err(Error::Lift(format!(
                            "edge type {j} at vertex {v} reached {} from one side but escaped from the other",
                            verts[u].pos
                        )))
                    }
                    _ => {
                        edges.insert((v, j), None);
                    }
                },
                Some(end) => {
                    let other = color.other();
                    let u = match verts
                        .iter()
                        .position(|w| w.color == other && (w.pos - end).norm() < MATCH_TOL)
                    {
                        Some(u) => u,
                        None => {
                            if verts.len() >= VERTEX_BUDGET {
                                return Err(Error::BudgetExceeded {
                                    budget: VERTEX_BUDGET,
                                    radius: hops,
                                });
                            }
                            verts.push(Vert { pos: end, color: other, depth: depth + 1 });
                            queue.push_back(verts.len() - 1);
                            verts.len() - 1
                        }
                    };
                    if let Some(prior) = prior {
                        if prior != Some(u) {
                            return Err(Error::Lift(format!(
                                "edge type {j} at vertex {v}: the two lift directions disagree"
                            )));
                        }
                    }
                    edges.insert((v, j), Some(u));
                    match edges.get(&(u, j)) {
                        Some(Some(w)) if *w != v => {
                            return Err(Error::Lift(format!(
                                "edge type {j} between vertices {v} and {u} conflicts with an earlier lift"
                            )))
                        }
                        _ => {
                            edges.insert((u, j), Some(v));
                        }
                    }
                }
            }
        }
    }

    // rotation: counterclockwise order of the lifted edge tangents,
    // dz = (c_j - anchor) / f'(z); ties broken by type
    let mut builder = PatchBuilder::new(base.clone());
    builder.root(0);
    for (vid, vert) in verts.iter().enumerate() {
        let anchor = match vert.color {
            Color::Cross => ANCHOR_CROSS,
            Color::Circle => ANCHOR_CIRCLE,
        };
        let fp = f.deriv(vert.pos);
        if near_critical(fp, f.eval(vert.pos)) {
            return Err(Error::Lift(format!(
                "vertex at {} is too close to a critical point",
                vert.pos
            )));
        }
        let mut slots: Vec<(f64, u16, Option<VertexId>)> = (0..k as u16)
            .map(|j| {
                let c = Complex64::new(base.crossing(j as usize), 0.0);
                let ang = ((c - anchor) / fp).arg();
                let target = edges
                    .get(&(vid, j))
                    .copied()
                    .flatten()
                    .map(|u| u as VertexId);
                (ang, j, target)
            })
            .collect();
        slots.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
        builder.vertex(
            vid as VertexId,
            vert.color,
            slots.into_iter().map(|(_, j, t)| (j, t)).collect(),
        );
    }
    let patch = builder.build()?;
    let report = crate::graph::validate(&patch);
    if !report.is_valid() {
        return Err(Error::InvalidFile(report.to_string()));
    }
    let positions = verts
        .iter()
        .enumerate()
        .map(|(i, v)| (i as VertexId, v.pos))
        .collect();
    Ok(LiftedPatch { patch, positions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ball_of_patch, canonical_code, faces, validate};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_root_monodromy() {
        let f = CatalogFunction::z_pow(2);
        let loop1 = PathSample::circle(c(0.0, 0.0), 1.0, 1.0, 64);
        let lift = lift_path(&f, &loop1, c(1.0, 0.0), 1e-10).unwrap();
        assert_eq!(lift.status, LiftStatus::Completed);
        assert!((lift.endpoint() - c(-1.0, 0.0)).norm() < 1e-8);

        let loop2 = PathSample::circle(c(0.0, 0.0), 1.0, 2.0, 64);
        let lift = lift_path(&f, &loop2, c(1.0, 0.0), 1e-10).unwrap();
        assert!((lift.endpoint() - c(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn exp_segment_lift_hits_log() {
        let f = CatalogFunction::exp_plus_one();
        let path = PathSample::segment(c(2.0, 0.0), c(3.0, 0.0), 8);
        let lift = lift_path(&f, &path, c(0.0, 0.0), 1e-10).unwrap();
        assert!((lift.endpoint() - c(2.0f64.ln(), 0.0)).norm() < 1e-8);
        assert!(lift.max_residual() <= 1e-10);
    }

    #[test]
    fn lift_rejects_bad_start() {
        let f = CatalogFunction::z_pow(2);
        let path = PathSample::segment(c(1.0, 0.0), c(2.0, 0.0), 4);
        assert!(lift_path(&f, &path, c(5.0, 0.0), 1e-10).is_err());
        assert!(lift_path(&f, &path, c(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn lift_near_critical_detected() {
        let f = CatalogFunction::z_pow(2);
        // the path crosses the critical value 0, where the branch ends
        let path = PathSample::segment(c(1.0, 0.0), c(-0.5, 0.0), 8);
        let lift = lift_path(&f, &path, c(1.0, 0.0), 1e-10).unwrap();
        assert!(matches!(lift.status, LiftStatus::NearCritical(_)), "{:?}", lift.status);
    }

    #[test]
    fn preimages_of_square_and_exp() {
        let f = CatalogFunction::z_pow(2);
        let roots = preimages(&f, c(0.0, 1.0), Rect::square(2.0), 40).unwrap();
        assert_eq!(roots.len(), 2);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(roots.iter().any(|z| (z - c(r, r)).norm() < 1e-9));
        assert!(roots.iter().any(|z| (z + c(r, r)).norm() < 1e-9));

        let g = CatalogFunction::exp_plus_one();
        let rect = Rect { re_min: -1.0, re_max: 1.0, im_min: -9.0, im_max: 9.0 };
        let logs = preimages(&g, c(0.0, 1.0), rect, 50).unwrap();
        assert_eq!(logs.len(), 3);
        let re = 2.0f64.sqrt().ln();
        for branch in [-1.0, 0.0, 1.0] {
            let expect = c(re, 3.0 * std::f64::consts::PI / 4.0 + 2.0 * std::f64::consts::PI * branch);
            assert!(
                logs.iter().any(|z| (z - expect).norm() < 1e-9),
                "missing branch {branch}"
            );
        }

        assert!(matches!(
            preimages(&f, c(0.0, 0.0), Rect::square(2.0), 20),
            Err(Error::CriticalTarget)
        ));
    }

    #[test]
    fn chain_continuation_tracks_square_root() {
        let f = CatalogFunction::z_pow(2);
        // upper semicircle from 1 to -1; every center sits at spherical
        // distance sqrt(2) from the singular values 0 and inf, so radius 1
        // clears them while consecutive 45-degree steps stay inside
        let step = std::f64::consts::FRAC_PI_4;
        let centers: Vec<Complex64> = (0..=4)
            .map(|i| c((i as f64 * step).cos(), (i as f64 * step).sin()))
            .collect();
        let chain = DiskChain { radii: vec![1.0; centers.len()], centers };
        let certs = continue_chain(&f, &chain, c(1.0, 0.0)).unwrap();
        assert_eq!(certs.len(), 5);
        assert!((certs[4].center_preimage - c(0.0, 1.0)).norm() < 1e-8);
        for cert in &certs {
            assert!(cert.residual <= 1e-9);
        }

        // a disk swallowing the critical value 0 is rejected
        let bad = DiskChain { centers: vec![c(0.1, 0.0)], radii: vec![0.5] };
        assert!(matches!(
            continue_chain(&f, &bad, c(0.1f64.sqrt(), 0.0)),
            Err(Error::DiskContainsSingular { index: 0, .. })
        ));

        // far-apart disks break the chain
        let broken = DiskChain {
            centers: vec![c(1.0, 0.0), c(100.0, 0.0)],
            radii: vec![0.1, 0.1],
        };
        assert!(matches!(
            continue_chain(&f, &broken, c(1.0, 0.0)),
            Err(Error::ChainBroken { index: 0 })
        ));
    }

    #[test]
    fn branch_compose_identity_and_shift() {
        let f = CatalogFunction::exp_plus_one();
        let mut pts = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                pts.push(c(-1.0 + 0.5 * i as f64, -1.0 + 0.5 * j as f64));
            }
        }
        let map = inverse_branch_compose(&f, &f, c(0.0, 0.0), c(0.0, 0.0), &pts, 1e-9).unwrap();
        for (p, v) in map.points.iter().zip(&map.values) {
            assert!((p - v).norm() < 1e-8, "identity branch at {p}");
        }

        // perturbed square root: phi(z) = sqrt(z^2 - 1/10) near z = 1
        let f2 = CatalogFunction::z_pow(2);
        let g2 = CatalogFunction::from_formula("z^2 + 0.1").unwrap();
        let mut pts = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                pts.push(c(0.8 + 0.1 * i as f64, -0.2 + 0.1 * j as f64));
            }
        }
        let wg = (0.9f64).sqrt();
        let map = inverse_branch_compose(&f2, &g2, c(1.0, 0.0), c(wg, 0.0), &pts, 1e-9).unwrap();
        let got = map.value_at(c(1.0, 0.0)).unwrap();
        assert!((got - c(wg, 0.0)).norm() < 1e-8);
        // closed form on every grid point
        for (p, v) in map.points.iter().zip(&map.values) {
            let oracle = (p * p - 0.1).sqrt();
            let oracle = if (oracle - v).norm() < (oracle + v).norm() { oracle } else { -oracle };
            assert!((oracle - v).norm() < 1e-8);
        }
    }

    #[test]
    fn branch_compose_double_exp_oracle() {
        let f = CatalogFunction::exp_plus_one();
        let g = CatalogFunction::double_exp(100.0);
        let wg = (1.0f64 + 1.0 / 100.0).ln().ln();
        let pts = vec![c(1.0, 0.0)];
        let map = inverse_branch_compose(&f, &g, c(0.0, 0.0), c(wg, 0.0), &pts, 1e-9).unwrap();
        let expect = (1.0f64 + 1.0f64.exp() / 100.0).ln().ln();
        assert!((map.values[0] - c(expect, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn line_complex_of_powers_is_a_cycle() {
        for d in 2u32..=4 {
            let f = CatalogFunction::z_pow(d);
            let lifted = graph_from_function(&f, Rect::square(2.0), 40, 1e-10, None, 2 * d as usize).unwrap();
            let p = &lifted.patch;
            assert_eq!(p.vertex_count(), 2 * d as usize, "degree {d}");
            assert_eq!(p.edge_count(), 2 * d as usize, "degree {d}");
            assert!(validate(p).is_valid(), "degree {d}: {}", validate(p));
            let fs = faces(p);
            assert_eq!(fs.len(), 2, "degree {d}");
            assert!(fs.iter().all(|f| f.closed && f.halves.len() == 2 * d as usize));
            let mut labels: Vec<usize> = fs.iter().filter_map(|f| f.label).collect();
            labels.sort();
            assert_eq!(labels, vec![0, 1]);
            assert_eq!(canonical_code(p).unwrap(), canonical_code(&cycle_patch(d as usize)).unwrap());
        }
    }

    // hand-built 2d-cycle over the base (0, inf): ring edges alternate
    // types 0 and 1, colors alternate cross/circle
    fn cycle_patch(d: usize) -> SpeiserPatch {
        let base = BaseCurve::standard(vec![SphereValue::real(0.0), SphereValue::Infinity]).unwrap();
        let n = 2 * d;
        let mut b = PatchBuilder::new(base);
        b.root(0);
        for v in 0..n {
            let color = if v % 2 == 0 { Color::Cross } else { Color::Circle };
            let prev = ((v + n - 1) % n) as VertexId;
            let next = ((v + 1) % n) as VertexId;
            let t_prev = (((v + n - 1) % n) % 2) as u16;
            let t_next = ((v % n) % 2) as u16;
            b.vertex(v as VertexId, color, vec![(t_prev, Some(prev)), (t_next, Some(next))]);
        }
        b.build().unwrap()
    }

    #[test]
    fn line_complex_of_exp_matches_the_path_scheme() {
        let f = CatalogFunction::exp_plus_one();
        let rect = Rect { re_min: -9.0, re_max: 9.0, im_min: -9.0, im_max: 9.0 };
        let lifted = graph_from_function(&f, rect, 30, 1e-10, None, 5).unwrap();
        assert!(validate(&lifted.patch).is_valid(), "{}", validate(&lifted.patch));
        // path m = -3..2 inside |Im z| <= 9
        assert_eq!(lifted.patch.vertex_count(), 6);
        let scheme = crate::families::exp_scheme();
        for r in 0..=2 {
            let a = ball_of_patch(&lifted.patch, r, 10_000).unwrap();
            let b = crate::graph::ball(&scheme, r, 10_000).unwrap();
            assert_eq!(canonical_code(&a).unwrap(), canonical_code(&b).unwrap(), "radius {r}");
        }
    }

    #[test]
    fn line_complex_of_double_exp_matches_the_grid_scheme() {
        let f = CatalogFunction::double_exp(10.0);
        let w = (1.0f64 + 0.1).ln().ln();
        let lifted =
            graph_from_function(&f, Rect::square(16.0), 30, 1e-10, Some(c(w, 0.0)), 4).unwrap();
        assert!(validate(&lifted.patch).is_valid(), "{}", validate(&lifted.patch));
        let scheme = crate::families::double_exp_scheme(
            SphereValue::real(-9.0),
            SphereValue::real(-9.0),
        )
        .unwrap();
        for r in 0..=3 {
            let a = ball_of_patch(&lifted.patch, r, 10_000).unwrap();
            let b = crate::graph::ball(scheme.as_ref(), r, 10_000).unwrap();
            assert_eq!(
                canonical_code(&a).unwrap(),
                canonical_code(&b).unwrap(),
                "radius {r}"
            );
        }
    }

    #[test]
    fn marked_point_controls_the_root() {
        let f = CatalogFunction::exp_plus_one();
        let rect = Rect { re_min: -9.0, re_max: 9.0, im_min: -9.0, im_max: 9.0 };
        let lifted = graph_from_function(&f, rect, 30, 1e-10, Some(c(0.0, 0.0)), 3).unwrap();
        // the root should be the principal logarithm branch over i
        let root_pos = lifted.positions[&lifted.patch.root];
        let expect = c(2.0f64.sqrt().ln(), 3.0 * std::f64::consts::PI / 4.0);
        assert!((root_pos - expect).norm() < 1e-8);
    }
}
