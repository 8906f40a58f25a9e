//! Electrical-network and random-walk diagnostics on generated graphs.
//! Everything here is a heuristic pointer at the conformal type, never
//! a proof; verdicts say "consistent with" and nothing stronger.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{ball, ConformalType, GraphScheme, SpeiserPatch, Twin, VertexId};

/// Printed verbatim by every consumer of these diagnostics. Graphs of
/// parabolic surfaces can grow exponentially, so a transient-looking
/// walk or a bounded-looking resistance profile proves nothing.
pub const TYPE_CAVEAT: &str = "heuristic: resistance and random-walk numbers suggest a conformal \
type, they do not prove one (exponentially growing graphs of parabolic surfaces exist); every \
verdict means consistent with, nothing stronger";

const BALL_BUDGET: usize = 1_000_000;

/// Effective resistance from the root to the contracted rim of the ball
/// of each radius, with the final solver residual per radius. Entries
/// are infinite when a ball has no rim at all (the graph saturated).
#[derive(Clone, Debug)]
pub struct ResistanceProfile {
    pub radii: Vec<usize>,
    pub resistance: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Resistance sweep over increasing radii. Each ball's boundary
/// vertices collapse into one grounded node, every realized edge is a
/// unit conductance (parallel edges add), and the root potential under
/// a unit injected current is the resistance.
pub fn effective_resistance(
    scheme: &dyn GraphScheme,
    radii: &[usize],
    solver_tol: f64,
) -> Result<ResistanceProfile> {
    if radii.is_empty() {
        return Err(Error::Resistance("no radii given".into()));
    }
    for w in radii.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Resistance(format!(
                "radii must be strictly increasing, got {} after {}",
                w[1], w[0]
            )));
        }
    }
    if !(solver_tol > 0.0) {
        return Err(Error::Resistance("solver tolerance must be positive".into()));
    }
    let mut resistance = Vec::with_capacity(radii.len());
    let mut residuals = Vec::with_capacity(radii.len());
    for &r in radii {
        let patch = ball(scheme, r, BALL_BUDGET)?;
        let (val, res) = rim_resistance(&patch, solver_tol)?;
        resistance.push(val);
        residuals.push(res);
    }
    Ok(ResistanceProfile { radii: radii.to_vec(), resistance, residuals })
}

/// Root-to-rim resistance of one patch, rim meaning all boundary
/// vertices contracted together and grounded. Returns the resistance
/// and the achieved residual. A patch without boundary vertices has
/// nowhere for current to leave, reported as infinite resistance.
pub fn rim_resistance(patch: &SpeiserPatch, solver_tol: f64) -> Result<(f64, f64)> {
    let root = patch.root;
    if patch.vertex(root)?.boundary {
        return Ok((0.0, 0.0));
    }
    let mut index: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (&v, data) in &patch.vertices {
        if !data.boundary {
            let i = index.len();
            index.insert(v, i);
        }
    }
    if index.len() == patch.vertices.len() {
        return Ok((f64::INFINITY, 0.0));
    }
    let m = index.len();
    let mut deg = vec![0.0; m];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (h, hd) in patch.half_edges.iter().enumerate() {
        let t = match hd.twin {
            Twin::Half(t) => t,
            Twin::Dangling => continue,
        };
        // each realized edge once, self-loops carry no current
        if h as u32 > t {
            continue;
        }
        let u = hd.owner;
        let v = patch.half(t).owner;
        if u == v {
            continue;
        }
        match (index.get(&u), index.get(&v)) {
            (Some(&iu), Some(&iv)) => {
                deg[iu] += 1.0;
                deg[iv] += 1.0;
                adj[iu].push(iv);
                adj[iv].push(iu);
            }
            // edges into the rim only add conductance to ground
            (Some(&iu), None) => deg[iu] += 1.0,
            (None, Some(&iv)) => deg[iv] += 1.0,
            (None, None) => {}
        }
    }
    let mut b = vec![0.0; m];
    b[index[&root]] = 1.0;
    let max_iters = 10 * patch.vertex_count();
    let (x, residual, iters) = cg_jacobi(&deg, &adj, &b, solver_tol, max_iters);
    if residual > solver_tol {
        return Err(Error::SolverStalled { tol: solver_tol, residual, iters });
    }
    Ok((x[index[&root]], residual))
}

/// Conjugate gradient with Jacobi preconditioning on the grounded
/// Laplacian y = deg.*x - sum of interior neighbors. The reported
/// residual is recomputed from scratch at the end, not taken from the
/// recurrence; if the recurrence drifted, the solve restarts from the
/// current iterate until the honest residual passes or the budget runs
/// out. Returns (solution, residual norm, iterations used).
fn cg_jacobi(
    deg: &[f64],
    adj: &[Vec<usize>],
    b: &[f64],
    tol: f64,
    max_iters: usize,
) -> (Vec<f64>, f64, usize) {
    let n = b.len();
    let matvec = |x: &[f64], y: &mut [f64]| {
        for i in 0..n {
            let mut s = deg[i] * x[i];
            for &j in &adj[i] {
                s -= x[j];
            }
            y[i] = s;
        }
    };
    let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(p, q)| p * q).sum::<f64>();
    let norm = |v: &[f64]| dot(v, v).sqrt();

    let mut x = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut used = 0;
    let mut residual;
    loop {
        matvec(&x, &mut ap);
        for i in 0..n {
            r[i] = b[i] - ap[i];
        }
        residual = norm(&r);
        if residual <= tol || used >= max_iters {
            break;
        }
        for i in 0..n {
            z[i] = r[i] / deg[i];
        }
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        let mut advanced = false;
        while used < max_iters {
            // run the recurrence a little past the target, the outer
            // loop re-checks with a fresh residual
            if norm(&r) <= 0.5 * tol {
                break;
            }
            matvec(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                break;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            for i in 0..n {
                z[i] = r[i] / deg[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
            used += 1;
            advanced = true;
        }
        if !advanced {
            break;
        }
    }
    (x, residual, used)
}

/// Fraction of simple random walks from the root that reach graph
/// distance `radius` before stepping back onto the root, with a 95
/// percent binomial confidence half-width. Deterministic in the seed.
#[derive(Clone, Debug)]
pub struct EscapeEstimate {
    pub probability: f64,
    pub half_width: f64,
    pub hits: u64,
    pub trials: u64,
}

pub fn random_walk_escape(
    scheme: &dyn GraphScheme,
    radius: usize,
    trials: u64,
    seed: u64,
) -> Result<EscapeEstimate> {
    if trials == 0 {
        return Err(Error::Resistance("at least one walk trial is required".into()));
    }
    let root = scheme.root();
    if radius == 0 {
        // the walk starts on the target sphere
        return Ok(EscapeEstimate { probability: 1.0, half_width: 0.0, hits: trials, trials });
    }
    let mut dist: BTreeMap<VertexId, usize> = BTreeMap::new();
    dist.insert(root, 0);
    let mut queue = VecDeque::new();
    queue.push_back(root);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == radius {
            continue;
        }
        for (_t, u) in scheme.slots(v) {
            if !dist.contains_key(&u) {
                if dist.len() >= BALL_BUDGET {
                    return Err(Error::BudgetExceeded { budget: BALL_BUDGET, radius });
                }
                dist.insert(u, d + 1);
                queue.push_back(u);
            }
        }
    }
    let mut memo: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut cur = root;
        loop {
            let nbrs = memo
                .entry(cur)
                .or_insert_with(|| scheme.slots(cur).into_iter().map(|(_t, u)| u).collect());
            let next = nbrs[rng.gen_range(0..nbrs.len())];
            if dist[&next] == radius {
                hits += 1;
                break;
            }
            if next == root {
                break;
            }
            cur = next;
        }
    }
    let probability = hits as f64 / trials as f64;
    let half_width = 1.96 * (probability * (1.0 - probability) / trials as f64).sqrt();
    Ok(EscapeEstimate { probability, half_width, hits, trials })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeVerdict {
    ConsistentWithParabolic,
    ConsistentWithHyperbolic,
    Inconclusive,
}

impl std::fmt::Display for TypeVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TypeVerdict::ConsistentWithParabolic => write!(f, "consistent with parabolic type"),
            TypeVerdict::ConsistentWithHyperbolic => write!(f, "consistent with hyperbolic type"),
            TypeVerdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Pure function of the profile: identical numbers always give the
/// identical verdict. Compares the first and last resistance slopes of
/// the sweep; a slope that holds up reads parabolic, a collapsing one
/// reads hyperbolic, the middle ground stays inconclusive.
pub fn classify_profile(profile: &ResistanceProfile) -> TypeVerdict {
    let r = &profile.resistance;
    if r.len() < 3 || r.iter().any(|v| !v.is_finite()) {
        return TypeVerdict::Inconclusive;
    }
    let slope = |i: usize| (r[i + 1] - r[i]) / ((profile.radii[i + 1] - profile.radii[i]) as f64);
    let first = slope(0);
    let last = slope(r.len() - 2);
    if first <= 1e-9 {
        // flat from the very start: bounded resistance
        return TypeVerdict::ConsistentWithHyperbolic;
    }
    let ratio = last / first;
    if ratio >= 0.5 {
        TypeVerdict::ConsistentWithParabolic
    } else if ratio <= 0.1 {
        TypeVerdict::ConsistentWithHyperbolic
    } else {
        TypeVerdict::Inconclusive
    }
}

/// A resistance sweep, its classification, and whatever type the
/// family metadata asserts from the literature. The summary text is
/// explicit that the verdict is heuristic.
#[derive(Clone, Debug)]
pub struct TypeReport {
    pub verdict: TypeVerdict,
    pub profile: ResistanceProfile,
    pub ground_truth: Option<ConformalType>,
    pub summary: String,
}

pub fn type_heuristic(scheme: &dyn GraphScheme) -> Result<TypeReport> {
    let radii: Vec<usize> = vec![2, 4, 6, 8, 10, 12];
    let profile = effective_resistance(scheme, &radii, 1e-10)?;
    let verdict = classify_profile(&profile);
    let ground_truth = scheme.meta().conformal_type;
    let mut summary = format!(
        "heuristic verdict: {} (resistance {:.6} at radius {} reaching {:.6} at radius {})",
        verdict,
        profile.resistance[0],
        profile.radii[0],
        profile.resistance.last().unwrap(),
        profile.radii.last().unwrap(),
    );
    match ground_truth {
        Some(t) => {
            summary.push_str(&format!("; ground truth (literature): {t}"));
        }
        None => summary.push_str("; no ground truth recorded for this input"),
    }
    Ok(TypeReport { verdict, profile, ground_truth, summary })
}
