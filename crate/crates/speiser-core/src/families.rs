//! Lazy generators for the catalog graphs: the bi-infinite path of
//! e^z + 1, the degree-3 and degree-4 double-exponential grids, the
//! hyperbolic half-plane graph, and a binary tree used only as a
//! resistance diagnostic.

use crate::error::{Error, Result};
use crate::graph::{Color, ConformalType, GraphScheme, SchemeMeta, VertexId};
use crate::sphere::{BaseCurve, SphereValue};

// zigzag encoding so signed grid coordinates fit in unsigned ids
fn zz(x: i64) -> u64 {
    if x >= 0 {
        (x as u64) << 1
    } else {
        (((-x) as u64) << 1) - 1
    }
}

fn unzz(u: u64) -> i64 {
    if u & 1 == 0 {
        (u >> 1) as i64
    } else {
        -(((u + 1) >> 1) as i64)
    }
}

fn pack(j: i64, n: i64) -> VertexId {
    (zz(j) << 32) | zz(n)
}

fn unpack(v: VertexId) -> (i64, i64) {
    (unzz(v >> 32), unzz(v & 0xffff_ffff))
}

fn real_of(v: SphereValue, what: &str) -> Result<f64> {
    match v.as_complex() {
        Some(z) if z.im == 0.0 => Ok(z.re),
        _ => Err(Error::Family(format!("{what} must be a finite real value, got {v}"))),
    }
}

// ---- exp family: the bi-infinite path ----

/// Line complex of e^z + 1: vertices at integer positions m, crosses at
/// even m, root at m = 0, edge {m, m+1} of type 1 when m is even.
pub struct ExpScheme {
    base: BaseCurve,
}

pub fn exp_scheme() -> ExpScheme {
    let base = BaseCurve::in_order(vec![SphereValue::real(1.0), SphereValue::Infinity]).unwrap();
    ExpScheme { base }
}

impl ExpScheme {
    fn m_of(v: VertexId) -> i64 {
        unzz(v)
    }
}

impl GraphScheme for ExpScheme {
    fn root(&self) -> VertexId {
        zz(0)
    }

    fn base(&self) -> &BaseCurve {
        &self.base
    }

    fn meta(&self) -> SchemeMeta {
        SchemeMeta {
            name: "exp".into(),
            params: vec![("formula".into(), "exp(z) + 1".into())],
            conformal_type: Some(ConformalType::Parabolic),
        }
    }

    fn color(&self, v: VertexId) -> Color {
        if Self::m_of(v) % 2 == 0 {
            Color::Cross
        } else {
            Color::Circle
        }
    }

    fn slots(&self, v: VertexId) -> Vec<(u16, VertexId)> {
        let m = Self::m_of(v);
        if m % 2 == 0 {
            vec![(0, zz(m - 1)), (1, zz(m + 1))]
        } else {
            vec![(0, zz(m + 1)), (1, zz(m - 1))]
        }
    }
}

// ---- shared grid rules for the double-exponential graphs ----
//
// Vertices live on a grid (j, n): column j, sheet n. Circles at even j,
// crosses at odd j. Three of the edge types form the degree-3 graph:
//   s0: circle (0,n) -> (1,n-1)        spine edge shifting sheets
//       circle (j,n) -> (j+1,n)        j != 0
//       cross  (1,n) -> (0,n+1)        the matching spine edge
//       cross  (j,n) -> (j-1,n)        j != 1
//   s1: circle (j,n) -> (j+1,n) if j != 0 else (1,n)
//       cross  (j,n) -> (j-1,n) if j != 1 else (0,n)
//   s2: circle (j,n) -> (j-1,n); cross (j,n) -> (j+1,n)
// so {s0,s1} are the double edges (digon rungs) away from the spine.

fn grid_color(j: i64) -> Color {
    if j % 2 == 0 {
        Color::Cross.other() // circles at even j
    } else {
        Color::Cross
    }
}

fn s0_target(j: i64, n: i64) -> (i64, i64) {
    if j % 2 == 0 {
        if j == 0 {
            (1, n - 1)
        } else {
            (j + 1, n)
        }
    } else if j == 1 {
        (0, n + 1)
    } else {
        (j - 1, n)
    }
}

fn s1_target(j: i64, n: i64) -> (i64, i64) {
    if j % 2 == 0 {
        if j == 0 {
            (1, n)
        } else {
            (j + 1, n)
        }
    } else if j == 1 {
        (0, n)
    } else {
        (j - 1, n)
    }
}

fn s2_target(j: i64, n: i64) -> (i64, i64) {
    if j % 2 == 0 {
        (j - 1, n)
    } else {
        (j + 1, n)
    }
}

// perfect matching used as the extra edge type of the degree-4 graph;
// phases differ between the upper and lower half-grid so that deleting
// the wrap-around type leaves the half-plane graph connected to the root
fn matching_target(j: i64, n: i64) -> (i64, i64) {
    if j % 2 == 0 {
        // circle
        if j >= 2 {
            if n <= -1 {
                (j - 1, n)
            } else {
                (j + 1, n)
            }
        } else if n <= 0 {
            (j - 1, n)
        } else if j == 0 {
            (1, n - 1)
        } else {
            (j + 1, n)
        }
    } else {
        // cross
        if j >= 1 {
            if n <= -1 {
                (j + 1, n)
            } else if j == 1 {
                (0, n + 1)
            } else {
                (j - 1, n)
            }
        } else if n <= 0 {
            (j + 1, n)
        } else {
            (j - 1, n)
        }
    }
}

/// Degree-3 double-exponential graph: line complex of a(e^(e^z) - 1) + 1
/// for real a > 0, labels {1-a, 1, inf}.
pub struct DoubleExp3Scheme {
    base: BaseCurve,
    a: f64,
}

/// Degree-4 perturbed variant with labels {a, b, 1, inf}, a < b < 1.
pub struct DoubleExp4Scheme {
    base: BaseCurve,
    a: f64,
    b: f64,
}

/// Either double-exponential graph, keyed by whether the two finite
/// parameters coincide.
pub fn double_exp_scheme(a: SphereValue, b: SphereValue) -> Result<Box<dyn GraphScheme>> {
    let ar = real_of(a, "a")?;
    let br = real_of(b, "b")?;
    if ar == br {
        if ar >= 1.0 {
            return Err(Error::Family(format!(
                "degenerate parameter {ar}: need a < 1 so the labels a, 1, inf stay distinct and ordered"
            )));
        }
        let base = BaseCurve::in_order(vec![
            SphereValue::real(ar),
            SphereValue::real(1.0),
            SphereValue::Infinity,
        ])?;
        return Ok(Box::new(DoubleExp3Scheme { base, a: ar }));
    }
    if !(ar < br && br < 1.0) {
        return Err(Error::Family(format!(
            "labels must satisfy a < b < 1 on the real line, got a={ar}, b={br}"
        )));
    }
    let base = BaseCurve::in_order(vec![
        SphereValue::real(ar),
        SphereValue::real(br),
        SphereValue::real(1.0),
        SphereValue::Infinity,
    ])?;
    Ok(Box::new(DoubleExp4Scheme { base, a: ar, b: br }))
}

impl GraphScheme for DoubleExp3Scheme {
    fn root(&self) -> VertexId {
        pack(1, 0)
    }

    fn base(&self) -> &BaseCurve {
        &self.base
    }

    fn meta(&self) -> SchemeMeta {
        SchemeMeta {
            name: "double-exp".into(),
            params: vec![
                ("a".into(), format!("{}", self.a)),
                ("formula".into(), format!("{}*(exp(exp(z)) - 1) + 1 with a = 1 - ({})", 1.0 - self.a, self.a)),
            ],
            conformal_type: Some(ConformalType::Parabolic),
        }
    }

    fn color(&self, v: VertexId) -> Color {
        grid_color(unpack(v).0)
    }

    fn slots(&self, v: VertexId) -> Vec<(u16, VertexId)> {
        let (j, n) = unpack(v);
        let t = |(j, n)| pack(j, n);
        if j % 2 == 0 {
            // circle rotation: types step downward 0, 2, 1
            vec![(0, t(s0_target(j, n))), (2, t(s2_target(j, n))), (1, t(s1_target(j, n)))]
        } else {
            vec![(0, t(s0_target(j, n))), (1, t(s1_target(j, n))), (2, t(s2_target(j, n)))]
        }
    }
}

impl GraphScheme for DoubleExp4Scheme {
    fn root(&self) -> VertexId {
        pack(1, 0)
    }

    fn base(&self) -> &BaseCurve {
        &self.base
    }

    fn meta(&self) -> SchemeMeta {
        SchemeMeta {
            name: "double-exp-perturbed".into(),
            params: vec![
                ("a".into(), format!("{}", self.a)),
                ("b".into(), format!("{}", self.b)),
            ],
            conformal_type: Some(ConformalType::Parabolic),
        }
    }

    fn color(&self, v: VertexId) -> Color {
        grid_color(unpack(v).0)
    }

    fn slots(&self, v: VertexId) -> Vec<(u16, VertexId)> {
        let (j, n) = unpack(v);
        let t = |(j, n)| pack(j, n);
        // degree-3 rules shifted up one type slot; the matching is type 0
        if j % 2 == 0 {
            // circle rotation: 0, 3, 2, 1
            vec![
                (0, t(matching_target(j, n))),
                (3, t(s2_target(j, n))),
                (2, t(s1_target(j, n))),
                (1, t(s0_target(j, n))),
            ]
        } else {
            vec![
                (0, t(matching_target(j, n))),
                (1, t(s0_target(j, n))),
                (2, t(s1_target(j, n))),
                (3, t(s2_target(j, n))),
            ]
        }
    }
}

// ---- hyperbolic family ----

/// The cut-and-glue graph with labels {b, 1, inf}: a ladder half-plane
/// above the cut joined to a double-exponential half-plane below it.
/// Defined on the grid subset n <= -1, or n = 0 with j <= 1, or n >= 1
/// with j in {0, 1}; the cut height is adjustable via `shift`.
pub struct HyperbolicScheme {
    base: BaseCurve,
    b: f64,
    shift: i64,
}

pub fn hyperbolic_scheme(b: SphereValue) -> Result<HyperbolicScheme> {
    hyperbolic_scheme_shifted(b, 0)
}

pub fn hyperbolic_scheme_shifted(b: SphereValue, shift: i64) -> Result<HyperbolicScheme> {
    let br = real_of(b, "b")?;
    if br >= 1.0 {
        return Err(Error::Family(format!(
            "need b < 1 so the labels b, 1, inf stay distinct and ordered, got {br}"
        )));
    }
    let base = BaseCurve::in_order(vec![
        SphereValue::real(br),
        SphereValue::real(1.0),
        SphereValue::Infinity,
    ])?;
    Ok(HyperbolicScheme { base, b: br, shift })
}

impl HyperbolicScheme {
    fn in_set(&self, j: i64, n: i64) -> bool {
        let n = n - self.shift;
        n <= -1 || (n == 0 && j <= 1) || (n >= 1 && (j == 0 || j == 1))
    }
}

impl GraphScheme for HyperbolicScheme {
    fn root(&self) -> VertexId {
        pack(1, self.shift)
    }

    fn base(&self) -> &BaseCurve {
        &self.base
    }

    fn meta(&self) -> SchemeMeta {
        SchemeMeta {
            name: "hyperbolic".into(),
            params: vec![
                ("b".into(), format!("{}", self.b)),
                ("shift".into(), format!("{}", self.shift)),
            ],
            conformal_type: Some(ConformalType::Hyperbolic),
        }
    }

    fn color(&self, v: VertexId) -> Color {
        grid_color(unpack(v).0)
    }

    fn slots(&self, v: VertexId) -> Vec<(u16, VertexId)> {
        let (j, n0) = unpack(v);
        let n = n0 - self.shift;
        debug_assert!(self.in_set(j, n0), "query outside the vertex set");
        let t = |(j, n): (i64, i64)| pack(j, n + self.shift);
        let h0 = s0_target(j, n);
        let h1 = s1_target(j, n);
        let h2 = matching_target(j, n);
        if j % 2 == 0 {
            vec![(0, t(h0)), (2, t(h2)), (1, t(h1))]
        } else {
            vec![(0, t(h0)), (1, t(h1)), (2, t(h2))]
        }
    }
}

// ---- binary tree diagnostic ----

/// Complete binary tree on heap indices (root 1, children 2v and 2v+1).
/// Not a Speiser graph (the root has degree 2); used only to exercise
/// the resistance diagnostics on a graph of bounded effective resistance.
pub struct BinaryTreeScheme {
    base: BaseCurve,
}

pub fn binary_tree_scheme() -> BinaryTreeScheme {
    let base = BaseCurve::in_order(vec![
        SphereValue::real(0.0),
        SphereValue::real(1.0),
        SphereValue::Infinity,
    ])
    .unwrap();
    BinaryTreeScheme { base }
}

impl BinaryTreeScheme {
    fn depth(v: VertexId) -> u32 {
        63 - v.leading_zeros()
    }

    // edge type joining v to its parent: walk the heap path from the top
    fn parent_type(v: VertexId) -> u16 {
        let d = Self::depth(v);
        let mut p: Option<u16> = None;
        for level in (0..d).rev() {
            let bit = ((v >> level) & 1) as u16;
            p = Some(match p {
                None => bit,
                Some(q) => (q + 1 + bit) % 3,
            });
        }
        p.unwrap_or(0)
    }
}

impl GraphScheme for BinaryTreeScheme {
    fn root(&self) -> VertexId {
        1
    }

    fn base(&self) -> &BaseCurve {
        &self.base
    }

    fn meta(&self) -> SchemeMeta {
        SchemeMeta {
            name: "binary-tree".into(),
            params: vec![("note".into(), "diagnostic input, not a line complex".into())],
            conformal_type: None,
        }
    }

    fn color(&self, v: VertexId) -> Color {
        if Self::depth(v) % 2 == 0 {
            Color::Cross
        } else {
            Color::Circle
        }
    }

    fn slots(&self, v: VertexId) -> Vec<(u16, VertexId)> {
        if v == 1 {
            return vec![(0, 2), (1, 3)];
        }
        let p = Self::parent_type(v);
        let left = ((p + 1) % 3, 2 * v);
        let right = ((p + 2) % 3, 2 * v + 1);
        if self.color(v) == Color::Cross {
            vec![(p, v / 2), left, right]
        } else {
            vec![(p, v / 2), right, left]
        }
    }
}

// ---- family selector ----

/// Which catalog family, with its label parameters. The conformal type
/// here is asserted by the literature, not computed.
#[derive(Clone, Debug)]
pub enum FamilySpec {
    ExpPlusOne,
    DoubleExpPerturbed { a: SphereValue, b: SphereValue },
    HyperbolicSb { b: SphereValue },
}

impl FamilySpec {
    pub fn conformal_type(&self) -> ConformalType {
        match self {
            FamilySpec::ExpPlusOne => ConformalType::Parabolic,
            FamilySpec::DoubleExpPerturbed { .. } => ConformalType::Parabolic,
            FamilySpec::HyperbolicSb { .. } => ConformalType::Hyperbolic,
        }
    }

    pub fn scheme(&self) -> Result<Box<dyn GraphScheme>> {
        match self {
            FamilySpec::ExpPlusOne => Ok(Box::new(exp_scheme())),
            FamilySpec::DoubleExpPerturbed { a, b } => double_exp_scheme(*a, *b),
            FamilySpec::HyperbolicSb { b } => Ok(Box::new(hyperbolic_scheme(*b)?)),
        }
    }

    /// Resolve a CLI-style name plus optional parameters.
    pub fn from_cli(name: &str, a: Option<SphereValue>, b: Option<SphereValue>) -> Result<FamilySpec> {
        match name {
            "exp" => Ok(FamilySpec::ExpPlusOne),
            "dexp" => {
                let a = a.ok_or_else(|| Error::Family("dexp needs --a".into()))?;
                let b = b.unwrap_or(a);
                Ok(FamilySpec::DoubleExpPerturbed { a, b })
            }
            "hyp" => {
                let b = b
                    .or(a)
                    .ok_or_else(|| Error::Family("hyp needs --b".into()))?;
                Ok(FamilySpec::HyperbolicSb { b })
            }
            "tree" => Err(Error::Family(
                "the binary tree is a resistance diagnostic, not a family; use the resistance/walk commands".into(),
            )),
            other => Err(Error::Family(format!("unknown family `{other}` (expected exp, dexp, or hyp)"))),
        }
    }
}
