use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{PatchBuilder, SpeiserPatch, VertexId};
use crate::sphere::BaseCurve;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConformalType {
    Parabolic,
    Hyperbolic,
}

impl std::fmt::Display for ConformalType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConformalType::Parabolic => write!(f, "Parabolic"),
            ConformalType::Hyperbolic => write!(f, "Hyperbolic"),
        }
    }
}

/// Descriptive metadata carried by a scheme: family name, parameters,
/// and the literature-asserted conformal type when one is known. The
/// type is never computed here.
#[derive(Clone, Debug, Default)]
pub struct SchemeMeta {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub conformal_type: Option<ConformalType>,
}

/// A lazy, deterministic generator of an infinite (or large) graph:
/// a root plus a neighbor oracle. Slot lists are in counterclockwise
/// rotation order; identical queries must return identical answers.
pub trait GraphScheme {
    fn root(&self) -> VertexId;
    fn base(&self) -> &BaseCurve;
    fn meta(&self) -> SchemeMeta;
    fn color(&self, v: VertexId) -> crate::graph::Color;
    /// (edge type, neighbor) in rotation order.
    fn slots(&self, v: VertexId) -> Vec<(u16, VertexId)>;

    fn degree(&self) -> usize {
        self.base().k()
    }
}

/// The ball of the given radius around the scheme's root, as a patch.
/// Slots of rim vertices that would leave the ball become dangling
/// half-edges; a vertex is boundary-flagged iff it has one.
pub fn ball(scheme: &dyn GraphScheme, radius: usize, budget: usize) -> Result<SpeiserPatch> {
    let root = scheme.root();
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
                if dist.len() >= budget {
                    return Err(Error::BudgetExceeded { budget, radius });
                }
                dist.insert(u, d + 1);
                queue.push_back(u);
            }
        }
    }
    let mut b = PatchBuilder::new(scheme.base().clone());
    b.root(root);
    for &v in dist.keys() {
        let slots = scheme
            .slots(v)
            .into_iter()
            .map(|(t, u)| (t, if dist.contains_key(&u) { Some(u) } else { None }))
            .collect();
        b.vertex(v, scheme.color(v), slots);
    }
    b.build()
}
