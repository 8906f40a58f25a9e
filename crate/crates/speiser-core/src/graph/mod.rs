pub mod canonical;
pub mod distance;
pub mod dot;
pub mod embed;
pub mod faces;
pub mod scheme;
pub mod spg;
pub mod validate;

pub use canonical::{canonical_code, rooted_isomorphic, RootedCode};
pub use distance::{distances_from, graph_distance};
pub use embed::{isometric_embed, EmbedReport};
pub use faces::{faces, Face};
pub use scheme::{ball, ConformalType, GraphScheme, SchemeMeta};
pub use validate::{validate, ValidationReport};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sphere::BaseCurve;

pub type VertexId = u64;
pub type HalfEdgeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Color {
    Cross,
    Circle,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Cross => Color::Circle,
            Color::Circle => Color::Cross,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Twin {
    Half(HalfEdgeId),
    Dangling,
}

#[derive(Clone, Debug)]
pub struct HalfEdgeData {
    pub owner: VertexId,
    pub etype: u16,
    pub twin: Twin,
}

#[derive(Clone, Debug)]
pub struct VertexData {
    pub color: Color,
    /// Incident half-edges in counterclockwise rotation order.
    pub rotation: Vec<HalfEdgeId>,
    pub boundary: bool,
}

/// A finite truncation of a labeled Speiser graph: a rotation system
/// with typed half-edges, a base curve supplying the face labels, and
/// a marked root. Dangling half-edges mark where truncation cut edges.
#[derive(Clone, Debug)]
pub struct SpeiserPatch {
    pub base: BaseCurve,
    pub root: VertexId,
    pub vertices: BTreeMap<VertexId, VertexData>,
    pub half_edges: Vec<HalfEdgeData>,
}

impl SpeiserPatch {
    pub fn k(&self) -> usize {
        self.base.k()
    }

    pub fn vertex(&self, v: VertexId) -> Result<&VertexData> {
        self.vertices.get(&v).ok_or(Error::UnknownVertex(v))
    }

    pub fn half(&self, h: HalfEdgeId) -> &HalfEdgeData {
        &self.half_edges[h as usize]
    }

    /// Owner of the twin half-edge, if any.
    pub fn other_end(&self, h: HalfEdgeId) -> Option<VertexId> {
        match self.half(h).twin {
            Twin::Half(t) => Some(self.half(t).owner),
            Twin::Dangling => None,
        }
    }

    /// Distinct neighbor vertex ids (parallel edges collapsed).
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>> {
        let vd = self.vertex(v)?;
        let mut out = Vec::new();
        for &h in &vd.rotation {
            if let Some(u) = self.other_end(h) {
                if !out.contains(&u) {
                    out.push(u);
                }
            }
        }
        Ok(out)
    }

    fn rot_pos(&self, h: HalfEdgeId) -> usize {
        let rot = &self.vertices[&self.half(h).owner].rotation;
        rot.iter().position(|&x| x == h).expect("half-edge missing from owner rotation")
    }

    pub fn rot_next(&self, h: HalfEdgeId) -> HalfEdgeId {
        let rot = &self.vertices[&self.half(h).owner].rotation;
        rot[(self.rot_pos(h) + 1) % rot.len()]
    }

    pub fn rot_prev(&self, h: HalfEdgeId) -> HalfEdgeId {
        let rot = &self.vertices[&self.half(h).owner].rotation;
        rot[(self.rot_pos(h) + rot.len() - 1) % rot.len()]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of realized (twinned) edges.
    pub fn edge_count(&self) -> usize {
        self.half_edges.iter().filter(|h| matches!(h.twin, Twin::Half(_))).count() / 2
    }
}

/// Assembles a patch from per-vertex slot lists. Each slot is
/// (edge type, Some(neighbor) | None for dangling), in rotation order.
/// Twins are paired by (endpoint pair, type): both sides must declare
/// the edge, and a pair can carry at most one edge per type.
pub struct PatchBuilder {
    base: BaseCurve,
    root: Option<VertexId>,
    verts: BTreeMap<VertexId, (Color, Vec<(u16, Option<VertexId>)>)>,
}

impl PatchBuilder {
    pub fn new(base: BaseCurve) -> PatchBuilder {
        PatchBuilder { base, root: None, verts: BTreeMap::new() }
    }

    pub fn root(&mut self, v: VertexId) -> &mut Self {
        self.root = Some(v);
        self
    }

    pub fn vertex(
        &mut self,
        id: VertexId,
        color: Color,
        slots: Vec<(u16, Option<VertexId>)>,
    ) -> &mut Self {
        self.verts.insert(id, (color, slots));
        self
    }

    pub fn build(self) -> Result<SpeiserPatch> {
        let root = self
            .root
            .ok_or_else(|| Error::InvalidPatch("no root set".into()))?;
        if !self.verts.contains_key(&root) {
            return Err(Error::InvalidPatch(format!("root {} is not a vertex", root)));
        }
        let mut vertices: BTreeMap<VertexId, VertexData> = BTreeMap::new();
        let mut half_edges: Vec<HalfEdgeData> = Vec::new();
        // (low, high, type) -> half-edges declared for that edge
        let mut pairs: BTreeMap<(VertexId, VertexId, u16), Vec<HalfEdgeId>> = BTreeMap::new();

        for (&v, (color, slots)) in &self.verts {
            let mut rotation = Vec::with_capacity(slots.len());
            let mut boundary = false;
            for &(etype, target) in slots {
                if etype as usize >= self.base.k() {
                    return Err(Error::InvalidPatch(format!(
                        "vertex {}: edge type {} out of range for k={}",
                        v,
                        etype,
                        self.base.k()
                    )));
                }
                let h = half_edges.len() as HalfEdgeId;
                half_edges.push(HalfEdgeData { owner: v, etype, twin: Twin::Dangling });
                rotation.push(h);
                match target {
                    None => boundary = true,
                    Some(u) => {
                        if u == v {
                            return Err(Error::InvalidPatch(format!("self-loop at vertex {v}")));
                        }
                        if !self.verts.contains_key(&u) {
                            return Err(Error::InvalidPatch(format!(
                                "vertex {} references missing vertex {}",
                                v, u
                            )));
                        }
                        let key = (v.min(u), v.max(u), etype);
                        pairs.entry(key).or_default().push(h);
                    }
                }
            }
            vertices.insert(v, VertexData { color: *color, rotation, boundary });
        }

        for ((a, b, t), halves) in pairs {
            if halves.len() != 2 {
                return Err(Error::InvalidPatch(format!(
                    "edge {}-{} type {} declared by {} slot(s), need exactly 2",
                    a,
                    b,
                    t,
                    halves.len()
                )));
            }
            let (h1, h2) = (halves[0], halves[1]);
            if half_edges[h1 as usize].owner == half_edges[h2 as usize].owner {
                return Err(Error::InvalidPatch(format!(
                    "edge {}-{} type {} declared twice by the same endpoint",
                    a, b, t
                )));
            }
            half_edges[h1 as usize].twin = Twin::Half(h2);
            half_edges[h2 as usize].twin = Twin::Half(h1);
        }

        Ok(SpeiserPatch { base: self.base, root, vertices, half_edges })
    }
}

/// Re-truncate a patch to the ball of the given radius around its root.
/// Boundary flags are recomputed: a vertex is boundary iff it ends up
/// with a dangling slot. Errors if the ball exceeds the vertex budget.
pub fn ball_of_patch(patch: &SpeiserPatch, radius: usize, budget: usize) -> Result<SpeiserPatch> {
    let dist = distance::bfs_layers(patch, patch.root, Some(radius));
    if dist.len() > budget {
        return Err(Error::BudgetExceeded { budget, radius });
    }
    let mut b = PatchBuilder::new(patch.base.clone());
    b.root(patch.root);
    for (&v, &_d) in &dist {
        let vd = &patch.vertices[&v];
        let slots = vd
            .rotation
            .iter()
            .map(|&h| {
                let hd = patch.half(h);
                let target = patch.other_end(h).filter(|u| dist.contains_key(u));
                (hd.etype, target)
            })
            .collect();
        b.vertex(v, vd.color, slots);
    }
    b.build()
}
