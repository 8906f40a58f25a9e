//! Label collision: slide one base point into another along the arc
//! joining them. Combinatorially this deletes every edge of the arc's
//! type, drops the moving label from the base curve, and renumbers the
//! surviving edge types; the graph is then restricted to the component
//! of the root.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{Color, GraphScheme, SchemeMeta, SpeiserPatch, Twin, VertexId};
use crate::sphere::{BaseCurve, SphereValue};

#[derive(Clone, Copy, Debug)]
pub struct CollisionSpec {
    /// label that moves
    pub moving: SphereValue,
    /// label it is pushed into; must be adjacent along the base curve
    pub target: SphereValue,
}

impl std::fmt::Display for CollisionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} -> {}", self.moving, self.target)
    }
}

/// The edge types whose arcs run between two given labels.
pub fn edge_types_between(base: &BaseCurve, x: SphereValue, y: SphereValue) -> Vec<u16> {
    let k = base.k();
    (0..k)
        .filter(|&j| {
            let a = base.entry(j);
            let b = base.entry(j + 1);
            (a == x && b == y) || (a == y && b == x)
        })
        .map(|j| j as u16)
        .collect()
}

struct CollisionPlan {
    deleted: u16,
    // old surviving type -> new type
    renumber: Vec<Option<u16>>,
    new_base: BaseCurve,
}

fn plan(base: &BaseCurve, spec: CollisionSpec) -> Result<CollisionPlan> {
    if spec.moving == spec.target {
        return Err(Error::Collision(format!("{} cannot collide with itself", spec.moving)));
    }
    if base.k() <= 2 {
        return Err(Error::Collision(
            "base curve has only 2 points; colliding them leaves no curve".into(),
        ));
    }
    for v in [spec.moving, spec.target] {
        if base.index_of(v).is_none() {
            return Err(Error::Collision(format!("{v} is not on the base curve")));
        }
    }
    let arcs = edge_types_between(base, spec.moving, spec.target);
    let deleted = match arcs.as_slice() {
        [] => {
            return Err(Error::Collision(format!(
                "{} and {} are not adjacent on the base curve",
                spec.moving, spec.target
            )))
        }
        [one] => *one,
        _ => {
            return Err(Error::Collision(format!(
                "{} and {} bound more than one arc",
                spec.moving, spec.target
            )))
        }
    };
    let new_base = base.without(spec.moving)?;
    let mut renumber = vec![None; base.k()];
    for t in 0..base.k() {
        if t as u16 == deleted {
            continue;
        }
        // an arc keeps the identity of its starting label, with the
        // moving label standing in for its destination
        let start = base.entry(t);
        let mapped = if start == spec.moving { spec.target } else { start };
        let idx = new_base
            .index_of(mapped)
            .ok_or_else(|| Error::Collision(format!("{mapped} lost from the base curve")))?;
        renumber[t] = Some(idx as u16);
    }
    Ok(CollisionPlan { deleted, renumber, new_base })
}

/// Lazily collided view of a generator: surviving slots only, renumbered.
/// Walks from the root stay inside the root component automatically.
pub struct CollidedScheme<'a> {
    inner: &'a dyn GraphScheme,
    spec: CollisionSpec,
    plan: CollisionPlan,
}

pub fn collide_scheme<'a>(
    inner: &'a dyn GraphScheme,
    spec: CollisionSpec,
) -> Result<CollidedScheme<'a>> {
    let plan = plan(inner.base(), spec)?;
    Ok(CollidedScheme { inner, spec, plan })
}

impl GraphScheme for CollidedScheme<'_> {
    fn root(&self) -> VertexId {
        self.inner.root()
    }

    fn base(&self) -> &BaseCurve {
        &self.plan.new_base
    }

    fn meta(&self) -> SchemeMeta {
        let inner = self.inner.meta();
        let mut params = inner.params;
        params.push(("collide".into(), self.spec.to_string()));
        SchemeMeta { name: format!("{}-collided", inner.name), params, conformal_type: None }
    }

    fn color(&self, v: VertexId) -> Color {
        self.inner.color(v)
    }

    fn slots(&self, v: VertexId) -> Vec<(u16, VertexId)> {
        self.inner
            .slots(v)
            .into_iter()
            .filter_map(|(t, w)| self.plan.renumber.get(t as usize).copied().flatten().map(|nt| (nt, w)))
            .collect()
    }
}

/// Collide the labels of a finite patch. Edges of the deleted type are
/// removed (dangling stubs included), the rest are renumbered, and only
/// the root's component is kept. Errors out if the collision cuts the
/// root off from every surviving edge while other edges remain.
pub fn collide_patch(patch: &SpeiserPatch, spec: CollisionSpec) -> Result<SpeiserPatch> {
    let plan = plan(&patch.base, spec)?;

    // component of the root over surviving edges
    let mut keep: BTreeSet<VertexId> = BTreeSet::new();
    let mut queue = VecDeque::new();
    keep.insert(patch.root);
    queue.push_back(patch.root);
    while let Some(v) = queue.pop_front() {
        for &he in &patch.vertex(v)?.rotation {
            let h = patch.half(he);
            if h.etype == plan.deleted {
                continue;
            }
            if let Twin::Half(t) = h.twin {
                let u = patch.half(t).owner;
                if keep.insert(u) {
                    queue.push_back(u);
                }
            }
        }
    }

    let surviving_edges_somewhere = patch
        .half_edges
        .iter()
        .any(|h| h.etype != plan.deleted && matches!(h.twin, Twin::Half(_)));
    let root_has_edge = patch.vertex(patch.root)?.rotation.iter().any(|&he| {
        let h = patch.half(he);
        h.etype != plan.deleted && matches!(h.twin, Twin::Half(_))
    });
    if surviving_edges_somewhere && !root_has_edge {
        return Err(Error::Collision(
            "collision separates the root from every surviving edge".into(),
        ));
    }

    let mut out = crate::graph::PatchBuilder::new(plan.new_base);
    out.root(patch.root);
    for (&vid, vd) in &patch.vertices {
        if !keep.contains(&vid) {
            continue;
        }
        let mut slots = Vec::new();
        for &he in &vd.rotation {
            let h = patch.half(he);
            let Some(nt) = plan.renumber[h.etype as usize] else { continue };
            let target = match h.twin {
                Twin::Dangling => None,
                Twin::Half(t) => Some(patch.half(t).owner),
            };
            slots.push((nt, target));
        }
        out.vertex(vid, vd.color, slots);
    }
    out.build()
}
