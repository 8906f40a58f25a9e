//! Search for copies of a finite patch inside a lazily generated graph.
//!
//! Interior vertices of the host carry exactly one slot per edge type, so
//! once the root image is fixed the rest of the map is forced: follow each
//! real edge of the small patch through the matching typed slot of the
//! host. An attempt succeeds when colors match, the map stays injective,
//! every image lies within the search ball, and at each vertex the mapped
//! edge types appear in the same cyclic order as in the host rotation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::scheme::GraphScheme;
use crate::graph::{SpeiserPatch, Twin, VertexId};

pub struct EmbedReport {
    /// One map per embedding found: small vertex id -> host vertex id.
    pub embeddings: Vec<BTreeMap<VertexId, VertexId>>,
    /// Root candidates that matched by color but failed during propagation.
    pub partial_matches: usize,
}

/// Enumerate all embeddings of `small` into `host` whose images lie within
/// `search_radius` of the host root. `type_map` sends small edge types to
/// host edge types (identity when omitted).
pub fn isometric_embed(
    small: &SpeiserPatch,
    host: &dyn GraphScheme,
    search_radius: usize,
    type_map: Option<&[u16]>,
    budget: usize,
) -> Result<EmbedReport> {
    let host_k = host.base().k() as u16;
    let ident: Vec<u16> = (0..small.k() as u16).collect();
    let tmap = type_map.unwrap_or(&ident);
    if tmap.len() != small.k() {
        return Err(Error::BadLabelMap);
    }
    let mut seen = BTreeSet::new();
    for &t in tmap {
        if t >= host_k || !seen.insert(t) {
            return Err(Error::BadLabelMap);
        }
    }

    // collect the search ball of the host
    let mut ball: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    ball.insert(host.root(), 0);
    queue.push_back(host.root());
    while let Some(v) = queue.pop_front() {
        let d = ball[&v];
        if d == search_radius {
            continue;
        }
        for (_, w) in host.slots(v) {
            if !ball.contains_key(&w) {
                if ball.len() >= budget {
                    return Err(Error::BudgetExceeded { budget, radius: search_radius });
                }
                ball.insert(w, d + 1);
                queue.push_back(w);
            }
        }
    }

    let root_color = small.vertex(small.root)?.color;
    let mut embeddings = Vec::new();
    let mut partial_matches = 0;
    for (&cand, _) in ball.iter().filter(|(&v, _)| host.color(v) == root_color) {
        match try_from_root(small, host, tmap, &ball, cand) {
            Some(map) => embeddings.push(map),
            None => partial_matches += 1,
        }
    }
    Ok(EmbedReport { embeddings, partial_matches })
}

fn try_from_root(
    small: &SpeiserPatch,
    host: &dyn GraphScheme,
    tmap: &[u16],
    ball: &BTreeMap<VertexId, usize>,
    root_image: VertexId,
) -> Option<BTreeMap<VertexId, VertexId>> {
    let mut map: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut used: BTreeSet<VertexId> = BTreeSet::new();
    map.insert(small.root, root_image);
    used.insert(root_image);
    let mut queue = VecDeque::new();
    queue.push_back(small.root);

    while let Some(v) = queue.pop_front() {
        let x = map[&v];
        let host_slots = host.slots(x);
        // position and target of each host edge type at x
        let mut by_type: BTreeMap<u16, (usize, VertexId)> = BTreeMap::new();
        for (pos, &(t, w)) in host_slots.iter().enumerate() {
            if by_type.insert(t, (pos, w)).is_some() {
                return None; // host vertex with a repeated type cannot force the map
            }
        }

        let vd = small.vertex(v).ok()?;
        let mut positions = Vec::with_capacity(vd.rotation.len());
        for &he in &vd.rotation {
            let h = small.half(he);
            let mapped = *tmap.get(h.etype as usize)?;
            let &(pos, target) = by_type.get(&mapped)?;
            if positions.contains(&pos) {
                return None; // duplicate small type at one vertex
            }
            positions.push(pos);
            if let Twin::Half(tw) = h.twin {
                let u = small.half(tw).owner;
                match map.get(&u) {
                    Some(&y) => {
                        if y != target {
                            return None;
                        }
                    }
                    None => {
                        if !ball.contains_key(&target)
                            || host.color(target) != small.vertex(u).ok()?.color
                            || !used.insert(target)
                        {
                            return None;
                        }
                        map.insert(u, target);
                        queue.push_back(u);
                    }
                }
            }
        }
        // the mapped types must occur in the same cyclic order as the host
        // rotation: at most one wrap-around descent
        let descents = positions
            .iter()
            .zip(positions.iter().cycle().skip(1))
            .filter(|(a, b)| b < a)
            .count();
        if positions.len() > 1 && descents > 1 {
            return None;
        }
    }
    Some(map)
}
