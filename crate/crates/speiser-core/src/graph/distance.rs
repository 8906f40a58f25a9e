use std::collections::BTreeMap;
use std::collections::VecDeque;

use crate::error::Result;
use crate::graph::{SpeiserPatch, VertexId};

/// BFS distances from a start vertex, optionally capped at max_dist.
/// Parallel edges count once; danglings are not traversable.
pub fn bfs_layers(
    patch: &SpeiserPatch,
    start: VertexId,
    max_dist: Option<usize>,
) -> BTreeMap<VertexId, usize> {
    let mut dist = BTreeMap::new();
    if !patch.vertices.contains_key(&start) {
        return dist;
    }
    dist.insert(start, 0usize);
    let mut queue = VecDeque::new();
    queue.push_back(start);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if let Some(cap) = max_dist {
            if d == cap {
                continue;
            }
        }
        for u in patch.neighbors(v).expect("vertex vanished during BFS") {
            if !dist.contains_key(&u) {
                dist.insert(u, d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Shortest-path distance in the simple-graph reduction (parallel edges
/// identified). None when unreachable.
pub fn graph_distance(patch: &SpeiserPatch, u: VertexId, v: VertexId) -> Result<Option<usize>> {
    patch.vertex(u)?;
    patch.vertex(v)?;
    if u == v {
        return Ok(Some(0));
    }
    Ok(bfs_layers(patch, u, None).get(&v).copied())
}

/// All distances from a vertex (used by rim contraction and embeddings).
pub fn distances_from(patch: &SpeiserPatch, v: VertexId) -> Result<BTreeMap<VertexId, usize>> {
    patch.vertex(v)?;
    Ok(bfs_layers(patch, v, None))
}
