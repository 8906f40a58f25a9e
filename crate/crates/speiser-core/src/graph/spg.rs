//! Plain-text patch format.
//!
//! ```text
//! spg 1
//! k 2
//! labels 1 inf
//! base 1 inf
//! root 0
//! vertex 0 cross 0 1
//! vertex 1 circle 2 3 boundary
//! halfedge 0 type 0 twin 2
//! halfedge 2 type 0 twin 0
//! ...
//! ```
//!
//! `base` fixes the cyclic order of the labels; `labels` lists the same
//! values for display. Vertex lines give half-edge ids in rotation order.
//! Lines starting with `#` and blank lines are ignored.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::validate::validate;
use crate::graph::{Color, HalfEdgeData, HalfEdgeId, SpeiserPatch, Twin, VertexData, VertexId};
use crate::sphere::{BaseCurve, SphereValue};

pub fn write_spg(patch: &SpeiserPatch) -> String {
    let mut out = String::new();
    out.push_str("spg 1\n");
    out.push_str(&format!("k {}\n", patch.k()));
    let labels: Vec<String> = patch.base.entries().iter().map(|v| v.to_string()).collect();
    out.push_str(&format!("labels {}\n", labels.join(" ")));
    out.push_str(&format!("base {}\n", labels.join(" ")));
    out.push_str(&format!("root {}\n", patch.root));
    for (&vid, vd) in &patch.vertices {
        let color = match vd.color {
            Color::Cross => "cross",
            Color::Circle => "circle",
        };
        let rot: Vec<String> = vd.rotation.iter().map(|h| h.to_string()).collect();
        let flag = if vd.boundary { " boundary" } else { "" };
        out.push_str(&format!("vertex {} {} {}{}\n", vid, color, rot.join(" "), flag));
    }
    for (id, h) in patch.half_edges.iter().enumerate() {
        let twin = match h.twin {
            Twin::Half(t) => t.to_string(),
            Twin::Dangling => "dangling".into(),
        };
        out.push_str(&format!("halfedge {} type {} twin {}\n", id, h.etype, twin));
    }
    out
}

pub fn write_spg_file(path: &std::path::Path, patch: &SpeiserPatch) -> Result<()> {
    std::fs::write(path, write_spg(patch))?;
    Ok(())
}

pub fn read_spg_file(path: &std::path::Path) -> Result<SpeiserPatch> {
    read_spg(&std::fs::read_to_string(path)?)
}

struct RawVertex {
    color: Color,
    rotation: Vec<HalfEdgeId>,
    boundary: bool,
    line: usize,
}

struct RawHalf {
    etype: u16,
    twin: Option<HalfEdgeId>,
    line: usize,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn read_spg(text: &str) -> Result<SpeiserPatch> {
    let mut k: Option<(usize, usize)> = None;
    let mut labels: Option<(Vec<SphereValue>, usize)> = None;
    let mut base: Option<(Vec<SphereValue>, usize)> = None;
    let mut root: Option<(VertexId, usize)> = None;
    let mut verts: BTreeMap<VertexId, RawVertex> = BTreeMap::new();
    let mut halves: BTreeMap<HalfEdgeId, RawHalf> = BTreeMap::new();
    let mut saw_magic = false;

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if !saw_magic {
            if toks != ["spg", "1"] {
                return Err(err(ln, "expected header `spg 1`"));
            }
            saw_magic = true;
            continue;
        }
        match toks[0] {
            "k" => {
                if k.is_some() {
                    return Err(err(ln, "duplicate k line"));
                }
                let v: usize = toks
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(ln, "k needs an integer"))?;
                k = Some((v, ln));
            }
            "labels" | "base" => {
                let mut vals = Vec::new();
                for t in &toks[1..] {
                    vals.push(SphereValue::parse(t).map_err(|_| err(ln, format!("cannot parse value `{t}`")))?);
                }
                let slot = if toks[0] == "labels" { &mut labels } else { &mut base };
                if slot.is_some() {
                    return Err(err(ln, format!("duplicate {} line", toks[0])));
                }
                *slot = Some((vals, ln));
            }
            "root" => {
                if root.is_some() {
                    return Err(err(ln, "duplicate root line"));
                }
                let v: VertexId = toks
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(ln, "root needs a vertex id"))?;
                root = Some((v, ln));
            }
            "vertex" => {
                let vid: VertexId = toks
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(ln, "vertex needs an id"))?;
                let color = match toks.get(2) {
                    Some(&"cross") => Color::Cross,
                    Some(&"circle") => Color::Circle,
                    _ => return Err(err(ln, "vertex color must be cross or circle")),
                };
                let mut rotation = Vec::new();
                let mut boundary = false;
                for (i, t) in toks[3..].iter().enumerate() {
                    if *t == "boundary" {
                        if i + 4 != toks.len() {
                            return Err(err(ln, "boundary flag must come last"));
                        }
                        boundary = true;
                    } else {
                        let h: HalfEdgeId =
                            t.parse().map_err(|_| err(ln, format!("bad half-edge id `{t}`")))?;
                        rotation.push(h);
                    }
                }
                if verts
                    .insert(vid, RawVertex { color, rotation, boundary, line: ln })
                    .is_some()
                {
                    return Err(err(ln, format!("duplicate vertex {vid}")));
                }
            }
            "halfedge" => {
                if toks.len() != 6 || toks[2] != "type" || toks[4] != "twin" {
                    return Err(err(ln, "expected `halfedge <id> type <t> twin <id|dangling>`"));
                }
                let hid: HalfEdgeId =
                    toks[1].parse().map_err(|_| err(ln, "bad half-edge id"))?;
                let etype: u16 = toks[3].parse().map_err(|_| err(ln, "bad edge type"))?;
                let twin = if toks[5] == "dangling" {
                    None
                } else {
                    Some(toks[5].parse().map_err(|_| err(ln, "bad twin id"))?)
                };
                if halves
                    .insert(hid, RawHalf { etype, twin, line: ln })
                    .is_some()
                {
                    return Err(err(ln, format!("duplicate halfedge {hid}")));
                }
            }
            other => return Err(err(ln, format!("unknown directive `{other}`"))),
        }
    }

    if !saw_magic {
        return Err(err(1, "empty file, expected header `spg 1`"));
    }
    let (k, k_line) = k.ok_or_else(|| err(1, "missing k line"))?;
    let (labels, labels_line) = labels.ok_or_else(|| err(1, "missing labels line"))?;
    let (base_vals, base_line) = base.ok_or_else(|| err(1, "missing base line"))?;
    let (root, root_line) = root.ok_or_else(|| err(1, "missing root line"))?;

    if labels.len() != k {
        return Err(err(labels_line, format!("expected {k} labels, got {}", labels.len())));
    }
    let sort_key = |vs: &[SphereValue]| {
        let mut ks: Vec<_> = vs.iter().map(|v| v.key()).collect();
        ks.sort();
        ks
    };
    if sort_key(&labels) != sort_key(&base_vals) {
        return Err(err(base_line, "base line must list the same values as the labels line"));
    }
    let base = BaseCurve::from_entries(base_vals).map_err(|e| err(base_line, e.to_string()))?;
    if base.k() != k {
        return Err(err(k_line, format!("k = {k} does not match the {} base entries", base.k())));
    }
    if !verts.contains_key(&root) {
        return Err(err(root_line, format!("root vertex {root} is not defined")));
    }

    // remap file half-edge ids onto dense indices
    let ids: Vec<HalfEdgeId> = halves.keys().copied().collect();
    let dense: BTreeMap<HalfEdgeId, HalfEdgeId> = ids
        .iter()
        .enumerate()
        .map(|(i, &h)| (h, i as HalfEdgeId))
        .collect();

    let mut owners: BTreeMap<HalfEdgeId, VertexId> = BTreeMap::new();
    for (&vid, rv) in &verts {
        for &h in &rv.rotation {
            if !halves.contains_key(&h) {
                return Err(err(rv.line, format!("rotation refers to undefined halfedge {h}")));
            }
            if owners.insert(h, vid).is_some() {
                return Err(err(rv.line, format!("halfedge {h} appears in two rotations")));
            }
        }
    }

    let mut half_edges = Vec::with_capacity(ids.len());
    for &hid in &ids {
        let rh = &halves[&hid];
        let owner = *owners
            .get(&hid)
            .ok_or_else(|| err(rh.line, format!("halfedge {hid} belongs to no vertex rotation")))?;
        if rh.etype as usize >= k {
            return Err(err(rh.line, format!("edge type {} out of range (k = {k})", rh.etype)));
        }
        let twin = match rh.twin {
            None => Twin::Dangling,
            Some(t) => {
                if t == hid {
                    return Err(err(rh.line, "halfedge is its own twin"));
                }
                let other = halves
                    .get(&t)
                    .ok_or_else(|| err(rh.line, format!("twin {t} is not defined")))?;
                if other.twin != Some(hid) {
                    return Err(err(rh.line, format!("twin of {hid} is {t} but not vice versa")));
                }
                Twin::Half(dense[&t])
            }
        };
        half_edges.push(HalfEdgeData { owner, etype: rh.etype, twin });
    }

    let mut vertices = BTreeMap::new();
    for (vid, rv) in verts {
        let rotation: Vec<HalfEdgeId> = rv.rotation.iter().map(|h| dense[h]).collect();
        let has_dangling = rotation
            .iter()
            .any(|&h| half_edges[h as usize].twin == Twin::Dangling);
        if rv.boundary != has_dangling {
            return Err(err(
                rv.line,
                format!(
                    "vertex {vid} {} dangling slots, so the boundary flag must be {}",
                    if has_dangling { "has" } else { "has no" },
                    if has_dangling { "set" } else { "absent" }
                ),
            ));
        }
        vertices.insert(vid, VertexData { color: rv.color, rotation, boundary: rv.boundary });
    }

    let patch = SpeiserPatch { base, root, vertices, half_edges };
    let report = validate(&patch);
    if !report.is_valid() {
        return Err(Error::InvalidFile(report.to_string()));
    }
    Ok(patch)
}
