//! Graphviz rendering of a patch: boxes for crosses, circles for circles,
//! one undirected edge per twin pair labeled with its type, dotted stubs
//! for dangling slots, and the face census as comments.

use crate::graph::faces::faces;
use crate::graph::{Color, SpeiserPatch, Twin};

pub fn to_dot(patch: &SpeiserPatch) -> String {
    let mut out = String::new();
    out.push_str("graph patch {\n");
    out.push_str("  layout=neato;\n  overlap=false;\n");
    for (i, f) in faces(patch).iter().enumerate() {
        let label = match f.label {
            Some(idx) => patch
                .base
                .entries()
                .get(idx)
                .map(|v| v.to_string())
                .unwrap_or_else(|| "?".into()),
            None => "?".into(),
        };
        let kind = if f.closed { "closed" } else { "open" };
        out.push_str(&format!(
            "  // face {i}: label {label}, {kind}, {} half-edges\n",
            f.halves.len()
        ));
    }
    for (&vid, vd) in &patch.vertices {
        let shape = match vd.color {
            Color::Cross => "box",
            Color::Circle => "circle",
        };
        let extra = if vid == patch.root { ", peripheries=2" } else { "" };
        out.push_str(&format!("  v{vid} [shape={shape}, label=\"{vid}\"{extra}];\n"));
    }
    let mut stub = 0usize;
    for (id, h) in patch.half_edges.iter().enumerate() {
        match h.twin {
            Twin::Half(t) => {
                if (id as u32) < t {
                    let u = h.owner;
                    let v = patch.half_edges[t as usize].owner;
                    out.push_str(&format!("  v{u} -- v{v} [label=\"{}\"];\n", h.etype));
                }
            }
            Twin::Dangling => {
                out.push_str(&format!(
                    "  d{stub} [shape=point, style=invis];\n  v{} -- d{stub} [label=\"{}\", style=dotted];\n",
                    h.owner, h.etype
                ));
                stub += 1;
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::exp_scheme;
    use crate::graph::scheme::ball;

    #[test]
    fn dot_output_mentions_every_vertex_and_edge() {
        let s = exp_scheme();
        let p = ball(&s, 2, 10_000).unwrap();
        let dot = to_dot(&p);
        assert!(dot.starts_with("graph patch {"));
        for &vid in p.vertices.keys() {
            assert!(dot.contains(&format!("v{vid} [shape=")));
        }
        // 4 real edges and 2 dangling stubs in the radius-2 path
        assert_eq!(dot.matches("--").count(), 6);
        assert_eq!(dot.matches("style=dotted").count(), 2);
        assert!(dot.contains("// face"));
        assert!(dot.contains("peripheries=2"));
    }
}
