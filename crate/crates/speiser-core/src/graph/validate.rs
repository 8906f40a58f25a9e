use std::collections::BTreeMap;
use std::fmt;

use crate::graph::{faces, Color, SpeiserPatch, Twin};

/// Every invariant violation found, as human-readable entries naming
/// the offending vertex or half-edge. Empty report = valid patch.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "valid")
        } else {
            for v in &self.violations {
                writeln!(f, "{}", v)?;
            }
            Ok(())
        }
    }
}

pub fn validate(patch: &SpeiserPatch) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let k = patch.k();
    let mut structural_ok = true;
    let bad = |rep: &mut ValidationReport, ok: &mut bool, msg: String| {
        rep.violations.push(msg);
        *ok = false;
    };

    // ownership: every half-edge sits in exactly one rotation, its owner's
    let mut seen_in: BTreeMap<u32, u64> = BTreeMap::new();
    for (&v, vd) in &patch.vertices {
        for &h in &vd.rotation {
            if h as usize >= patch.half_edges.len() {
                bad(&mut rep, &mut structural_ok, format!("vertex {v}: rotation references missing half-edge {h}"));
                continue;
            }
            if let Some(prev) = seen_in.insert(h, v) {
                bad(&mut rep, &mut structural_ok, format!("half-edge {h} appears in rotations of both {prev} and {v}"));
            }
            if patch.half(h).owner != v {
                bad(&mut rep, &mut structural_ok, format!("half-edge {h} owned by {} but listed at {v}", patch.half(h).owner));
            }
        }
    }
    for (h, hd) in patch.half_edges.iter().enumerate() {
        if !seen_in.contains_key(&(h as u32)) {
            bad(&mut rep, &mut structural_ok, format!("half-edge {h} missing from every rotation"));
        }
        if hd.etype as usize >= k {
            bad(&mut rep, &mut structural_ok, format!("half-edge {h}: type {} out of range for k={k}", hd.etype));
        }
        if !patch.vertices.contains_key(&hd.owner) {
            bad(&mut rep, &mut structural_ok, format!("half-edge {h}: owner {} is not a vertex", hd.owner));
        }
    }

    // twins: involution without fixed points, matching types, bipartite ends
    for (h, hd) in patch.half_edges.iter().enumerate() {
        let h = h as u32;
        let t = match hd.twin {
            Twin::Dangling => continue,
            Twin::Half(t) => t,
        };
        if t as usize >= patch.half_edges.len() {
            bad(&mut rep, &mut structural_ok, format!("half-edge {h}: twin {t} does not exist"));
            continue;
        }
        if t == h {
            bad(&mut rep, &mut structural_ok, format!("half-edge {h} is its own twin"));
            continue;
        }
        let td = patch.half(t);
        if td.twin != Twin::Half(h) {
            bad(&mut rep, &mut structural_ok, format!("half-edges {h} and {t}: twin relation not mutual"));
        }
        if td.etype != hd.etype {
            bad(&mut rep, &mut structural_ok, format!("half-edges {h} and {t}: twin types differ ({} vs {})", hd.etype, td.etype));
        }
        if h < t {
            let (a, b) = (hd.owner, td.owner);
            if let (Some(va), Some(vb)) = (patch.vertices.get(&a), patch.vertices.get(&b)) {
                if va.color == vb.color {
                    rep.violations.push(format!(
                        "edge {h}-{t} joins two {} vertices {a} and {b} (not bipartite)",
                        match va.color {
                            Color::Cross => "cross",
                            Color::Circle => "circle",
                        }
                    ));
                }
            }
        }
    }

    // interior vertices: k slots, every type once, correct rotation pattern
    for (&v, vd) in &patch.vertices {
        if vd.boundary {
            continue;
        }
        if vd.rotation.len() != k {
            rep.violations.push(format!("interior vertex {v} has {} half-edges, expected {k}", vd.rotation.len()));
            continue;
        }
        let types: Vec<u16> = vd
            .rotation
            .iter()
            .filter_map(|&h| patch.half_edges.get(h as usize).map(|hd| hd.etype))
            .collect();
        if types.len() != k {
            continue; // already reported above
        }
        let mut counts = vec![0usize; k];
        for &t in &types {
            if (t as usize) < k {
                counts[t as usize] += 1;
            }
        }
        if counts.iter().any(|&c| c != 1) {
            rep.violations.push(format!("interior vertex {v}: edge types {:?} are not one of each", types));
            continue;
        }
        let step: i64 = match vd.color {
            Color::Cross => 1,
            Color::Circle => -1,
        };
        let ok = (0..k).all(|i| {
            let a = types[i] as i64;
            let b = types[(i + 1) % k] as i64;
            (a + step).rem_euclid(k as i64) == b
        });
        if !ok {
            rep.violations.push(format!(
                "interior {} vertex {v}: rotation types {:?} do not advance {} around the vertex",
                match vd.color {
                    Color::Cross => "cross",
                    Color::Circle => "circle",
                },
                types,
                if step == 1 { "0,1,...,k-1" } else { "k-1,...,1,0" }
            ));
        }
    }

    // root conditions
    match patch.vertices.get(&patch.root) {
        None => rep.violations.push(format!("root {} is not a vertex", patch.root)),
        Some(vd) => {
            if vd.boundary && patch.vertices.len() > 1 {
                rep.violations.push(format!("root {} is a boundary vertex", patch.root));
            }
        }
    }

    // face labels: only meaningful when the structure above held up
    if structural_ok {
        for (i, f) in faces(patch).iter().enumerate() {
            if f.interior_conflict {
                rep.violations.push(format!("face {i}: corners at interior vertices disagree on the label"));
            }
            if let Some(lab) = f.label {
                let prev = (lab + k - 1) % k;
                for &h in &f.halves {
                    let t = patch.half(h).etype as usize;
                    if t != lab && t != prev {
                        rep.violations.push(format!(
                            "face {i} labeled entry {lab} touches edge type {t}, outside {{{prev}, {lab}}}"
                        ));
                        break;
                    }
                }
            }
        }
    }

    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PatchBuilder;
    use crate::sphere::{BaseCurve, SphereValue};

    fn base01() -> BaseCurve {
        BaseCurve::in_order(vec![SphereValue::real(0.0), SphereValue::Infinity]).unwrap()
    }

    fn base3() -> BaseCurve {
        BaseCurve::in_order(vec![
            SphereValue::real(-9.0),
            SphereValue::real(1.0),
            SphereValue::Infinity,
        ])
        .unwrap()
    }

    #[test]
    fn square_cycle_is_valid() {
        let mut b = PatchBuilder::new(base01());
        b.root(0);
        b.vertex(0, Color::Cross, vec![(0, Some(1)), (1, Some(3))]);
        b.vertex(1, Color::Circle, vec![(0, Some(0)), (1, Some(2))]);
        b.vertex(2, Color::Cross, vec![(0, Some(3)), (1, Some(1))]);
        b.vertex(3, Color::Circle, vec![(0, Some(2)), (1, Some(0))]);
        let rep = validate(&b.build().unwrap());
        assert!(rep.is_valid(), "{rep}");
    }

    #[test]
    fn lone_boundary_cross_is_valid() {
        let mut b = PatchBuilder::new(base01());
        b.root(5);
        b.vertex(5, Color::Cross, vec![(0, None), (1, None)]);
        let rep = validate(&b.build().unwrap());
        assert!(rep.is_valid(), "{rep}");
    }

    #[test]
    fn same_color_edge_is_flagged() {
        let mut b = PatchBuilder::new(base01());
        b.root(0);
        b.vertex(0, Color::Cross, vec![(0, Some(1)), (1, None)]);
        b.vertex(1, Color::Cross, vec![(0, Some(0)), (1, None)]);
        let rep = validate(&b.build().unwrap());
        assert!(rep.violations.iter().any(|v| v.contains("not bipartite")), "{rep}");
    }

    #[test]
    fn wrong_circle_rotation_is_flagged() {
        // interior circle whose types advance like a cross
        let mut b = PatchBuilder::new(base3());
        b.root(0);
        b.vertex(0, Color::Circle, vec![(0, Some(1)), (1, Some(2)), (2, Some(3))]);
        b.vertex(1, Color::Cross, vec![(0, Some(0)), (1, None), (2, None)]);
        b.vertex(2, Color::Cross, vec![(0, None), (1, Some(0)), (2, None)]);
        b.vertex(3, Color::Cross, vec![(0, None), (1, None), (2, Some(0))]);
        let rep = validate(&b.build().unwrap());
        assert!(
            rep.violations.iter().any(|v| v.contains("do not advance")),
            "{rep}"
        );
    }

    #[test]
    fn proper_circle_rotation_passes() {
        let mut b = PatchBuilder::new(base3());
        b.root(0);
        b.vertex(0, Color::Circle, vec![(0, Some(1)), (2, Some(3)), (1, Some(2))]);
        b.vertex(1, Color::Cross, vec![(0, Some(0)), (1, None), (2, None)]);
        b.vertex(2, Color::Cross, vec![(0, None), (1, Some(0)), (2, None)]);
        b.vertex(3, Color::Cross, vec![(0, None), (1, None), (2, Some(0))]);
        let rep = validate(&b.build().unwrap());
        assert!(rep.is_valid(), "{rep}");
    }

    #[test]
    fn boundary_root_flagged_when_not_alone() {
        let mut b = PatchBuilder::new(base01());
        b.root(0);
        b.vertex(0, Color::Cross, vec![(0, Some(1)), (1, None)]);
        b.vertex(1, Color::Circle, vec![(0, Some(0)), (1, None)]);
        let rep = validate(&b.build().unwrap());
        assert!(rep.violations.iter().any(|v| v.contains("root")), "{rep}");
    }
}
