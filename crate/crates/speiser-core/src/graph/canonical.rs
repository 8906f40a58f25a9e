use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{validate, SpeiserPatch, Twin, VertexId};
use crate::sphere::{BaseCurve, SphereValue};

/// Canonical byte string for a rooted patch: equal codes iff the
/// patches are rooted-isomorphic preserving colors, edge types,
/// rotation order, boundary flags, and labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RootedCode(pub Vec<u8>);

impl RootedCode {
    /// The structural part of the code with the label table stripped,
    /// so patches differing only in label values compare equal.
    pub fn combinatorial(&self) -> &[u8] {
        let k = u16::from_le_bytes([self.0[0], self.0[1]]) as usize;
        &self.0[2 + 17 * k..]
    }
}

impl std::fmt::Display for RootedCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in &self.0 {
            write!(f, "{:02x}", b)?;
        }
        Ok(())
    }
}

fn label_bytes(v: SphereValue, out: &mut Vec<u8>) {
    match v.as_complex() {
        Some(z) => {
            out.push(0);
            out.extend(z.re.to_bits().to_le_bytes());
            out.extend(z.im.to_bits().to_le_bytes());
        }
        None => {
            out.push(1);
            out.extend([0u8; 16]);
        }
    }
}

// one BFS encoding with a fixed rotation offset at the root
fn encode_from(patch: &SpeiserPatch, root_anchor: usize) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    let mut index: BTreeMap<VertexId, u32> = BTreeMap::new();
    let mut anchor: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut order: Vec<VertexId> = Vec::new();

    index.insert(patch.root, 0);
    anchor.insert(patch.root, root_anchor);
    order.push(patch.root);

    let mut qpos = 0;
    while qpos < order.len() {
        let v = order[qpos];
        qpos += 1;
        let vd = &patch.vertices[&v];
        let a = anchor[&v];
        let m = vd.rotation.len();
        bytes.push(match vd.color {
            crate::graph::Color::Cross => 0,
            crate::graph::Color::Circle => 1,
        } + if vd.boundary { 2 } else { 0 });
        bytes.extend((m as u16).to_le_bytes());
        for i in 0..m {
            let h = vd.rotation[(a + i) % m];
            let hd = patch.half(h);
            bytes.extend(hd.etype.to_le_bytes());
            match hd.twin {
                Twin::Dangling => bytes.extend(u32::MAX.to_le_bytes()),
                Twin::Half(t) => {
                    let u = patch.half(t).owner;
                    let upos = patch.vertices[&u]
                        .rotation
                        .iter()
                        .position(|&x| x == t)
                        .expect("twin missing from its owner rotation");
                    if !index.contains_key(&u) {
                        index.insert(u, order.len() as u32);
                        anchor.insert(u, upos);
                        order.push(u);
                    }
                    let ulen = patch.vertices[&u].rotation.len();
                    let rel = (upos + ulen - anchor[&u]) % ulen;
                    bytes.extend(index[&u].to_le_bytes());
                    bytes.extend((rel as u16).to_le_bytes());
                }
            }
        }
    }
    if order.len() != patch.vertices.len() {
        return Err(Error::InvalidPatch(format!(
            "patch is disconnected: {} of {} vertices reachable from the root",
            order.len(),
            patch.vertices.len()
        )));
    }
    Ok(bytes)
}

pub fn canonical_code(patch: &SpeiserPatch) -> Result<RootedCode> {
    let rep = validate(patch);
    if !rep.is_valid() {
        return Err(Error::InvalidPatch(format!(
            "cannot encode an invalid patch:\n{}",
            rep
        )));
    }
    let mut header = Vec::new();
    header.extend((patch.k() as u16).to_le_bytes());
    for &e in patch.base.entries() {
        label_bytes(e, &mut header);
    }
    let deg = patch.vertices[&patch.root].rotation.len().max(1);
    let mut best: Option<Vec<u8>> = None;
    for a in 0..deg {
        let code = encode_from(patch, a)?;
        if best.as_ref().map_or(true, |b| code < *b) {
            best = Some(code);
        }
    }
    header.extend(best.unwrap());
    Ok(RootedCode(header))
}

/// Relabel a patch's base entries through a partial map (unlisted
/// labels stay fixed). The mapped labels must be pairwise distinct.
pub fn relabel(patch: &SpeiserPatch, map: &[(SphereValue, SphereValue)]) -> Result<SpeiserPatch> {
    let mapped: Vec<SphereValue> = patch
        .base
        .entries()
        .iter()
        .map(|&e| map.iter().find(|(from, _)| *from == e).map(|(_, to)| *to).unwrap_or(e))
        .collect();
    let base = BaseCurve::from_entries(mapped).map_err(|_| Error::BadLabelMap)?;
    let mut out = patch.clone();
    out.base = base;
    Ok(out)
}

/// True iff the patches are rooted-isomorphic, optionally after
/// relabeling p1 through label_map. The mapped label set must equal
/// p2's label set or the map is rejected.
pub fn rooted_isomorphic(
    p1: &SpeiserPatch,
    p2: &SpeiserPatch,
    label_map: Option<&[(SphereValue, SphereValue)]>,
) -> Result<bool> {
    let p1m = match label_map {
        Some(map) => relabel(p1, map)?,
        None => p1.clone(),
    };
    let mut l1: Vec<_> = p1m.base.entries().iter().map(|e| e.key()).collect();
    let mut l2: Vec<_> = p2.base.entries().iter().map(|e| e.key()).collect();
    l1.sort();
    l2.sort();
    if l1 != l2 {
        return Err(Error::BadLabelMap);
    }
    Ok(canonical_code(&p1m)? == canonical_code(p2)?)
}

/// Independent exhaustive isomorphism search for small patches:
/// backtracks over vertex bijections, then over per-vertex rotation
/// offsets, checking every half-edge correspondence. Exponential;
/// intended only as a cross-check for patches with at most ~8 vertices.
pub fn brute_force_isomorphic(p1: &SpeiserPatch, p2: &SpeiserPatch) -> bool {
    if p1.vertices.len() != p2.vertices.len() {
        return false;
    }
    let l1: Vec<_> = p1.base.entries().iter().map(|e| e.key()).collect();
    let l2: Vec<_> = p2.base.entries().iter().map(|e| e.key()).collect();
    if l1 != l2 {
        return false;
    }
    let v1: Vec<VertexId> = p1.vertices.keys().copied().collect();
    let v2: Vec<VertexId> = p2.vertices.keys().copied().collect();

    fn compatible(p1: &SpeiserPatch, p2: &SpeiserPatch, a: VertexId, b: VertexId) -> bool {
        let (da, db) = (&p1.vertices[&a], &p2.vertices[&b]);
        da.color == db.color
            && da.boundary == db.boundary
            && da.rotation.len() == db.rotation.len()
            && ((a == p1.root) == (b == p2.root))
    }

    // check a full bijection by searching offset assignments
    fn offsets_work(
        p1: &SpeiserPatch,
        p2: &SpeiserPatch,
        f: &BTreeMap<VertexId, VertexId>,
        order: &[VertexId],
        chosen: &mut BTreeMap<VertexId, usize>,
        at: usize,
    ) -> bool {
        if at == order.len() {
            // verify every twin correspondence under the chosen offsets
            for (&v, vd) in &p1.vertices {
                let m = vd.rotation.len();
                let w = f[&v];
                let wd = &p2.vertices[&w];
                for i in 0..m {
                    let h = vd.rotation[i];
                    let g = wd.rotation[(i + chosen[&v]) % m];
                    let (hd, gd) = (p1.half(h), p2.half(g));
                    if hd.etype != gd.etype {
                        return false;
                    }
                    match (hd.twin, gd.twin) {
                        (Twin::Dangling, Twin::Dangling) => {}
                        (Twin::Half(t), Twin::Half(s)) => {
                            let u = p1.half(t).owner;
                            let x = p2.half(s).owner;
                            if f[&u] != x {
                                return false;
                            }
                            // the twin must land on the corresponding slot
                            let un = p1.vertices[&u].rotation.len();
                            let tpos =
                                p1.vertices[&u].rotation.iter().position(|&y| y == t).unwrap();
                            let spos =
                                p2.vertices[&x].rotation.iter().position(|&y| y == s).unwrap();
                            if (tpos + chosen[&u]) % un != spos {
                                return false;
                            }
                        }
                        _ => return false,
                    }
                }
            }
            return true;
        }
        let v = order[at];
        let m = p1.vertices[&v].rotation.len().max(1);
        for o in 0..m {
            chosen.insert(v, o);
            if offsets_work(p1, p2, f, order, chosen, at + 1) {
                return true;
            }
        }
        chosen.remove(&v);
        false
    }

    fn assign(
        p1: &SpeiserPatch,
        p2: &SpeiserPatch,
        v1: &[VertexId],
        v2: &[VertexId],
        f: &mut BTreeMap<VertexId, VertexId>,
        used: &mut Vec<bool>,
        at: usize,
    ) -> bool {
        if at == v1.len() {
            let order: Vec<VertexId> = v1.to_vec();
            let mut chosen = BTreeMap::new();
            return offsets_work(p1, p2, f, &order, &mut chosen, 0);
        }
        let a = v1[at];
        for (j, &b) in v2.iter().enumerate() {
            if used[j] || !compatible(p1, p2, a, b) {
                continue;
            }
            used[j] = true;
            f.insert(a, b);
            if assign(p1, p2, v1, v2, f, used, at + 1) {
                return true;
            }
            f.remove(&a);
            used[j] = false;
        }
        false
    }

    let mut f = BTreeMap::new();
    let mut used = vec![false; v2.len()];
    assign(p1, p2, &v1, &v2, &mut f, &mut used, 0)
}
