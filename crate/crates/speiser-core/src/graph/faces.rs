use crate::graph::{Color, HalfEdgeId, SpeiserPatch, Twin};

/// One face of the rotation system: a closed orbit of the
/// next-around-face permutation, or an open chain that starts and ends
/// at dangling half-edges on the truncation rim.
#[derive(Clone, Debug)]
pub struct Face {
    /// Traversal order; open chains include the final dangling half-edge.
    pub halves: Vec<HalfEdgeId>,
    /// True only for closed orbits that touch no boundary vertex.
    pub closed: bool,
    /// Base-curve entry index agreed by the corners, if consistent.
    pub label: Option<usize>,
    /// Corners at interior vertices disagree about the label.
    pub interior_conflict: bool,
}

// next half-edge around the face: step across the edge, then turn
fn sigma(patch: &SpeiserPatch, h: HalfEdgeId) -> Option<HalfEdgeId> {
    match patch.half(h).twin {
        Twin::Half(t) => Some(patch.rot_next(t)),
        Twin::Dangling => None,
    }
}

// the face label read off one corner: at a cross the outgoing type, at
// a circle the incoming type (both give the entry the corner opens into)
fn corner_label(color: Color, in_type: u16, out_type: u16) -> usize {
    match color {
        Color::Cross => out_type as usize,
        Color::Circle => in_type as usize,
    }
}

struct FaceAccum {
    halves: Vec<HalfEdgeId>,
    label: Option<usize>,
    conflict: bool,
    interior_conflict: bool,
    touches_boundary: bool,
}

impl FaceAccum {
    fn new() -> FaceAccum {
        FaceAccum {
            halves: Vec::new(),
            label: None,
            conflict: false,
            interior_conflict: false,
            touches_boundary: false,
        }
    }

    fn corner(&mut self, patch: &SpeiserPatch, in_type: u16, at: HalfEdgeId) {
        let hd = patch.half(at);
        let vd = &patch.vertices[&hd.owner];
        let lab = corner_label(vd.color, in_type, hd.etype);
        match self.label {
            None if !self.conflict => self.label = Some(lab),
            Some(prev) if prev != lab => {
                self.conflict = true;
                self.label = None;
                if !vd.boundary {
                    self.interior_conflict = true;
                }
            }
            _ => {}
        }
    }

    fn push(&mut self, patch: &SpeiserPatch, h: HalfEdgeId) {
        if patch.vertices[&patch.half(h).owner].boundary {
            self.touches_boundary = true;
        }
        self.halves.push(h);
    }

    fn into_face(self, closed: bool) -> Face {
        Face {
            halves: self.halves,
            closed: closed && !self.touches_boundary,
            label: self.label,
            interior_conflict: self.interior_conflict,
        }
    }
}

/// All faces of the patch. Every half-edge (including danglings)
/// appears on exactly one face. Deterministic order: open chains by
/// starting half-edge id, then closed orbits by smallest half-edge id.
pub fn faces(patch: &SpeiserPatch) -> Vec<Face> {
    let n = patch.half_edges.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();

    // open chains start where the previous slot in rotation is dangling
    for h0 in 0..n as HalfEdgeId {
        let prev = patch.rot_prev(h0);
        if !matches!(patch.half(prev).twin, Twin::Dangling) || seen[h0 as usize] {
            continue;
        }
        let mut acc = FaceAccum::new();
        acc.corner(patch, patch.half(prev).etype, h0);
        let mut h = h0;
        loop {
            seen[h as usize] = true;
            acc.push(patch, h);
            match sigma(patch, h) {
                None => break,
                Some(next) => {
                    acc.corner(patch, patch.half(h).etype, next);
                    h = next;
                }
            }
        }
        out.push(acc.into_face(false));
    }

    // what remains lies on closed orbits
    for h0 in 0..n as HalfEdgeId {
        if seen[h0 as usize] {
            continue;
        }
        let mut acc = FaceAccum::new();
        let mut h = h0;
        loop {
            seen[h as usize] = true;
            acc.push(patch, h);
            let next = sigma(patch, h)
                .expect("closed face walk hit a dangling half-edge; twin structure corrupt");
            acc.corner(patch, patch.half(h).etype, next);
            if next == h0 {
                break;
            }
            h = next;
        }
        out.push(acc.into_face(true));
    }
    out
}
