use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;

/// A point on the Riemann sphere: a finite complex number or the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SphereValue {
    Finite(Complex64),
    Infinity,
}

impl SphereValue {
    pub fn finite(re: f64, im: f64) -> SphereValue {
        // normalize -0.0 so equality and hashing behave
        let fix = |x: f64| if x == 0.0 { 0.0 } else { x };
        SphereValue::Finite(Complex64::new(fix(re), fix(im)))
    }

    pub fn real(x: f64) -> SphereValue {
        SphereValue::finite(x, 0.0)
    }

    pub fn from_complex(z: Complex64) -> SphereValue {
        SphereValue::finite(z.re, z.im)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, SphereValue::Finite(_))
    }

    pub fn as_complex(&self) -> Option<Complex64> {
        match self {
            SphereValue::Finite(z) => Some(*z),
            SphereValue::Infinity => None,
        }
    }

    /// Bit-level key for use in ordered maps.
    pub fn key(&self) -> (u8, u64, u64) {
        match self {
            SphereValue::Finite(z) => (0, z.re.to_bits(), z.im.to_bits()),
            SphereValue::Infinity => (1, 0, 0),
        }
    }

    /// Angle coordinate on the circle through the extended real line:
    /// theta(x) = 2 atan(x), theta(inf) = pi. None for non-real finite values.
    pub fn theta(&self) -> Option<f64> {
        match self {
            SphereValue::Finite(z) if z.im == 0.0 => Some(2.0 * z.re.atan()),
            SphereValue::Finite(_) => None,
            SphereValue::Infinity => Some(std::f64::consts::PI),
        }
    }

    pub fn parse(s: &str) -> Result<SphereValue> {
        parse_sphere_value(s).ok_or_else(|| Error::BadBaseCurve(format!("cannot parse value `{s}`")))
    }
}

impl fmt::Display for SphereValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SphereValue::Infinity => write!(f, "inf"),
            SphereValue::Finite(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", z.re)
                } else if z.re == 0.0 {
                    write!(f, "{}i", z.im)
                } else if z.im < 0.0 {
                    write!(f, "{}-{}i", z.re, -z.im)
                } else {
                    write!(f, "{}+{}i", z.re, z.im)
                }
            }
        }
    }
}

fn parse_float(s: &str) -> Option<f64> {
    let v: f64 = s.trim().parse().ok()?;
    if v.is_finite() {
        Some(v)
    } else {
        None
    }
}

fn parse_sphere_value(s: &str) -> Option<SphereValue> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s == "∞" {
        return Some(SphereValue::Infinity);
    }
    // split off an imaginary part: find a +/- that is not leading and not an exponent sign
    let bytes = s.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i];
        if (c == b'+' || c == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let imag_of = |t: &str| -> Option<f64> {
        let t = t.strip_suffix('i')?;
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => parse_float(t),
        }
    };
    if let Some(i) = split {
        let (a, b) = (&s[..i], &s[i..]);
        if b.ends_with('i') {
            let re = parse_float(a)?;
            let im = imag_of(b)?;
            return Some(SphereValue::finite(re, im));
        }
        // things like "1e-3" fall through to the plain-real case
    }
    if s.ends_with('i') {
        let im = imag_of(s)?;
        return Some(SphereValue::finite(0.0, im));
    }
    parse_float(s).map(SphereValue::real)
}

/// Chordal distance on the Riemann sphere, values in [0, 2].
pub fn spherical_distance(a: SphereValue, b: SphereValue) -> f64 {
    match (a, b) {
        (SphereValue::Infinity, SphereValue::Infinity) => 0.0,
        (SphereValue::Finite(z), SphereValue::Infinity) | (SphereValue::Infinity, SphereValue::Finite(z)) => {
            2.0 / (1.0 + z.norm_sqr()).sqrt()
        }
        (SphereValue::Finite(z), SphereValue::Finite(w)) => {
            // 2|z - w| / (sqrt(1+|z|^2) sqrt(1+|w|^2)), arranged so nothing
            // overflows: divide by the larger hypot first
            let (z, w) = if z.norm() >= w.norm() { (z, w) } else { (w, z) };
            let hz = z.norm().hypot(1.0);
            let hw = w.norm().hypot(1.0);
            if !hz.is_finite() {
                return 2.0 / hw;
            }
            let d = z / hz - w / hz;
            2.0 * d.norm() / hw
        }
    }
}

pub fn spherical_distance_c(a: Complex64, b: Complex64) -> f64 {
    spherical_distance(SphereValue::from_complex(a), SphereValue::from_complex(b))
}

/// The base curve: the singular values in counterclockwise cyclic order along the
/// extended real line, together with one real crossing point on each arc.
/// Arc j runs from entry j to entry j+1 (mod k).
#[derive(Clone, Debug, PartialEq)]
pub struct BaseCurve {
    entries: Vec<SphereValue>,
    crossings: Vec<f64>,
}

impl BaseCurve {
    /// Build the curve through the given labels along the extended real line,
    /// ordering them counterclockwise (ascending theta).
    pub fn standard(mut labels: Vec<SphereValue>) -> Result<BaseCurve> {
        for l in &labels {
            if l.theta().is_none() {
                return Err(Error::BadBaseCurve(format!("label {l} is not real or inf")));
            }
        }
        labels.sort_by(|a, b| a.theta().partial_cmp(&b.theta()).unwrap());
        BaseCurve::in_order(labels)
    }

    /// Build a purely combinatorial curve: entries in the given cyclic order,
    /// no geometry attached (no crossing points). Entries may be any distinct
    /// sphere values. Used for patches loaded from files and for surgery output.
    pub fn from_entries(entries: Vec<SphereValue>) -> Result<BaseCurve> {
        let k = entries.len();
        if k < 2 {
            return Err(Error::BadBaseCurve("need at least 2 entries".into()));
        }
        for i in 0..k {
            for j in i + 1..k {
                if entries[i] == entries[j] {
                    return Err(Error::BadBaseCurve(format!("duplicate entry {}", entries[i])));
                }
            }
        }
        Ok(BaseCurve { entries, crossings: Vec::new() })
    }

    /// Build the curve with the entries in the given cyclic order, which must be
    /// the counterclockwise circular order on the extended real line.
    pub fn in_order(entries: Vec<SphereValue>) -> Result<BaseCurve> {
        let k = entries.len();
        if k < 2 {
            return Err(Error::BadBaseCurve("need at least 2 entries".into()));
        }
        let mut thetas = Vec::with_capacity(k);
        for e in &entries {
            match e.theta() {
                Some(t) => thetas.push(t),
                None => return Err(Error::BadBaseCurve(format!("entry {e} is not real or inf"))),
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                if entries[i] == entries[j] {
                    return Err(Error::BadBaseCurve(format!("duplicate entry {}", entries[i])));
                }
            }
        }
        // counterclockwise cyclic order: ascending theta up to one wrap
        let mut descents = 0;
        for i in 0..k {
            if thetas[(i + 1) % k] <= thetas[i] {
                descents += 1;
            }
        }
        if descents > 1 {
            return Err(Error::BadBaseCurve(
                "entries are not in counterclockwise circular order on the extended real line".into(),
            ));
        }
        let maxabs = entries
            .iter()
            .filter_map(|e| e.as_complex())
            .map(|z| z.re.abs())
            .fold(0.0f64, f64::max);
        let mut crossings = Vec::with_capacity(k);
        for j in 0..k {
            let t0 = thetas[j];
            let mut t1 = thetas[(j + 1) % k];
            if t1 <= t0 {
                t1 += 2.0 * std::f64::consts::PI;
            }
            let mut mid = 0.5 * (t0 + t1);
            if mid > std::f64::consts::PI {
                mid -= 2.0 * std::f64::consts::PI;
            }
            // if the chordal midpoint of the arc is (numerically) the point at
            // infinity, route through a finite point well past every label instead
            let c = if mid.abs() > std::f64::consts::PI - 1e-9 {
                -2.0 * maxabs - 1.0
            } else {
                (0.5 * mid).tan()
            };
            crossings.push(c);
        }
        Ok(BaseCurve { entries, crossings })
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[SphereValue] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> SphereValue {
        self.entries[i % self.entries.len()]
    }

    /// The real crossing point assigned to arc j.
    pub fn crossing(&self, j: usize) -> f64 {
        self.crossings[j % self.crossings.len()]
    }

    pub fn index_of(&self, v: SphereValue) -> Option<usize> {
        self.entries.iter().position(|e| *e == v)
    }

    /// The arc index between two labels that are adjacent in the cyclic order.
    pub fn arc_between(&self, x: SphereValue, y: SphereValue) -> Result<usize> {
        let k = self.k();
        let i = self
            .index_of(x)
            .ok_or_else(|| Error::BadBaseCurve(format!("{x} is not on the base curve")))?;
        let j = self
            .index_of(y)
            .ok_or_else(|| Error::BadBaseCurve(format!("{y} is not on the base curve")))?;
        if (i + 1) % k == j {
            Ok(i)
        } else if (j + 1) % k == i {
            Ok(j)
        } else {
            Err(Error::BadBaseCurve(format!("{x} and {y} are not adjacent on the base curve")))
        }
    }

    /// Drop one entry, keeping the cyclic order of the rest.
    pub fn without(&self, v: SphereValue) -> Result<BaseCurve> {
        if self.index_of(v).is_none() {
            return Err(Error::BadBaseCurve(format!("{v} is not on the base curve")));
        }
        let rest: Vec<SphereValue> = self.entries.iter().copied().filter(|e| *e != v).collect();
        // keep geometry when the survivors are still a real curve, else combinatorial only
        BaseCurve::in_order(rest.clone()).or_else(|_| BaseCurve::from_entries(rest))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        let zero = SphereValue::real(0.0);
        let one = SphereValue::real(1.0);
        assert!((spherical_distance(zero, SphereValue::Infinity) - 2.0).abs() < 1e-15);
        assert!((spherical_distance(zero, one) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(spherical_distance(one, one), 0.0);
        // symmetry and a large-value case
        let big = SphereValue::real(1e200);
        let d = spherical_distance(big, SphereValue::Infinity);
        assert!(d.is_finite() && d < 1e-99);
        assert_eq!(spherical_distance(big, zero), spherical_distance(zero, big));
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["inf", "1", "-9", "2.5", "1+2i", "-1.5-0.5i", "2i", "-i", "1e-3"] {
            let v = SphereValue::parse(s).unwrap();
            let again = SphereValue::parse(&v.to_string()).unwrap();
            assert_eq!(v, again, "roundtrip of {s}");
        }
        assert_eq!(SphereValue::parse("i").unwrap(), SphereValue::finite(0.0, 1.0));
        assert_eq!(SphereValue::parse("-0").unwrap(), SphereValue::real(0.0));
        assert!(SphereValue::parse("nan").is_err());
    }

    #[test]
    fn standard_base_exp() {
        // labels of e^z + 1
        let b = BaseCurve::standard(vec![SphereValue::real(1.0), SphereValue::Infinity]).unwrap();
        assert_eq!(b.entries(), &[SphereValue::real(1.0), SphereValue::Infinity]);
        // chordal midpoints: tan(3pi/8) = 1+sqrt(2), tan(-pi/8) = 1-sqrt(2)
        assert!((b.crossing(0) - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((b.crossing(1) - (1.0 - 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn standard_base_square() {
        // labels of z^2
        let b = BaseCurve::standard(vec![SphereValue::Infinity, SphereValue::real(0.0)]).unwrap();
        assert_eq!(b.entries(), &[SphereValue::real(0.0), SphereValue::Infinity]);
        assert!((b.crossing(0) - 1.0).abs() < 1e-12);
        assert!((b.crossing(1) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn base_order_checks() {
        let v = |x: f64| SphereValue::real(x);
        // (-9, -3, 1, inf) is counterclockwise
        let b = BaseCurve::in_order(vec![v(-9.0), v(-3.0), v(1.0), SphereValue::Infinity]).unwrap();
        assert_eq!(b.arc_between(SphereValue::Infinity, v(-9.0)).unwrap(), 3);
        assert_eq!(b.arc_between(v(-3.0), v(-9.0)).unwrap(), 0);
        assert!(b.arc_between(v(-9.0), v(1.0)).is_err());
        // a clockwise listing is rejected
        assert!(BaseCurve::in_order(vec![v(1.0), v(-3.0), v(-9.0), SphereValue::Infinity]).is_err());
        // duplicates are rejected
        assert!(BaseCurve::standard(vec![v(1.0), v(1.0), SphereValue::Infinity]).is_err());
    }

    #[test]
    fn crossings_lie_inside_arcs() {
        let v = |x: f64| SphereValue::real(x);
        let b = BaseCurve::standard(vec![v(-9.0), v(1.0), SphereValue::Infinity]).unwrap();
        // arc 2 runs from inf back to -9, so its crossing must be < -9
        assert!(b.crossing(2) < -9.0);
        // arc 0 runs from -9 to 1
        assert!(b.crossing(0) > -9.0 && b.crossing(0) < 1.0);
        // arc 1 runs from 1 to inf
        assert!(b.crossing(1) > 1.0);
    }

    #[test]
    fn wrap_arc_fallback() {
        // all-finite base whose wrap arc passes straight through infinity
        let v = |x: f64| SphereValue::real(x);
        let b = BaseCurve::standard(vec![v(-2.0), v(2.0)]).unwrap();
        let c = b.crossing(1);
        assert!(c.is_finite());
        assert!(c < -2.0, "fallback point must sit past every label, got {c}");
    }
}
