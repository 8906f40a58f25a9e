pub mod expr;
pub mod scaled;

pub use expr::{parse_formula, Expr};
pub use scaled::Scaled;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sphere::SphereValue;

/// An entire function we can evaluate, differentiate, and analyze.
/// The derivative expression is built once up front.
#[derive(Clone, Debug)]
pub struct CatalogFunction {
    pub name: String,
    pub expr: Expr,
    pub deriv: Expr,
}

impl CatalogFunction {
    pub fn new(name: impl Into<String>, expr: Expr) -> CatalogFunction {
        let deriv = expr.derivative();
        CatalogFunction { name: name.into(), expr, deriv }
    }

    pub fn from_formula(src: &str) -> Result<CatalogFunction> {
        let expr = parse_formula(src)?;
        Ok(CatalogFunction::new(src.trim(), expr))
    }

    pub fn exp_plus_one() -> CatalogFunction {
        CatalogFunction::from_formula("exp(z) + 1").unwrap()
    }

    /// a*(e^(e^z) - 1) + 1 for real a > 0.
    pub fn double_exp(a: f64) -> CatalogFunction {
        let name = format!("{}*(exp(exp(z)) - 1) + 1", a);
        let expr = parse_formula(&format!("a*(exp(exp(z)) - 1) + 1 with a={}", a)).unwrap();
        CatalogFunction::new(name, expr)
    }

    pub fn z_pow(d: u32) -> CatalogFunction {
        CatalogFunction::new(format!("z^{}", d), Expr::pow(Expr::Z, d))
    }

    pub fn eval_scaled(&self, z: Complex64) -> Scaled {
        eval_scaled_expr(&self.expr, Scaled::from_complex(z))
    }

    pub fn deriv_scaled(&self, z: Complex64) -> Scaled {
        eval_scaled_expr(&self.deriv, Scaled::from_complex(z))
    }

    /// Native-float evaluation; saturates to inf where the value
    /// exceeds float range (use eval_scaled there).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_scaled(z).to_complex()
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        self.deriv_scaled(z).to_complex()
    }
}

pub fn eval_scaled_expr(e: &Expr, z: Scaled) -> Scaled {
    match e {
        Expr::Z => z,
        Expr::Const(c) => Scaled::from_complex(*c),
        Expr::Add(a, b) => eval_scaled_expr(a, z).add(eval_scaled_expr(b, z)),
        Expr::Mul(a, b) => eval_scaled_expr(a, z).mul(eval_scaled_expr(b, z)),
        Expr::Pow(a, n) => eval_scaled_expr(a, z).powu(*n),
        Expr::Exp(a) => eval_scaled_expr(a, z).exp(),
    }
}

/// Spherical derivative |f'(z)| / (1 + |f(z)|^2), computed in log space
/// so it stays finite for towers like e^(e^z).
pub fn spherical_derivative(f: &CatalogFunction, z: Complex64) -> f64 {
    let lf2 = 2.0 * f.eval_scaled(z).ln_abs();
    let ln_denom = if lf2 > 0.0 {
        lf2 + (-lf2).exp().ln_1p()
    } else {
        lf2.exp().ln_1p()
    };
    (f.deriv_scaled(z).ln_abs() - ln_denom).exp()
}

/// A function with a marked point (and optional conformal-radius
/// metadata, carried along but never computed here).
#[derive(Clone, Debug)]
pub struct PointedTriple {
    pub f: CatalogFunction,
    pub w: Complex64,
    pub conformal_radius: Option<f64>,
}

impl PointedTriple {
    pub fn new(f: CatalogFunction, w: Complex64) -> PointedTriple {
        PointedTriple { f, w, conformal_radius: None }
    }
}

/// Rescale so the composed map g(z) = f(w + lambda*z) has spherical
/// derivative exactly 1 at the origin. Errors if w is critical.
pub fn normalize_triple(t: &PointedTriple) -> Result<(f64, CatalogFunction)> {
    let fsharp = spherical_derivative(&t.f, t.w);
    if !(fsharp.is_finite() && fsharp > 0.0) {
        return Err(Error::CriticalBasePoint(format!(
            "{}+{}i (spherical derivative {})",
            t.w.re, t.w.im, fsharp
        )));
    }
    let lambda = 1.0 / fsharp;
    let inner = Expr::add(
        Expr::Const(t.w),
        Expr::mul(Expr::Const(Complex64::new(lambda, 0.0)), Expr::Z),
    );
    let g_expr = t.f.expr.substitute(&inner);
    let g = CatalogFunction::new(
        format!("{} at {}+{}i scale {}", t.f.name, t.w.re, t.w.im, lambda),
        g_expr,
    );
    Ok((lambda, g))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularValue {
    pub value: SphereValue,
    pub critical: bool,
    pub asymptotic: bool,
}

/// Roots of a polynomial given by ascending coefficients, leading
/// coefficient nonzero. Durand-Kerner sweep plus a Newton polish.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.len() > 1 && c.last().unwrap().norm() == 0.0 {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = *c.last().unwrap();
    for v in c.iter_mut() {
        *v /= lead;
    }
    let eval = |p: &[Complex64], z: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &ck in p.iter().rev() {
            acc = acc * z + ck;
        }
        acc
    };
    let dcoeffs: Vec<Complex64> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| ck * k as f64)
        .collect();

    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let num = eval(&c, roots[k]);
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != k {
                    den *= roots[k] - roots[j];
                }
            }
            if den.norm() == 0.0 {
                roots[k] += Complex64::new(1e-6, 1e-6);
                continue;
            }
            let delta = num / den;
            roots[k] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved < 1e-14 {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..10 {
            let d = eval(&dcoeffs, *r);
            if d.norm() < 1e-30 {
                break;
            }
            let step = eval(&c, *r) / d;
            *r -= step;
            if step.norm() < 1e-15 * (1.0 + r.norm()) {
                break;
            }
        }
    }
    roots
}

fn cluster_points(mut pts: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    pts.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    'next: for p in pts {
        for (q, cnt) in out.iter_mut() {
            if (p - *q).norm() <= tol * (1.0 + p.norm()) {
                // fold into centroid
                *q = (*q * *cnt as f64 + p) / (*cnt as f64 + 1.0);
                *cnt += 1;
                continue 'next;
            }
        }
        out.push((p, 1));
    }
    out.into_iter().map(|(q, _)| q).collect()
}

/// Zeros of f', found by splitting the derivative into factors.
/// Exp factors never vanish; polynomial factors get root-solved.
/// Anything else is reported as unsupported rather than guessed at.
pub fn critical_points(f: &CatalogFunction) -> Result<Vec<Complex64>> {
    fn split(e: &Expr, out: &mut Vec<Vec<Complex64>>) -> Result<()> {
        match e {
            Expr::Mul(a, b) => {
                split(a, out)?;
                split(b, out)?;
            }
            Expr::Pow(a, n) => {
                if *n >= 1 {
                    split(a, out)?;
                }
            }
            Expr::Exp(_) => {}
            other => {
                if let Some(c) = other.fold_const() {
                    if c.norm() == 0.0 {
                        return Err(Error::Analytic("derivative is identically zero".into()));
                    }
                    return Ok(());
                }
                match other.poly_coeffs() {
                    Some(p) => out.push(p),
                    None => {
                        return Err(Error::UnsupportedExpr(format!(
                            "cannot locate zeros of factor {}",
                            other
                        )))
                    }
                }
            }
        }
        Ok(())
    }
    let mut factors = Vec::new();
    split(&f.deriv, &mut factors)?;
    let mut pts = Vec::new();
    for p in factors {
        pts.extend(poly_roots(&p));
    }
    Ok(cluster_points(pts, 1e-8))
}

/// Finite asymptotic values, by structural recursion over the tree.
/// Supported shapes: polynomials (none), exp(u), and affine images.
fn asymptotic_finite(e: &Expr) -> Result<Vec<Complex64>> {
    if e.poly_coeffs().is_some() {
        return Ok(Vec::new());
    }
    match e {
        Expr::Exp(u) => {
            let mut vals = vec![Complex64::new(0.0, 0.0)];
            for a in asymptotic_finite(u)? {
                vals.push(a.exp());
            }
            Ok(vals)
        }
        Expr::Add(a, b) => {
            if let Some(c) = a.fold_const() {
                Ok(asymptotic_finite(b)?.into_iter().map(|v| v + c).collect())
            } else if let Some(c) = b.fold_const() {
                Ok(asymptotic_finite(a)?.into_iter().map(|v| v + c).collect())
            } else {
                Err(Error::UnsupportedExpr(format!(
                    "asymptotic values of sum {}",
                    e
                )))
            }
        }
        Expr::Mul(a, b) => {
            if let Some(c) = a.fold_const() {
                Ok(asymptotic_finite(b)?.into_iter().map(|v| v * c).collect())
            } else if let Some(c) = b.fold_const() {
                Ok(asymptotic_finite(a)?.into_iter().map(|v| v * c).collect())
            } else {
                Err(Error::UnsupportedExpr(format!(
                    "asymptotic values of product {}",
                    e
                )))
            }
        }
        Expr::Pow(u, n) => Ok(asymptotic_finite(u)?
            .into_iter()
            .map(|v| v.powu(*n))
            .collect()),
        _ => Err(Error::UnsupportedExpr(format!("asymptotic values of {}", e))),
    }
}

/// Singular values of f: critical values plus finite asymptotic
/// values plus infinity, sorted, with kind flags merged.
pub fn singular_values(f: &CatalogFunction) -> Result<Vec<SingularValue>> {
    if f.expr.fold_const().is_some() {
        return Err(Error::Analytic("constant function has no line complex".into()));
    }
    let crit_vals: Vec<Complex64> = critical_points(f)?
        .into_iter()
        .map(|z| f.eval(z))
        .collect();
    let asym_vals = asymptotic_finite(&f.expr)?;

    let mut out: Vec<SingularValue> = Vec::new();
    let mut put = |v: Complex64, crit: bool, asym: bool| {
        for sv in out.iter_mut() {
            if let Some(existing) = sv.value.as_complex() {
                if (existing - v).norm() <= 1e-9 * (1.0 + v.norm()) {
                    sv.critical |= crit;
                    sv.asymptotic |= asym;
                    return;
                }
            }
        }
        out.push(SingularValue {
            value: SphereValue::finite(v.re, v.im),
            critical: crit,
            asymptotic: asym,
        });
    };
    for v in crit_vals {
        put(v, true, false);
    }
    for v in asym_vals {
        put(v, false, true);
    }
    out.sort_by(|a, b| {
        let ka = a.value.as_complex().unwrap();
        let kb = b.value.as_complex().unwrap();
        (ka.re, ka.im).partial_cmp(&(kb.re, kb.im)).unwrap()
    });
    out.push(SingularValue { value: SphereValue::Infinity, critical: false, asymptotic: true });
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct OrderRow {
    pub r: f64,
    pub ln_max_modulus: f64,
    /// ln ln M(r) / ln r; None when M(r) <= e.
    pub rho: Option<f64>,
}

/// Growth-order diagnostic: sample |f| on circles and report
/// ln ln M(r) / ln r per radius.
pub fn order_estimate(f: &CatalogFunction, radii: &[f64], samples: usize) -> Result<Vec<OrderRow>> {
    if samples < 8 {
        return Err(Error::Analytic("need at least 8 circle samples".into()));
    }
    let mut rows = Vec::new();
    for &r in radii {
        if !(r > std::f64::consts::E) {
            return Err(Error::Analytic(format!(
                "radius {} must exceed e for the order quotient",
                r
            )));
        }
        let mut ln_m = f64::NEG_INFINITY;
        for j in 0..samples {
            let th = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
            let z = Complex64::from_polar(r, th);
            ln_m = ln_m.max(f.eval_scaled(z).ln_abs());
        }
        let rho = if ln_m > 1.0 { Some(ln_m.ln() / r.ln()) } else { None };
        rows.push(OrderRow { r, ln_max_modulus: ln_m, rho });
    }
    Ok(rows)
}

/// h(x) = ln(x + ln(1 + e^-x)) continued across 0 as ln ln(1 + e^x).
/// Stable for |x| up to 1e308: tail expansions keep it exact where
/// e^x would under- or overflow.
pub fn glue_h(x: f64) -> f64 {
    if x > 0.0 {
        (x + (-x).exp().ln_1p()).ln()
    } else if x <= -30.0 {
        x - 0.5 * x.exp()
    } else {
        x.exp().ln_1p().ln()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GlueRow {
    pub x: f64,
    pub h: f64,
    pub h_minus_x: f64,
    /// h / ln x; None for x <= 0 or x == 1.
    pub h_over_ln_x: Option<f64>,
}

pub fn gluing_check(xs: &[f64]) -> Vec<GlueRow> {
    xs.iter()
        .map(|&x| {
            let h = glue_h(x);
            let ratio = if x > 0.0 && x != 1.0 { Some(h / x.ln()) } else { None };
            GlueRow { x, h, h_minus_x: h - x, h_over_ln_x: ratio }
        })
        .collect()
}
