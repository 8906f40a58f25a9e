use num_complex::Complex64;
use std::fmt;

use crate::error::{Error, Result};

/// Expression tree for entire functions built from z, constants,
/// +, *, integer powers, and exp. Division is folded into constants
/// at parse time, so it never appears here.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Z,
    Const(Complex64),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Exp(Box<Expr>),
}

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl Expr {
    pub fn constant(v: Complex64) -> Expr {
        Expr::Const(v)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, n: u32) -> Expr {
        Expr::Pow(Box::new(a), n)
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::Exp(Box::new(a))
    }

    /// Value of the subtree if it contains no z.
    pub fn fold_const(&self) -> Option<Complex64> {
        match self {
            Expr::Z => None,
            Expr::Const(c) => Some(*c),
            Expr::Add(a, b) => Some(a.fold_const()? + b.fold_const()?),
            Expr::Mul(a, b) => Some(a.fold_const()? * b.fold_const()?),
            Expr::Pow(a, n) => Some(a.fold_const()?.powu(*n)),
            Expr::Exp(a) => Some(a.fold_const()?.exp()),
        }
    }

    /// Coefficient list (ascending powers) if the subtree is a polynomial.
    pub fn poly_coeffs(&self) -> Option<Vec<Complex64>> {
        fn conv(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
            let mut out = vec![cx(0.0); a.len() + b.len() - 1];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        }
        match self {
            Expr::Z => Some(vec![cx(0.0), cx(1.0)]),
            Expr::Const(c) => Some(vec![*c]),
            Expr::Add(a, b) => {
                let (pa, pb) = (a.poly_coeffs()?, b.poly_coeffs()?);
                let mut out = vec![cx(0.0); pa.len().max(pb.len())];
                for (i, &x) in pa.iter().enumerate() {
                    out[i] += x;
                }
                for (i, &x) in pb.iter().enumerate() {
                    out[i] += x;
                }
                Some(out)
            }
            Expr::Mul(a, b) => Some(conv(&a.poly_coeffs()?, &b.poly_coeffs()?)),
            Expr::Pow(a, n) => {
                if *n > 256 {
                    return None;
                }
                let p = a.poly_coeffs()?;
                let mut out = vec![cx(1.0)];
                for _ in 0..*n {
                    out = conv(&out, &p);
                    if out.len() > 512 {
                        return None;
                    }
                }
                Some(out)
            }
            Expr::Exp(a) => {
                // exp of a constant is still a constant polynomial
                a.fold_const().map(|c| vec![c.exp()])
            }
        }
    }

    /// Symbolic derivative, lightly simplified.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Z => Expr::Const(cx(1.0)),
            Expr::Const(_) => Expr::Const(cx(0.0)),
            Expr::Add(a, b) => simplify(Expr::add(a.derivative(), b.derivative())),
            Expr::Mul(a, b) => simplify(Expr::add(
                simplify(Expr::mul(a.derivative(), (**b).clone())),
                simplify(Expr::mul((**a).clone(), b.derivative())),
            )),
            Expr::Pow(a, n) => {
                if *n == 0 {
                    return Expr::Const(cx(0.0));
                }
                simplify(Expr::mul(
                    Expr::mul(Expr::Const(cx(*n as f64)), Expr::pow((**a).clone(), n - 1)),
                    a.derivative(),
                ))
            }
            Expr::Exp(a) => simplify(Expr::mul(Expr::exp((**a).clone()), a.derivative())),
        }
    }

    /// Replace z by the given expression.
    pub fn substitute(&self, with: &Expr) -> Expr {
        match self {
            Expr::Z => with.clone(),
            Expr::Const(c) => Expr::Const(*c),
            Expr::Add(a, b) => simplify(Expr::add(a.substitute(with), b.substitute(with))),
            Expr::Mul(a, b) => simplify(Expr::mul(a.substitute(with), b.substitute(with))),
            Expr::Pow(a, n) => simplify(Expr::pow(a.substitute(with), *n)),
            Expr::Exp(a) => simplify(Expr::exp(a.substitute(with))),
        }
    }
}

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if c.re == 0.0 && c.im == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if c.re == 1.0 && c.im == 0.0)
}

pub fn simplify(e: Expr) -> Expr {
    match e {
        Expr::Add(a, b) => {
            if is_zero(&a) {
                return *b;
            }
            if is_zero(&b) {
                return *a;
            }
            if let (Expr::Const(x), Expr::Const(y)) = (&*a, &*b) {
                return Expr::Const(x + y);
            }
            Expr::Add(a, b)
        }
        Expr::Mul(a, b) => {
            if is_zero(&a) || is_zero(&b) {
                return Expr::Const(cx(0.0));
            }
            if is_one(&a) {
                return *b;
            }
            if is_one(&b) {
                return *a;
            }
            if let (Expr::Const(x), Expr::Const(y)) = (&*a, &*b) {
                return Expr::Const(x * y);
            }
            Expr::Mul(a, b)
        }
        Expr::Pow(a, n) => {
            if n == 0 {
                return Expr::Const(cx(1.0));
            }
            if n == 1 {
                return *a;
            }
            if let Expr::Const(x) = &*a {
                return Expr::Const(x.powu(n));
            }
            Expr::Pow(a, n)
        }
        Expr::Exp(a) => {
            if let Expr::Const(x) = &*a {
                return Expr::Const(x.exp());
            }
            Expr::Exp(a)
        }
        other => other,
    }
}

fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        if c.re >= 0.0 || c.re.fract() != 0.0 {
            format!("{}", c.re)
        } else {
            format!("{}", c.re)
        }
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("({}{}i)", c.re, c.im)
    } else {
        format!("({}+{}i)", c.re, c.im)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Z => write!(f, "z"),
            Expr::Const(c) => write!(f, "{}", fmt_complex(*c)),
            Expr::Add(a, b) => write!(f, "({} + {})", a, b),
            Expr::Mul(a, b) => write!(f, "({} * {})", a, b),
            Expr::Pow(a, n) => write!(f, "{}^{}", wrap(a), n),
            Expr::Exp(a) => write!(f, "exp({})", a),
        }
    }
}

fn wrap(e: &Expr) -> String {
    match e {
        Expr::Z | Expr::Const(_) | Expr::Exp(_) => format!("{}", e),
        _ => format!("({})", e),
    }
}

// ---- parser ----

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let bytes: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        match ch {
            ' ' | '\t' => {
                i += 1;
            }
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            '/' => {
                toks.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                toks.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == '.') {
                    i += 1;
                }
                // scientific notation
                if i < bytes.len() && (bytes[i] == 'e' || bytes[i] == 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == '+' || bytes[j] == '-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = bytes[start..i].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| Error::FnParse(format!("bad number `{}`", text)))?;
                toks.push(Tok::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                toks.push(Tok::Ident(bytes[start..i].iter().collect()));
            }
            other => return Err(Error::FnParse(format!("unexpected character `{}`", other))),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    bindings: &'a [(String, Complex64)],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = simplify(Expr::add(lhs, rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = simplify(Expr::add(
                        lhs,
                        simplify(Expr::mul(Expr::Const(cx(-1.0)), rhs)),
                    ));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = simplify(Expr::mul(lhs, rhs));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    let c = rhs.fold_const().ok_or_else(|| {
                        Error::FnParse(format!("divisor `{}` is not constant", rhs))
                    })?;
                    if c.norm() == 0.0 {
                        return Err(Error::FnParse("division by zero".into()));
                    }
                    lhs = simplify(Expr::mul(lhs, Expr::Const(cx(1.0) / c)));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.unary()?;
            return Ok(simplify(Expr::mul(Expr::Const(cx(-1.0)), inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let expo = self.atom()?;
            let c = expo
                .fold_const()
                .ok_or_else(|| Error::FnParse("exponent must be a constant integer".into()))?;
            if c.im != 0.0 || c.re < 0.0 || c.re.fract() != 0.0 || c.re > 4096.0 {
                return Err(Error::FnParse(format!(
                    "exponent must be an integer in 0..=4096, got {}",
                    fmt_complex(c)
                )));
            }
            return Ok(simplify(Expr::pow(base, c.re as u32)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Const(cx(v))),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::FnParse("missing `)`".into())),
                }
            }
            Some(Tok::Ident(name)) => {
                if name == "z" {
                    return Ok(Expr::Z);
                }
                if name == "i" {
                    return Ok(Expr::Const(Complex64::new(0.0, 1.0)));
                }
                if name == "exp" {
                    match self.bump() {
                        Some(Tok::LParen) => {}
                        _ => return Err(Error::FnParse("expected `(` after exp".into())),
                    }
                    let inner = self.expr()?;
                    match self.bump() {
                        Some(Tok::RParen) => {}
                        _ => return Err(Error::FnParse("missing `)` after exp(...".into())),
                    }
                    return Ok(simplify(Expr::exp(inner)));
                }
                for (k, v) in self.bindings {
                    if *k == name {
                        return Ok(Expr::Const(*v));
                    }
                }
                Err(Error::FnParse(format!("unbound name `{}`", name)))
            }
            other => Err(Error::FnParse(format!("unexpected token {:?}", other))),
        }
    }
}

/// Parse "formula" or "formula with a=0.1, b=2". Binding values are
/// real or complex literals like 2, -0.5, 1e-3, 3i, 1+2i.
pub fn parse_formula(src: &str) -> Result<Expr> {
    let (formula, bindings) = match src.split_once(" with ") {
        Some((f, rest)) => {
            let mut binds = Vec::new();
            for part in rest.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let (name, val) = part
                    .split_once('=')
                    .ok_or_else(|| Error::FnParse(format!("bad binding `{}`", part)))?;
                let sv = crate::sphere::SphereValue::parse(val.trim())
                    .map_err(|e| Error::FnParse(format!("binding `{}`: {}", name.trim(), e)))?;
                let c = sv
                    .as_complex()
                    .ok_or_else(|| Error::FnParse(format!("binding `{}` must be finite", name)))?;
                binds.push((name.trim().to_string(), c));
            }
            (f, binds)
        }
        None => (src, Vec::new()),
    };
    let toks = lex(formula)?;
    let mut p = Parser { toks: &toks, pos: 0, bindings: &bindings };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(Error::FnParse(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(e: &Expr, z: Complex64) -> Complex64 {
        match e {
            Expr::Z => z,
            Expr::Const(c) => *c,
            Expr::Add(a, b) => ev(a, z) + ev(b, z),
            Expr::Mul(a, b) => ev(a, z) * ev(b, z),
            Expr::Pow(a, n) => ev(a, z).powu(*n),
            Expr::Exp(a) => ev(a, z).exp(),
        }
    }

    #[test]
    fn parse_and_eval() {
        let e = parse_formula("exp(z) + 1").unwrap();
        let v = ev(&e, Complex64::new(0.0, 0.0));
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-15);

        let e = parse_formula("z^2 + 1/10").unwrap();
        let v = ev(&e, Complex64::new(1.0, 0.0));
        assert!((v - Complex64::new(1.1, 0.0)).norm() < 1e-15);

        let e = parse_formula("a*(exp(exp(z)) - 1) + 1 with a=100").unwrap();
        let v = ev(&e, Complex64::new(0.0, 0.0));
        // 100*(e^1 - 1) + 1
        assert!((v.re - (100.0 * (1f64.exp() - 1.0) + 1.0)).abs() < 1e-10);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(parse_formula("z / z").is_err());
        assert!(parse_formula("z ^ z").is_err());
        assert!(parse_formula("q + 1").is_err());
        assert!(parse_formula("exp z").is_err());
        assert!(parse_formula("(z + 1").is_err());
        assert!(parse_formula("z^-2").is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let cases = ["exp(z) + 1", "z^3 - 2*z + 5", "exp(exp(z))", "exp(z^2)", "-z^2 * exp(z)"];
        for src in cases {
            let e = parse_formula(src).unwrap();
            let d = e.derivative();
            let z = Complex64::new(0.3, -0.7);
            let h = 1e-6;
            let fd = (ev(&e, z + Complex64::new(h, 0.0)) - ev(&e, z - Complex64::new(h, 0.0)))
                / Complex64::new(2.0 * h, 0.0);
            let sym = ev(&d, z);
            assert!(
                (fd - sym).norm() < 1e-6 * (1.0 + sym.norm()),
                "{}: fd {} vs sym {}",
                src,
                fd,
                sym
            );
        }
    }

    #[test]
    fn poly_coeffs_work() {
        let e = parse_formula("(z + 1)^2").unwrap();
        let p = e.poly_coeffs().unwrap();
        assert_eq!(p.len(), 3);
        assert!((p[0].re - 1.0).abs() < 1e-15);
        assert!((p[1].re - 2.0).abs() < 1e-15);
        assert!((p[2].re - 1.0).abs() < 1e-15);
        assert!(parse_formula("exp(z)").unwrap().poly_coeffs().is_none());
    }

    #[test]
    fn substitute_shifts() {
        // f(z) = z^2, g(z) = f(1 + z) = (1+z)^2
        let f = parse_formula("z^2").unwrap();
        let g = f.substitute(&parse_formula("1 + z").unwrap());
        let v = ev(&g, Complex64::new(2.0, 0.0));
        assert!((v.re - 9.0).abs() < 1e-15);
    }
}
