use num_complex::Complex64;

/// A complex number in scaled form: value = m * e^s with s real.
/// Keeps towers like e^(e^20) finite where native floats overflow.
#[derive(Clone, Copy, Debug)]
pub struct Scaled {
    pub m: Complex64,
    pub s: f64,
}

impl Scaled {
    pub fn zero() -> Scaled {
        Scaled { m: Complex64::new(0.0, 0.0), s: 0.0 }
    }

    pub fn from_complex(z: Complex64) -> Scaled {
        Scaled { m: z, s: 0.0 }.normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.m.re == 0.0 && self.m.im == 0.0
    }

    fn normalized(mut self) -> Scaled {
        if self.is_zero() {
            self.s = 0.0;
            return self;
        }
        let a = self.m.norm();
        if !(1e-8..=1e8).contains(&a) && a.is_finite() && a > 0.0 {
            self.m /= a;
            self.s += a.ln();
        }
        self
    }

    pub fn add(self, other: Scaled) -> Scaled {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.s >= other.s { (self, other) } else { (other, self) };
        let f = (lo.s - hi.s).exp(); // <= 1, underflows harmlessly
        Scaled { m: hi.m + lo.m * f, s: hi.s }.normalized()
    }

    pub fn neg(self) -> Scaled {
        Scaled { m: -self.m, s: self.s }
    }

    pub fn sub(self, other: Scaled) -> Scaled {
        self.add(other.neg())
    }

    pub fn mul(self, other: Scaled) -> Scaled {
        if self.is_zero() || other.is_zero() {
            return Scaled::zero();
        }
        Scaled { m: self.m * other.m, s: self.s + other.s }.normalized()
    }

    pub fn div(self, other: Scaled) -> Scaled {
        Scaled { m: self.m / other.m, s: self.s - other.s }.normalized()
    }

    pub fn powu(self, n: u32) -> Scaled {
        if n == 0 {
            return Scaled::from_complex(Complex64::new(1.0, 0.0));
        }
        if self.is_zero() {
            return Scaled::zero();
        }
        let norm = self.normalized();
        let a = norm.m.norm();
        let m = (norm.m / a).powu(n);
        Scaled { m, s: norm.s * n as f64 + a.ln() * n as f64 }.normalized()
    }

    /// e^(self's value), again in scaled form.
    pub fn exp(self) -> Scaled {
        let f = self.s.exp(); // may be +inf
        let re = if self.m.re == 0.0 { 0.0 } else { self.m.re * f };
        let im = if self.m.im == 0.0 { 0.0 } else { self.m.im * f };
        if re == f64::NEG_INFINITY {
            return Scaled::zero();
        }
        if re == f64::INFINITY {
            return Scaled { m: Complex64::new(1.0, 0.0), s: f64::INFINITY };
        }
        Scaled { m: Complex64::from_polar(1.0, im), s: re }
    }

    /// ln |value|; -inf for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.s + self.m.norm().ln()
        }
    }

    pub fn arg(&self) -> f64 {
        self.m.arg()
    }

    /// Collapse to a native complex number (overflows to inf past e^709).
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.m * self.s.exp()
    }

    pub fn norm(&self) -> f64 {
        self.ln_abs().exp()
    }
}
