use std::ops::{Add, Div, Mul, Neg, Sub};

/// Order-2 truncated Taylor jet: value, first and second derivative with
/// respect to a single scalar parameter.
///
/// Every operation follows the truncated composition rule
/// `f(u)'' = f''(u)·u'² + f'(u)·u''`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Jet2 { v, d1, d2 }
    }

    pub const fn constant(v: f64) -> Self {
        Jet2 { v, d1: 0.0, d2: 0.0 }
    }

    /// The independent variable itself at `t`.
    pub const fn variable(t: f64) -> Self {
        Jet2 { v: t, d1: 1.0, d2: 0.0 }
    }

    /// Moving along a line `t + s·rate` in the parameter `s`.
    pub const fn along(t: f64, rate: f64) -> Self {
        Jet2 { v: t, d1: rate, d2: 0.0 }
    }

    pub fn is_constant(&self) -> bool {
        self.d1 == 0.0 && self.d2 == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    /// Chain rule with an outer function whose value and first two
    /// derivatives at `self.v` are `f0, f1, f2`.
    pub fn compose(self, f0: f64, f1: f64, f2: f64) -> Self {
        Jet2 {
            v: f0,
            d1: f1 * self.d1,
            d2: f2 * self.d1 * self.d1 + f1 * self.d2,
        }
    }

    pub fn exp(self) -> Self {
        let e = libm::exp(self.v);
        self.compose(e, e, e)
    }

    pub fn ln(self) -> Self {
        let inv = 1.0 / self.v;
        self.compose(libm::log(self.v), inv, -inv * inv)
    }

    pub fn sin(self) -> Self {
        let (s, c) = (libm::sin(self.v), libm::cos(self.v));
        self.compose(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = (libm::sin(self.v), libm::cos(self.v));
        self.compose(c, -s, -c)
    }

    pub fn recip(self) -> Self {
        Jet2::constant(1.0) / self
    }

    /// `self^c` for a constant exponent.
    pub fn powf(self, c: f64) -> Self {
        if c == 0.0 {
            return Jet2::constant(1.0);
        }
        if c == 1.0 {
            return self;
        }
        let f0 = libm::pow(self.v, c);
        let f1 = c * libm::pow(self.v, c - 1.0);
        let f2 = c * (c - 1.0) * libm::pow(self.v, c - 2.0);
        self.compose(f0, f1, f2)
    }

    /// `self^other` for a varying exponent, as `exp(other · ln self)`.
    pub fn powj(self, other: Jet2) -> Self {
        (other * self.ln()).exp()
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2::new(-self.v, -self.d1, -self.d2)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        let v = self.v / o.v;
        let d1 = (self.d1 - v * o.d1) / o.v;
        let d2 = (self.d2 - 2.0 * d1 * o.d1 - v * o.d2) / o.v;
        Jet2::new(v, d1, d2)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, k: f64) -> Jet2 {
        Jet2::new(self.v * k, self.d1 * k, self.d2 * k)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, k: f64) -> Jet2 {
        Jet2::new(self.v + k, self.d1, self.d2)
    }
}
