use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// An information quantity in nats (natural-log units).
///
/// Every entropy, mutual-information, and rate value inside the library is
/// kept in nats; conversion to bits happens only at the output-formatting
/// layer via [`Nats::to_bits`]. `f64::INFINITY` serves as the explicit
/// infinity sentinel (e.g. a KL divergence with support mismatch).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Nats(pub f64);

impl Nats {
    pub const ZERO: Nats = Nats(0.0);
    pub const INFINITY: Nats = Nats(f64::INFINITY);

    pub fn new(v: f64) -> Self {
        Nats(v)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Converts to bits by dividing by ln 2.
    pub fn to_bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl From<f64> for Nats {
    fn from(v: f64) -> Self {
        Nats(v)
    }
}

impl fmt::Display for Nats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nats", self.0)
    }
}

impl Add for Nats {
    type Output = Nats;
    fn add(self, rhs: Nats) -> Nats {
        Nats(self.0 + rhs.0)
    }
}

impl AddAssign for Nats {
    fn add_assign(&mut self, rhs: Nats) {
        self.0 += rhs.0;
    }
}

impl Sub for Nats {
    type Output = Nats;
    fn sub(self, rhs: Nats) -> Nats {
        Nats(self.0 - rhs.0)
    }
}

impl Neg for Nats {
    type Output = Nats;
    fn neg(self) -> Nats {
        Nats(-self.0)
    }
}

impl Mul<f64> for Nats {
    type Output = Nats;
    fn mul(self, rhs: f64) -> Nats {
        Nats(self.0 * rhs)
    }
}

impl Div<f64> for Nats {
    type Output = Nats;
    fn div(self, rhs: f64) -> Nats {
        Nats(self.0 / rhs)
    }
}
