//! Sign plus natural-log magnitude, with the logarithm carried as an
//! unevaluated sum `hi + lo` of two doubles.
//!
//! Fitted quantities such as `exp(-psi/eps)` reach `exp(±1e7)` in the
//! advection-dominated regime. Products and quotients are additions of
//! logarithms; keeping the rounding error of those additions in `lo` makes
//! `kappa * d` style products exact to a few ulps even when both factors
//! have logarithms of order `1e7`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, PartialEq)]
pub struct LogScaled {
    sign: i8,
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn dd_add(h1: f64, l1: f64, h2: f64, l2: f64) -> (f64, f64) {
    let (s, e) = two_sum(h1, h2);
    let e = e + l1 + l2;
    let (s, e2) = two_sum(s, e);
    if s.is_finite() {
        (s, e2)
    } else {
        (s, 0.0)
    }
}

impl LogScaled {
    pub const ZERO: LogScaled = LogScaled {
        sign: 0,
        hi: f64::NEG_INFINITY,
        lo: 0.0,
    };
    pub const ONE: LogScaled = LogScaled {
        sign: 1,
        hi: 0.0,
        lo: 0.0,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            LogScaled::ZERO
        } else {
            let ax = x.abs();
            let hi = ax.ln();
            // exp(hi) misses ax by up to |hi| ulps; keep the remainder in lo
            let e = hi.exp();
            let lo = if e.is_finite() && e > 0.0 { (ax - e) / e } else { 0.0 };
            LogScaled::from_log_parts(if x > 0.0 { 1 } else { -1 }, hi, lo)
        }
    }

    /// `sign * exp(log_mag)`.
    pub fn from_log(sign: i8, log_mag: f64) -> Self {
        Self::from_log_parts(sign, log_mag, 0.0)
    }

    /// `sign * exp(hi + lo)` with the logarithm given as a double-double.
    pub fn from_log_parts(sign: i8, hi: f64, lo: f64) -> Self {
        if sign == 0 || hi == f64::NEG_INFINITY {
            return LogScaled::ZERO;
        }
        let (hi, lo) = dd_add(hi, lo, 0.0, 0.0);
        LogScaled {
            sign: sign.signum(),
            hi,
            lo,
        }
    }

    /// `exp(-psi / eps)`, with the quotient formed exactly to double-double
    /// precision.
    pub fn exp_neg_ratio(psi: f64, eps: f64) -> Self {
        let (q, r) = neg_ratio(psi, eps);
        LogScaled::from_log_parts(1, q, r)
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn log_mag(&self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.hi + self.lo
        }
    }

    pub fn log_parts(&self) -> (f64, f64) {
        (self.hi, self.lo)
    }

    pub fn is_finite(&self) -> bool {
        self.sign == 0 || (self.hi.is_finite() && self.lo.is_finite())
    }

    pub fn abs(self) -> Self {
        LogScaled {
            sign: self.sign.abs(),
            ..self
        }
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        LogScaled {
            sign: self.sign,
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    /// Multiplies by an ordinary double.
    pub fn scale(self, x: f64) -> Self {
        self * LogScaled::from_f64(x)
    }

    /// Plain double value: `0.0` on underflow, `±inf` on overflow.
    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.hi.exp() * self.lo.exp(),
        }
    }

    /// Like [`to_f64`](Self::to_f64) but `None` when the value overflows.
    pub fn try_to_f64(&self) -> Option<f64> {
        let v = self.to_f64();
        v.is_finite().then_some(v)
    }

    /// `self * exp(-shift)` as a plain double, where `shift` is a
    /// double-double logarithm.
    pub fn to_f64_shifted(&self, shift: (f64, f64)) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let (h, l) = dd_add(self.hi, self.lo, -shift.0, -shift.1);
        f64::from(self.sign) * h.exp() * l.exp()
    }

    /// Compares magnitudes.
    pub fn cmp_abs(&self, other: &LogScaled) -> Ordering {
        match (self.sign == 0, other.sign == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => {
                let d = (self.hi - other.hi) + (self.lo - other.lo);
                d.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
            }
        }
    }

    pub fn max_abs(self, other: LogScaled) -> LogScaled {
        if self.cmp_abs(&other) == Ordering::Less {
            other.abs()
        } else {
            self.abs()
        }
    }
}

/// `-psi / eps` as a double-double `(hi, lo)`.
pub(crate) fn neg_ratio(psi: f64, eps: f64) -> (f64, f64) {
    let q = psi / eps;
    if !q.is_finite() {
        return (-q, 0.0);
    }
    let r = (-q).mul_add(eps, psi);
    (-q, -(r / eps))
}

impl Default for LogScaled {
    fn default() -> Self {
        LogScaled::ZERO
    }
}

impl Mul for LogScaled {
    type Output = LogScaled;
    fn mul(self, rhs: LogScaled) -> LogScaled {
        if self.sign == 0 || rhs.sign == 0 {
            return LogScaled::ZERO;
        }
        let (hi, lo) = dd_add(self.hi, self.lo, rhs.hi, rhs.lo);
        LogScaled {
            sign: self.sign * rhs.sign,
            hi,
            lo,
        }
    }
}

impl Div for LogScaled {
    type Output = LogScaled;
    fn div(self, rhs: LogScaled) -> LogScaled {
        self * rhs.recip()
    }
}

impl Neg for LogScaled {
    type Output = LogScaled;
    fn neg(self) -> LogScaled {
        LogScaled {
            sign: -self.sign,
            ..self
        }
    }
}

impl Add for LogScaled {
    type Output = LogScaled;
    fn add(self, rhs: LogScaled) -> LogScaled {
        if rhs.sign == 0 {
            return self;
        }
        if self.sign == 0 {
            return rhs;
        }
        let (big, small) = if self.cmp_abs(&rhs) == Ordering::Less {
            (rhs, self)
        } else {
            (self, rhs)
        };
        let d = (small.hi - big.hi) + (small.lo - big.lo);
        let r = if big.sign == small.sign {
            d.exp().ln_1p()
        } else {
            // |1 - e^d| for d <= 0
            (-d.exp_m1()).ln()
        };
        if r == f64::NEG_INFINITY {
            return LogScaled::ZERO;
        }
        let (hi, lo) = dd_add(big.hi, big.lo, r, 0.0);
        LogScaled {
            sign: big.sign,
            hi,
            lo,
        }
    }
}

impl Sub for LogScaled {
    type Output = LogScaled;
    fn sub(self, rhs: LogScaled) -> LogScaled {
        self + (-rhs)
    }
}

impl std::iter::Sum for LogScaled {
    fn sum<I: Iterator<Item = LogScaled>>(iter: I) -> LogScaled {
        iter.fold(LogScaled::ZERO, |a, b| a + b)
    }
}

impl fmt::Debug for LogScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "LogScaled(0)"),
            s => write!(f, "LogScaled({}exp({:e}))", if s < 0 { "-" } else { "" }, self.log_mag()),
        }
    }
}

impl fmt::Display for LogScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.try_to_f64() {
            Some(v) if v != 0.0 || self.sign == 0 => write!(f, "{v:e}"),
            _ => fmt::Debug::fmt(self, f),
        }
    }
}
