//! Sign plus natural-log magnitude scalars.
//!
//! The constants attached to regular pairs range from `exp(43 n)` up to
//! `exp(-2 exp(70 n))`, far outside the range of `f64`. A [`LogReal`] keeps
//! them exact up to the precision of the logarithm.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogReal {
    sign: i8,
    log_magnitude: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        sign: 0,
        log_magnitude: f64::NEG_INFINITY,
    };
    pub const ONE: LogReal = LogReal {
        sign: 1,
        log_magnitude: 0.0,
    };

    /// Positive value `exp(ln_value)`.
    pub fn from_ln(ln_value: f64) -> Self {
        if ln_value == f64::NEG_INFINITY {
            return LogReal::ZERO;
        }
        LogReal {
            sign: 1,
            log_magnitude: ln_value,
        }
    }

    pub fn from_sign_ln(sign: i8, ln_magnitude: f64) -> Self {
        match sign.signum() {
            0 => LogReal::ZERO,
            _ if ln_magnitude == f64::NEG_INFINITY => LogReal::ZERO,
            s => LogReal {
                sign: s,
                log_magnitude: ln_magnitude,
            },
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            LogReal::ZERO
        } else {
            LogReal {
                sign: if x > 0.0 { 1 } else { -1 },
                log_magnitude: x.abs().ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of `|self|`; `-inf` for zero.
    pub fn log_magnitude(&self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.log_magnitude
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Value as a double; saturates to 0 or infinity outside its range.
    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => s as f64 * self.log_magnitude.exp(),
        }
    }

    pub fn abs(&self) -> LogReal {
        LogReal {
            sign: self.sign.abs(),
            log_magnitude: self.log_magnitude,
        }
    }

    pub fn recip(&self) -> LogReal {
        assert!(self.sign != 0, "reciprocal of zero");
        LogReal {
            sign: self.sign,
            log_magnitude: -self.log_magnitude,
        }
    }

    pub fn powf(&self, e: f64) -> LogReal {
        assert!(self.sign >= 0, "real power of a negative LogReal");
        if self.sign == 0 {
            return LogReal::ZERO;
        }
        LogReal::from_ln(self.log_magnitude * e)
    }

    /// `ln(-ln x)` for `0 < x < 1`: the natural scale for double-exponentially
    /// small constants.
    pub fn ln_neg_ln(&self) -> f64 {
        assert!(self.sign > 0 && self.log_magnitude < 0.0, "needs 0 < x < 1");
        (-self.log_magnitude).ln()
    }
}

impl Mul for LogReal {
    type Output = LogReal;

    fn mul(self, rhs: LogReal) -> LogReal {
        if self.sign == 0 || rhs.sign == 0 {
            return LogReal::ZERO;
        }
        LogReal {
            sign: self.sign * rhs.sign,
            log_magnitude: self.log_magnitude + rhs.log_magnitude,
        }
    }
}

impl Div for LogReal {
    type Output = LogReal;

    fn div(self, rhs: LogReal) -> LogReal {
        self * rhs.recip()
    }
}

impl Neg for LogReal {
    type Output = LogReal;

    fn neg(self) -> LogReal {
        LogReal {
            sign: -self.sign,
            log_magnitude: self.log_magnitude,
        }
    }
}

impl Add for LogReal {
    type Output = LogReal;

    fn add(self, rhs: LogReal) -> LogReal {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_magnitude >= rhs.log_magnitude {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let diff = small.log_magnitude - big.log_magnitude;
        if big.sign == small.sign {
            LogReal {
                sign: big.sign,
                log_magnitude: big.log_magnitude + diff.exp().ln_1p(),
            }
        } else if diff == 0.0 {
            LogReal::ZERO
        } else {
            LogReal {
                sign: big.sign,
                log_magnitude: big.log_magnitude + (-diff.exp()).ln_1p(),
            }
        }
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &LogReal) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.log_magnitude.partial_cmp(&other.log_magnitude),
                _ => other.log_magnitude.partial_cmp(&self.log_magnitude),
            },
            o => Some(o),
        }
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            _ if self.log_magnitude.abs() < 700.0 => write!(f, "{}", self.to_f64()),
            s if self.log_magnitude.abs() < 1e12 => {
                write!(f, "{}exp({})", if s < 0 { "-" } else { "" }, self.log_magnitude)
            }
            s => write!(f, "{}exp({:e})", if s < 0 { "-" } else { "" }, self.log_magnitude),
        }
    }
}
