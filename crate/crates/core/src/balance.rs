//! The balance parameter β kept as an exact ratio.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid balance parameter `{0}`: expected a number in (0, 0.5]")]
pub struct BetaError(pub String);

/// Balance ratio in `(0, 1/2]`, stored as a reduced fraction so that every
/// balance comparison is done in integer arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Beta {
    num: u32,
    den: u32,
}

impl Beta {
    pub const DEFAULT: Beta = Beta { num: 1, den: 5 };

    pub fn new(num: u32, den: u32) -> Result<Beta, BetaError> {
        if num == 0 || den == 0 || 2 * num as u64 > den as u64 {
            return Err(BetaError(format!("{num}/{den}")));
        }
        let g = num.gcd(&den);
        Ok(Beta {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numerator(self) -> u32 {
        self.num
    }

    pub fn denominator(self) -> u32 {
        self.den
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `⌈β·n⌉`, at least 1 and at most `n / 2` for `n ≥ 2`.
    pub fn side_quota(self, n: usize) -> usize {
        let raw = (self.num as u64 * n as u64).div_ceil(self.den as u64) as usize;
        raw.max(1).min((n / 2).max(1))
    }

    /// Whether `part ≤ (1 − β)·whole`.
    pub fn within_upper(self, part: usize, whole: usize) -> bool {
        part as u128 * self.den as u128 <= (self.den - self.num) as u128 * whole as u128
    }

    /// `1/(1 − β)`, the base of the height bound.
    pub fn alpha(self) -> f64 {
        self.den as f64 / (self.den - self.num) as f64
    }

    /// `⌈log_α n⌉`, the maximum height of a balanced hierarchy over `n` vertices.
    pub fn height_bound(self, n: usize) -> usize {
        if n <= 1 {
            return 0;
        }
        let exact = (n as f64).ln() / self.alpha().ln();
        // guard against ln rounding just above an integer
        (exact - 1e-9).ceil() as usize
    }
}

impl Default for Beta {
    fn default() -> Self {
        Beta::DEFAULT
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl FromStr for Beta {
    type Err = BetaError;

    /// Parses a decimal such as `0.2` exactly, or a fraction such as `1/5`.
    fn from_str(s: &str) -> Result<Beta, BetaError> {
        let err = || BetaError(s.to_string());
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse().map_err(|_| err())?;
            let d = d.trim().parse().map_err(|_| err())?;
            return Beta::new(n, d).map_err(|_| err());
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| err())? };
        let den = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| err())? };
        let num = int.checked_mul(den).and_then(|x| x.checked_add(frac)).ok_or_else(err)?;
        let g = num.gcd(&den);
        let (num, den) = (num / g.max(1), den / g.max(1));
        Beta::new(
            u32::try_from(num).map_err(|_| err())?,
            u32::try_from(den).map_err(|_| err())?,
        )
        .map_err(|_| err())
    }
}
