//! Exact arithmetic over the fourth roots of unity and the Gaussian integers.
//!
//! Every entry of a supported matrix is a unit of `Z[i]`, so row inner
//! products, minors and Smith normal forms are all computed without rounding.
//! Values are stored in `i64`; for matrices of order at most 8 with unit
//! entries every minor is bounded by the Hadamard bound (`|det| <= 8^4`), and
//! the fraction-free elimination below only ever holds minors, so the width
//! is far from exhausted.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Root orders handled by the crate.
pub const SUPPORTED_ORDERS: [u8; 3] = [1, 2, 4];

pub(crate) fn check_order(q: u8) -> Result<()> {
    if SUPPORTED_ORDERS.contains(&q) {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder(q))
    }
}

/// The root of unity `exp(2 pi i k / q)`, stored as the residue `k mod q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseExponent {
    k: u8,
    q: u8,
}

impl PhaseExponent {
    /// Reduces `k` modulo `q`. Fails for `q` outside {1, 2, 4}.
    pub fn new(k: i64, q: u8) -> Result<Self> {
        check_order(q)?;
        Ok(Self {
            k: k.rem_euclid(q as i64) as u8,
            q,
        })
    }

    pub fn zero(q: u8) -> Result<Self> {
        Self::new(0, q)
    }

    pub fn k(self) -> u8 {
        self.k
    }

    pub fn q(self) -> u8 {
        self.q
    }

    /// Product of the represented roots. Panics when the moduli differ.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Self) -> Self {
        assert_eq!(self.q, other.q, "phase moduli differ");
        Self {
            k: (self.k + other.k) % self.q,
            q: self.q,
        }
    }

    pub fn conj(self) -> Self {
        Self {
            k: (self.q - self.k) % self.q,
            q: self.q,
        }
    }
}

/// Exact value of a root of unity as a Gaussian integer.
pub fn phase_to_gaussian(p: PhaseExponent) -> Result<GaussianInt> {
    check_order(p.q)?;
    Ok(unit_from_exponent(p.k, p.q))
}

/// `zeta_q^k` for a supported `q`; `k` must already be reduced.
#[inline]
pub(crate) fn unit_from_exponent(k: u8, q: u8) -> GaussianInt {
    // map onto the fourth roots: zeta_q^k = i^(4k/q)
    match (k as u32 * 4 / q as u32) % 4 {
        0 => GaussianInt::ONE,
        1 => GaussianInt::I,
        2 => GaussianInt::new(-1, 0),
        _ => GaussianInt::new(0, -1),
    }
}

/// An element `re + im*i` of the Gaussian integers.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

impl GaussianInt {
    pub const ZERO: Self = Self { re: 0, im: 0 };
    pub const ONE: Self = Self { re: 1, im: 0 };
    pub const I: Self = Self { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn norm(self) -> i64 {
        self.re * self.re + self.im * self.im
    }

    /// Multiplication by `i^k`.
    pub fn mul_i_pow(self, k: u32) -> Self {
        match k % 4 {
            0 => self,
            1 => Self::new(-self.im, self.re),
            2 => -self,
            _ => Self::new(self.im, -self.re),
        }
    }

    /// Euclidean division: `self = q * d + r` with `norm(r) <= norm(d) / 2`.
    /// Panics on division by zero.
    pub fn div_rem(self, d: Self) -> (Self, Self) {
        let n = d.norm();
        assert!(n != 0, "division by zero in Z[i]");
        let num = self * d.conj();
        let q = Self::new(div_round(num.re, n), div_round(num.im, n));
        (q, self - q * d)
    }

    /// `Some(self / d)` when `d` divides `self` exactly.
    pub fn exact_div(self, d: Self) -> Option<Self> {
        if d.is_zero() {
            return if self.is_zero() {
                Some(Self::ZERO)
            } else {
                None
            };
        }
        let n = d.norm();
        let num = self * d.conj();
        if num.re % n == 0 && num.im % n == 0 {
            Some(Self::new(num.re / n, num.im / n))
        } else {
            None
        }
    }

    pub fn divides(self, other: Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.exact_div(self).is_some()
    }
}

/// Nearest-integer quotient, ties toward positive infinity.
fn div_round(a: i64, n: i64) -> i64 {
    debug_assert!(n > 0);
    (2 * a + n).div_euclid(2 * n)
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, 1) => write!(f, "i"),
            (0, -1) => write!(f, "-i"),
            (0, im) => write!(f, "{im}i"),
            (re, 1) => write!(f, "{re}+i"),
            (re, -1) => write!(f, "{re}-i"),
            (re, im) if im > 0 => write!(f, "{re}+{im}i"),
            (re, im) => write!(f, "{re}{im}i"),
        }
    }
}

impl Add for GaussianInt {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl AddAssign for GaussianInt {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for GaussianInt {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl SubAssign for GaussianInt {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for GaussianInt {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Mul for GaussianInt {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl From<i64> for GaussianInt {
    fn from(re: i64) -> Self {
        Self::new(re, 0)
    }
}

/// The associate of `z` with `re > 0` and `im >= 0`, or zero.
pub fn canonical_associate(z: GaussianInt) -> GaussianInt {
    if z.is_zero() {
        return z;
    }
    (0..4)
        .map(|k| z.mul_i_pow(k))
        .find(|w| w.re > 0 && w.im >= 0)
        .expect("exactly one associate lies in the first quadrant")
}

/// Greatest common divisor in `Z[i]`, returned as its canonical associate.
pub fn gaussian_gcd(a: GaussianInt, b: GaussianInt) -> Result<GaussianInt> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::Domain("gcd(0, 0) is undefined".into()));
    }
    let (mut x, mut y) = (a, b);
    while !y.is_zero() {
        let (_, r) = x.div_rem(y);
        x = y;
        y = r;
    }
    Ok(canonical_associate(x))
}

/// Exact determinant of the `d x d` row-major matrix `m`.
///
/// Fraction-free (Bareiss) elimination: every intermediate value is a minor
/// of the input, and each division is exact in `Z[i]`.
pub fn det_exact(m: &[GaussianInt], d: usize) -> GaussianInt {
    assert_eq!(m.len(), d * d, "matrix is not {d}x{d}");
    if d == 0 {
        return GaussianInt::ONE;
    }
    let mut a = m.to_vec();
    let mut negate = false;
    let mut prev = GaussianInt::ONE;
    for k in 0..d - 1 {
        if a[k * d + k].is_zero() {
            let Some(p) = (k + 1..d).find(|&i| !a[i * d + k].is_zero()) else {
                return GaussianInt::ZERO;
            };
            for j in 0..d {
                a.swap(k * d + j, p * d + j);
            }
            negate = !negate;
        }
        let pivot = a[k * d + k];
        for i in k + 1..d {
            let lead = a[i * d + k];
            for j in k + 1..d {
                let v = a[i * d + j] * pivot - lead * a[k * d + j];
                a[i * d + j] = v
                    .exact_div(prev)
                    .expect("fraction-free elimination divides exactly");
            }
        }
        prev = pivot;
    }
    let det = a[d * d - 1];
    if negate {
        -det
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    #[test]
    fn phase_values() {
        let p = |k| phase_to_gaussian(PhaseExponent::new(k, 4).unwrap()).unwrap();
        assert_eq!(p(0), g(1, 0));
        assert_eq!(p(1), g(0, 1));
        assert_eq!(p(2), g(-1, 0));
        assert_eq!(p(3), g(0, -1));
        assert_eq!(
            phase_to_gaussian(PhaseExponent::new(1, 2).unwrap()).unwrap(),
            g(-1, 0)
        );
        assert!(matches!(
            PhaseExponent::new(1, 3),
            Err(Error::UnsupportedOrder(3))
        ));
    }

    #[test]
    fn phase_reduction_and_homomorphism() {
        for q in SUPPORTED_ORDERS {
            for a in -8..8 {
                for b in -8..8 {
                    let pa = PhaseExponent::new(a, q).unwrap();
                    let pb = PhaseExponent::new(b, q).unwrap();
                    assert!(pa.k() < q);
                    let lhs = phase_to_gaussian(PhaseExponent::new(a + b, q).unwrap()).unwrap();
                    let rhs = phase_to_gaussian(pa).unwrap() * phase_to_gaussian(pb).unwrap();
                    assert_eq!(lhs, rhs);
                    assert_eq!(lhs.norm(), 1);
                    assert_eq!(pa.mul(pa.conj()).k(), 0);
                }
            }
        }
    }

    #[test]
    fn small_determinants() {
        assert_eq!(det_exact(&[g(1, 0)], 1), g(1, 0));
        assert_eq!(
            det_exact(&[g(1, 0), g(1, 0), g(1, 0), g(-1, 0)], 2),
            g(-2, 0)
        );
        assert_eq!(
            det_exact(&[g(1, 0), g(1, 0), g(1, 0), g(0, 1)], 2),
            g(-1, 1)
        );
        // zero leading pivot forces a swap
        assert_eq!(
            det_exact(&[g(0, 0), g(1, 0), g(1, 0), g(0, 0)], 2),
            g(-1, 0)
        );
        assert_eq!(det_exact(&[g(1, 0); 9], 3), GaussianInt::ZERO);
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gaussian_gcd(g(2, 0), g(1, 1)).unwrap(), g(1, 1));
        assert_eq!(gaussian_gcd(g(3, 0), g(5, 0)).unwrap(), g(1, 0));
        assert_eq!(
            gaussian_gcd(g(-3, 4), g(0, 0)).unwrap(),
            canonical_associate(g(-3, 4))
        );
        assert_eq!(gaussian_gcd(g(0, 0), g(0, -7)).unwrap(), g(7, 0));
        assert!(matches!(
            gaussian_gcd(g(0, 0), g(0, 0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn associates() {
        assert_eq!(canonical_associate(g(0, 0)), g(0, 0));
        assert_eq!(canonical_associate(g(-2, 0)), g(2, 0));
        assert_eq!(canonical_associate(g(-1, 1)), g(1, 1));
        assert_eq!(canonical_associate(g(0, 3)), g(3, 0));
        assert_eq!(canonical_associate(g(2, -1)), g(1, 2));
    }

    #[test]
    fn euclidean_remainder_is_small() {
        for a in -9..=9 {
            for b in -9..=9 {
                for c in -4..=4 {
                    for e in -4..=4 {
                        let (x, d) = (g(a, b), g(c, e));
                        if d.is_zero() {
                            continue;
                        }
                        let (q, r) = x.div_rem(d);
                        assert_eq!(q * d + r, x);
                        assert!(2 * r.norm() <= d.norm());
                    }
                }
            }
        }
    }

    #[test]
    fn display() {
        assert_eq!(g(-1, 1).to_string(), "-1+i");
        assert_eq!(g(2, -3).to_string(), "2-3i");
        assert_eq!(g(0, -1).to_string(), "-i");
        assert_eq!(g(4, 0).to_string(), "4");
    }
}
