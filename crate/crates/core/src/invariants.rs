//! First integrals of the recurrence and their Lyness-map counterparts.
//!
//! `V1` and `V2` are exactly conserved along every orbit of the map
//! `F(x, y, z, w) = (y, z, w, max(0, y, z, w) - x)`:
//!
//! ```text
//! V1 = max(0, x, y, z, w) + max(0, -x) + max(0, -y) + max(0, -z) + max(0, -w)
//! V2 = max(0, x, y, z, w, x + w) + max(0, x, y) + max(0, y, z) + max(0, z, w)
//!      - x - y - z - w
//! ```
//!
//! They arise as the tropical limits of the first integrals `H1`, `H2` of
//! the fourth-order Lyness map `L4(x, y, z, w) = (y, z, w, (a + y + z + w)/x)`:
//! substituting `e^(X/eps)` for each coordinate in `eps * ln H` and letting
//! `eps -> 0` turns products into sums and sums into maxima, carrying `H1`
//! to `V1` and `H2` to `V2` (with `a = 1`, so the parameter term becomes 0).
//! [`tropical_limit_residual`] measures that convergence numerically.

use core::fmt;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Float, Zero};

use crate::gcd::{gcd_int, make_ratio};
use crate::recurrence::{step_forward, Tuple4};
use crate::scalar::{Rational, Scalar};

/// `V1`: the orbit maximum plus the negative parts of the window.
pub fn v1(w: &Tuple4) -> Scalar {
    let zero = Scalar::zero();
    let [x, y, z, t] = w.entries();
    let mut acc = [&zero, x, y, z, t].into_iter().max().unwrap().clone();
    for e in w.entries() {
        let neg = -e;
        acc = &acc + core::cmp::max(&zero, &neg);
    }
    acc
}

/// `V2`: the second, functionally independent first integral.
pub fn v2(w: &Tuple4) -> Scalar {
    let zero = Scalar::zero();
    let [x, y, z, t] = w.entries();
    let xw = x + t;
    let m0 = [&zero, x, y, z, t, &xw].into_iter().max().unwrap().clone();
    let m1 = [&zero, x, y].into_iter().max().unwrap();
    let m2 = [&zero, y, z].into_iter().max().unwrap();
    let m3 = [&zero, z, t].into_iter().max().unwrap();
    let sum = &(&(x + y) + z) + t;
    &(&(&m0 + m1) + &(m2 + m3)) - &sum
}

/// True iff both `V1` and `V2` are exactly constant along `n_steps` forward
/// applications of the map.
pub fn check_invariance(w: &Tuple4, n_steps: u64) -> bool {
    let (v1_0, v2_0) = (v1(w), v2(w));
    let mut cur = w.clone();
    for _ in 0..n_steps {
        cur = step_forward(&cur);
        if v1(&cur) != v1_0 || v2(&cur) != v2_0 {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantId {
    V1,
    V2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LynessError {
    DivisionByZero,
}

impl fmt::Display for LynessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lyness map: division by zero coordinate")
    }
}

impl core::error::Error for LynessError {}

mod sealed {
    pub trait Sealed {}
    impl Sealed for crate::scalar::Rational {}
    impl Sealed for f64 {}
}

/// Numeric kind usable as Lyness coordinates: exact rationals or floats.
pub trait LynessScalar: Clone + sealed::Sealed {
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
}

impl LynessScalar for f64 {
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
}

// The rational operations mirror the usual lowest-terms identities but run
// on the word-windowed gcd; orbit coordinates reach 10^5 bits where the
// default gcd is prohibitive.
impl LynessScalar for Rational {
    fn one() -> Self {
        Ratio::new_raw(BigInt::from(1), BigInt::from(1))
    }
    fn is_zero(&self) -> bool {
        self.numer().is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        let (na, da) = (self.numer(), self.denom());
        let (nb, db) = (other.numer(), other.denom());
        let g = gcd_int(da, db);
        if g == BigInt::from(1) {
            return Ratio::new_raw(na * db + nb * da, da * db);
        }
        let s = da / &g;
        let t = na * (db / &g) + nb * &s;
        let g2 = gcd_int(&t, &g);
        if g2 == BigInt::from(1) {
            Ratio::new_raw(t, s * db)
        } else {
            Ratio::new_raw(t / &g2, s * (db / g2))
        }
    }
    fn mul(&self, other: &Self) -> Self {
        let g1 = gcd_int(self.numer(), other.denom());
        let g2 = gcd_int(other.numer(), self.denom());
        Ratio::new_raw(
            (self.numer() / &g1) * (other.numer() / &g2),
            (self.denom() / &g2) * (other.denom() / &g1),
        )
    }
    fn div(&self, other: &Self) -> Self {
        let g1 = gcd_int(self.numer(), other.numer());
        let g2 = gcd_int(self.denom(), other.denom());
        make_ratio(
            (self.numer() / &g1) * (other.denom() / &g2),
            (self.denom() / &g2) * (other.numer() / &g1),
        )
    }
}

/// State of the fourth-order Lyness map, over exact rationals or floats.
#[derive(Debug, Clone, PartialEq)]
pub struct LynessState<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub w: T,
    /// The map parameter.
    pub a: T,
}

impl<T> LynessState<T> {
    pub fn new(x: T, y: T, z: T, w: T, a: T) -> Self {
        LynessState { x, y, z, w, a }
    }
}

/// One application of `L4`: `(y, z, w, (a + y + z + w)/x)`.
pub fn lyness_step<T: LynessScalar>(s: &LynessState<T>) -> Result<LynessState<T>, LynessError> {
    if s.x.is_zero() {
        return Err(LynessError::DivisionByZero);
    }
    let sum = s.a.add(&s.y).add(&s.z).add(&s.w);
    Ok(LynessState {
        x: s.y.clone(),
        y: s.z.clone(),
        z: s.w.clone(),
        w: sum.div(&s.x),
        a: s.a.clone(),
    })
}

/// Evaluate a first integral of `L4`:
///
/// ```text
/// H1 = (a + x + y + z + w)(x + 1)(y + 1)(z + 1)(w + 1) / (x y z w)
/// H2 = (a + x + y + z + w + x w)(1 + x + y)(1 + y + z)(1 + z + w) / (x y z w)
/// ```
pub fn lyness_h<T: LynessScalar>(
    s: &LynessState<T>,
    which: InvariantId,
) -> Result<T, LynessError> {
    if s.x.is_zero() || s.y.is_zero() || s.z.is_zero() || s.w.is_zero() {
        return Err(LynessError::DivisionByZero);
    }
    let one = T::one();
    let sum = s.a.add(&s.x).add(&s.y).add(&s.z).add(&s.w);
    let numer = match which {
        InvariantId::V1 => sum
            .mul(&s.x.add(&one))
            .mul(&s.y.add(&one))
            .mul(&s.z.add(&one))
            .mul(&s.w.add(&one)),
        InvariantId::V2 => sum
            .add(&s.x.mul(&s.w))
            .mul(&one.add(&s.x).add(&s.y))
            .mul(&one.add(&s.y).add(&s.z))
            .mul(&one.add(&s.z).add(&s.w)),
    };
    let denom = s.x.mul(&s.y).mul(&s.z).mul(&s.w);
    Ok(numer.div(&denom))
}

/// `H` as an unreduced integer fraction, computed without any gcd. Exact
/// equality of two values is then a cross-multiplication, which keeps bulk
/// conservation checks cheap even when coordinates have grown huge.
pub fn lyness_h_unreduced(
    s: &LynessState<Rational>,
    which: InvariantId,
) -> Result<(BigInt, BigInt), LynessError> {
    if [&s.x, &s.y, &s.z, &s.w].iter().any(|c| c.numer().is_zero()) {
        return Err(LynessError::DivisionByZero);
    }
    type Raw = (BigInt, BigInt);
    let raw = |r: &Rational| -> Raw { (r.numer().clone(), r.denom().clone()) };
    let add = |a: &Raw, b: &Raw| -> Raw { (&a.0 * &b.1 + &b.0 * &a.1, &a.1 * &b.1) };
    let mul = |a: &Raw, b: &Raw| -> Raw { (&a.0 * &b.0, &a.1 * &b.1) };
    let one: Raw = (BigInt::from(1), BigInt::from(1));
    let (x, y, z, w, a) = (raw(&s.x), raw(&s.y), raw(&s.z), raw(&s.w), raw(&s.a));
    let sum = add(&add(&add(&a, &x), &add(&y, &z)), &w);
    let numer = match which {
        InvariantId::V1 => mul(
            &mul(&sum, &mul(&add(&x, &one), &add(&y, &one))),
            &mul(&add(&z, &one), &add(&w, &one)),
        ),
        InvariantId::V2 => mul(
            &mul(&add(&sum, &mul(&x, &w)), &add(&add(&one, &x), &y)),
            &mul(&add(&add(&one, &y), &z), &add(&add(&one, &z), &w)),
        ),
    };
    let denom = mul(&mul(&x, &y), &mul(&z, &w));
    // value = numer / denom as unreduced fractions
    Ok((numer.0 * denom.1, numer.1 * denom.0))
}

/// Do two unreduced fractions denote the same rational?
pub fn unreduced_eq(a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> bool {
    &a.0 * &b.1 == &b.0 * &a.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TropicalError {
    /// An intermediate float was non-finite; retry with a larger `eps` or
    /// smaller coordinates.
    Overflow,
}

impl fmt::Display for TropicalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tropical limit evaluation overflowed")
    }
}

impl core::error::Error for TropicalError {}

/// `| eps * ln H_which(e^(x/eps), ..., a = 1) - V_which(x, ...) |` in float
/// arithmetic, stabilized with log-sum-exp. Tends to zero as `eps -> 0`
/// until it reaches float noise.
pub fn tropical_limit_residual(
    w: &Tuple4,
    which: InvariantId,
    eps: f64,
) -> Result<f64, TropicalError> {
    assert!(eps > 0.0, "eps must be positive");
    let [x, y, z, t] = w.entries();
    let (xf, yf, zf, wf) = (
        x.to_float(1e-12) / eps,
        y.to_float(1e-12) / eps,
        z.to_float(1e-12) / eps,
        t.to_float(1e-12) / eps,
    );
    // ln of each factor of H with coordinates e^(X/eps); a = 1 contributes
    // the constant term e^0 inside the leading factor
    let ln_h = match which {
        InvariantId::V1 => {
            log_sum_exp(&[0.0, xf, yf, zf, wf])
                + log_sum_exp(&[xf, 0.0])
                + log_sum_exp(&[yf, 0.0])
                + log_sum_exp(&[zf, 0.0])
                + log_sum_exp(&[wf, 0.0])
                - (xf + yf + zf + wf)
        }
        InvariantId::V2 => {
            log_sum_exp(&[0.0, xf, yf, zf, wf, xf + wf])
                + log_sum_exp(&[0.0, xf, yf])
                + log_sum_exp(&[0.0, yf, zf])
                + log_sum_exp(&[0.0, zf, wf])
                - (xf + yf + zf + wf)
        }
    };
    let exact = match which {
        InvariantId::V1 => v1(w),
        InvariantId::V2 => v2(w),
    }
    .to_float(1e-12);
    let residual = (eps * ln_h - exact).abs();
    if residual.is_finite() {
        Ok(residual)
    } else {
        Err(TropicalError::Overflow)
    }
}

fn log_sum_exp(us: &[f64]) -> f64 {
    let m = us.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = us.iter().map(|u| Float::exp(u - m)).sum();
    m + Float::ln(sum)
}
