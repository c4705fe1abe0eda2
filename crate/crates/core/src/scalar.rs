//! Exact arithmetic over the field spanned by square roots of squarefree
//! positive integers.
//!
//! A [`Scalar`] is a finite sum `c_1*sqrt(m_1) + c_2*sqrt(m_2) + ...` with
//! rational coefficients and squarefree radicands; radicand `1` holds the
//! rational part. Because `{sqrt(m) : m squarefree}` is linearly independent
//! over the rationals, the representation is unique, so equality of term maps
//! is equality of field elements and the empty map is exactly zero. The
//! recurrence only ever adds, subtracts, compares and scales by rationals, so
//! no radical-by-radical product is implemented.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, Sign as IntSign};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational; always stored reduced with positive
/// denominator.
pub type Rational = Ratio<BigInt>;

/// Sign of a scalar: the exact trichotomy used by every comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }
}

impl From<Sign> for Ordering {
    fn from(s: Sign) -> Ordering {
        match s {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

/// Requested the ratio against a zero divisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroDivisor;

impl fmt::Display for ZeroDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rational ratio against zero")
    }
}

impl core::error::Error for ZeroDivisor {}

/// Hard cap (in bits of working precision) for interval sign evaluation.
///
/// A nonzero element of the field always separates from zero, so escalation
/// terminates long before this; exhausting the cap indicates a bug and
/// panics with a diagnostic.
pub const SIGN_PRECISION_CAP: u32 = 65_536;

/// Exact element of the multi-quadratic field, in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    /// radicand (squarefree, >= 1) -> nonzero rational coefficient
    terms: BTreeMap<u64, Rational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar::from_rational(Ratio::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(1, q);
        }
        Scalar { terms }
    }

    /// `n/d` as a scalar. Panics if `d == 0`.
    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Scalar::from_rational(Ratio::new(BigInt::from(n), BigInt::from(d)))
    }

    /// `sqrt(n)` reduced to canonical form, e.g. `sqrt(8) = 2*sqrt(2)`.
    /// Panics if `n == 0`; use the parser for fallible construction.
    pub fn sqrt(n: u64) -> Self {
        assert!(n > 0, "radicand must be positive");
        let (outer, squarefree) = reduce_radicand(n);
        let mut s = Scalar::zero();
        s.add_term(squarefree, Ratio::from_integer(BigInt::from(outer)));
        s
    }

    /// Iterator over `(radicand, coefficient)` in increasing radicand order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    /// Coefficient of `sqrt(m)`, zero when absent.
    pub fn coefficient(&self, radicand: u64) -> Rational {
        self.terms.get(&radicand).cloned().unwrap_or_else(Ratio::zero)
    }

    /// The rational part (coefficient of radicand 1).
    pub fn rational_part(&self) -> Rational {
        self.coefficient(1)
    }

    /// True iff the value is rational (at most a radicand-1 term).
    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&m| m == 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, radicand: u64, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(radicand) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, q: &Rational) -> Scalar {
        if q.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(&m, c)| (m, c * q)).collect(),
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.sign() == Sign::Negative {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact sign. Zero iff the term map is empty; otherwise decided without
    /// rounding error (coefficient signs, a squaring comparison for two
    /// opposite-sign terms, or interval evaluation at escalating precision).
    pub fn sign(&self) -> Sign {
        if self.terms.is_empty() {
            return Sign::Zero;
        }
        let mut pos = 0usize;
        let mut neg = 0usize;
        for c in self.terms.values() {
            if c.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
        }
        if neg == 0 {
            return Sign::Positive;
        }
        if pos == 0 {
            return Sign::Negative;
        }
        if self.terms.len() == 2 {
            // c1*sqrt(m1) vs -c2*sqrt(m2): compare c1^2*m1 with c2^2*m2.
            // Equality is impossible: m1*m2 is not a perfect square.
            let mut it = self.terms.iter();
            let (&m1, c1) = it.next().unwrap();
            let (&m2, c2) = it.next().unwrap();
            let lhs = c1 * c1 * Ratio::from_integer(BigInt::from(m1));
            let rhs = c2 * c2 * Ratio::from_integer(BigInt::from(m2));
            return match lhs.cmp(&rhs) {
                Ordering::Greater => coeff_sign(c1),
                Ordering::Less => coeff_sign(c2),
                Ordering::Equal => unreachable!("distinct squarefree radicands"),
            };
        }
        let mut bits = 64;
        while bits <= SIGN_PRECISION_CAP {
            let (lo, hi) = self.bounds_scaled(bits);
            if lo.sign() == IntSign::Plus {
                return Sign::Positive;
            }
            if hi.sign() == IntSign::Minus {
                return Sign::Negative;
            }
            bits *= 2;
        }
        panic!(
            "scalar sign: precision exhausted at {} bits for a nonzero value; \
             this indicates a bug in canonicalization",
            SIGN_PRECISION_CAP
        );
    }

    /// `[lo, hi]` integers with `lo <= value * 2^bits <= hi`.
    fn bounds_scaled(&self, bits: u32) -> (BigInt, BigInt) {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (&m, c) in &self.terms {
            let (tlo, thi) = if m == 1 {
                let scaled = c.numer() << bits;
                (scaled.div_floor(c.denom()), scaled.div_ceil(c.denom()))
            } else {
                // floor(sqrt(m) * 2^bits) and a strict upper neighbour;
                // m is squarefree > 1, so the root is never exact.
                let s = (BigInt::from(m) << (2 * bits)).sqrt();
                let s1 = &s + 1;
                let (a, b) = if c.is_positive() {
                    (c.numer() * &s, c.numer() * &s1)
                } else {
                    (c.numer() * &s1, c.numer() * &s)
                };
                (a.div_floor(c.denom()), b.div_ceil(c.denom()))
            };
            lo += tlo;
            hi += thi;
        }
        (lo, hi)
    }

    /// Round to `f64` with guaranteed absolute error at most
    /// `abs_error_bound` (which must be positive and finite).
    pub fn to_float(&self, abs_error_bound: f64) -> f64 {
        assert!(
            abs_error_bound > 0.0 && abs_error_bound.is_finite(),
            "error bound must be positive and finite"
        );
        if self.terms.is_empty() {
            return 0.0;
        }
        let bound = Ratio::from_float(abs_error_bound).expect("finite bound");
        let mut bits: u32 = 64;
        loop {
            let (lo, hi) = self.bounds_scaled(bits);
            let width = &hi - &lo;
            let mid: BigInt = (lo + hi) >> 1;
            // Error contributions, all scaled by 2^bits: interval half-width
            // plus midpoint rounding, and the 53-bit mantissa truncation of
            // the dyadic-to-f64 conversion.
            let len = mid.magnitude().bits();
            let conv: BigInt = if len > 53 {
                BigInt::one() << (len - 53)
            } else {
                BigInt::zero()
            };
            let err2 = width + 1 + (conv << 1);
            if err2 * bound.denom() <= (bound.numer() << (bits + 1)) {
                return dyadic_to_f64(&mid, bits);
            }
            bits = bits
                .checked_mul(2)
                .filter(|&b| b <= SIGN_PRECISION_CAP)
                .expect("to_float: precision exhausted");
        }
    }
}

fn coeff_sign(c: &Rational) -> Sign {
    if c.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// Decompose `n = outer^2 * squarefree`.
pub(crate) fn reduce_radicand(n: u64) -> (u64, u64) {
    let mut n = n;
    let mut outer = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        while n % (p * p) == 0 {
            n /= p * p;
            outer *= p;
        }
        p += 1;
    }
    (outer, n)
}

/// `n * 2^(-bits)` as the nearest-ish `f64` (error below one unit of the
/// truncated 53-bit mantissa, which the caller accounts for).
fn dyadic_to_f64(n: &BigInt, bits: u32) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let mag = n.magnitude();
    let len = mag.bits();
    let (mant, shift) = if len > 53 {
        ((mag >> (len - 53)).to_u64().expect("53-bit mantissa"), (len - 53) as i64)
    } else {
        (mag.to_u64().expect("small magnitude"), 0i64)
    };
    let mut f = mant as f64;
    let mut e = shift - i64::from(bits);
    while e != 0 {
        let step = e.clamp(-1000, 1000);
        f *= pow2(step);
        e -= step;
    }
    if n.is_negative() {
        -f
    } else {
        f
    }
}

/// Exact power of two for exponents in `[-1022, 1023]`.
fn pow2(e: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((1023 + e) as u64) << 52)
}

/// Decide whether `a = q * b` for a rational `q`; `None` means `a/b` is
/// irrational. Errors if `b` is zero.
///
/// The test is proportionality of the coefficient vectors over the radical
/// basis, so no radical division is ever performed.
pub fn rational_ratio(a: &Scalar, b: &Scalar) -> Result<Option<Rational>, ZeroDivisor> {
    if b.is_zero() {
        return Err(ZeroDivisor);
    }
    if a.is_zero() {
        return Ok(Some(Ratio::zero()));
    }
    let (&m, bc) = b.terms.iter().next().unwrap();
    let q = match a.terms.get(&m) {
        Some(ac) => ac / bc,
        None => return Ok(None),
    };
    if *a == b.scale(&q) {
        Ok(Some(q))
    } else {
        Ok(None)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.terms == other.terms {
            return Ordering::Equal;
        }
        (self - other).sign().into()
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (&m, c) in &rhs.terms {
            out.add_term(m, c.clone());
        }
        out
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (&m, c) in &rhs.terms {
            out.add_term(m, -c.clone());
        }
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(&m, c)| (m, -c.clone())).collect(),
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::from_integer(n)
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Scalar {
        Scalar::from_rational(q)
    }
}

impl core::str::FromStr for Scalar {
    type Err = crate::parse::ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::parse::parse_scalar(s)
    }
}

/// Renders in the literal grammar, terms in increasing radicand order, so
/// that output re-parses to an equal scalar.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&m, c) in &self.terms {
            let rendered = render_term(m, c);
            if first {
                write!(f, "{rendered}")?;
                first = false;
            } else if rendered.starts_with('-') {
                write!(f, "{rendered}")?;
            } else {
                write!(f, "+{rendered}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

fn render_term(m: u64, c: &Rational) -> String {
    use alloc::format;
    let coeff = if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    };
    if m == 1 {
        coeff
    } else if c.is_one() {
        format!("sqrt({m})")
    } else if (-c.clone()).is_one() {
        format!("-sqrt({m})")
    } else {
        format!("{coeff}*sqrt({m})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn parse_canonical_examples() {
        let a = s("3/2+2*sqrt(2)");
        assert_eq!(a.coefficient(1), Ratio::new(BigInt::from(3), BigInt::from(2)));
        assert_eq!(a.coefficient(2), Ratio::from_integer(BigInt::from(2)));
        // sqrt(8) reduces to 2*sqrt(2)
        assert_eq!(s("sqrt(8)"), s("2*sqrt(2)"));
        assert!(s("0").is_zero());
        assert_eq!(s("0").terms().count(), 0);
        // a perfect-square radicand lands in the rational part
        assert_eq!(s("sqrt(9)"), s("3"));
        assert_eq!(s("sqrt(12)"), s("2*sqrt(3)"));
    }

    #[test]
    fn arithmetic_examples() {
        // cancellation: 2*sqrt(2) + (1 - 2*sqrt(2)) = 1
        assert_eq!(&s("2*sqrt(2)") + &s("1-2*sqrt(2)"), s("1"));
        // max(1, sqrt(2)) = sqrt(2) since sqrt(2) - 1 > 0
        let m = core::cmp::max(s("1"), s("sqrt(2)"));
        assert_eq!(m, s("sqrt(2)"));
        assert_eq!(-Scalar::zero(), Scalar::zero());
        assert_eq!(s("1/2").scale(&Ratio::new(BigInt::from(4), BigInt::from(1))), s("2"));
        assert_eq!(s("-3").abs(), s("3"));
        assert_eq!(core::cmp::min(s("1"), s("sqrt(2)")), s("1"));
    }

    #[test]
    fn sign_examples() {
        assert_eq!(Scalar::zero().sign(), Sign::Zero);
        // 3 - 2*sqrt(2) > 0 because 9 > 8
        assert_eq!(s("3-2*sqrt(2)").sign(), Sign::Positive);
        // 1 - sqrt(3) < 0 because 1 < 3
        assert_eq!(s("1-sqrt(3)").sign(), Sign::Negative);
        // forces the interval path (three mixed-sign terms)
        assert_eq!(s("sqrt(2)+10*sqrt(3)-17").sign(), Sign::Positive);
        assert_eq!(s("sqrt(2)+10*sqrt(3)-19").sign(), Sign::Negative);
        assert_eq!(s("-1/1000000+0*sqrt(2)").sign(), Sign::Negative);
    }

    #[test]
    fn sign_close_calls() {
        // 665857/470832 is a convergent of sqrt(2): difference ~ 2.3e-12
        assert_eq!(s("sqrt(2)-665857/470832").sign(), Sign::Negative);
        assert_eq!(s("665857/470832-sqrt(2)").sign(), Sign::Positive);
        // three terms, tiny residual: sqrt(2)+sqrt(3) vs a close rational
        let v = s("sqrt(2)+sqrt(3)-3146264370/1000000000");
        assert_eq!(v.sign(), Sign::Negative);
        let v = s("sqrt(2)+sqrt(3)-3146264369/1000000000");
        assert_eq!(v.sign(), Sign::Positive);
    }

    #[test]
    fn rational_ratio_examples() {
        let q = rational_ratio(&s("2*sqrt(2)"), &s("sqrt(2)")).unwrap();
        assert_eq!(q, Some(Ratio::from_integer(BigInt::from(2))));
        // 1 / (2*sqrt(2)) is irrational: sigma for the tuple (2*sqrt(2),1,0,1)
        assert_eq!(rational_ratio(&s("1"), &s("2*sqrt(2)")).unwrap(), None);
        assert_eq!(
            rational_ratio(&Scalar::zero(), &s("5")).unwrap(),
            Some(Ratio::zero())
        );
        assert_eq!(rational_ratio(&s("1"), &Scalar::zero()), Err(ZeroDivisor));
        // mixed support: (1 + sqrt(2)) vs (2 + 2*sqrt(2)) is rational 1/2
        assert_eq!(
            rational_ratio(&s("1+sqrt(2)"), &s("2+2*sqrt(2)")).unwrap(),
            Some(Ratio::new(BigInt::from(1), BigInt::from(2)))
        );
        assert_eq!(rational_ratio(&s("1+sqrt(2)"), &s("2+sqrt(2)")).unwrap(), None);
    }

    #[test]
    fn ratio_implies_exact_multiple() {
        let a = s("3/4+3/2*sqrt(6)");
        let b = s("1/2+sqrt(6)");
        let q = rational_ratio(&a, &b).unwrap().unwrap();
        assert_eq!(&a - &b.scale(&q), Scalar::zero());
    }

    #[test]
    fn to_float_examples() {
        let f = s("sqrt(2)").to_float(1e-12);
        assert!((f - 1.4142135623730951).abs() <= 1e-12);
        assert_eq!(Scalar::zero().to_float(1e-3), 0.0);
        // high-precision oracle value for sqrt(2) + 10*sqrt(3)
        let f = s("sqrt(2)+10*sqrt(3)").to_float(1e-9);
        assert!((f - 18.734721638061868).abs() <= 1e-9);
        let f = s("-1/3").to_float(1e-15);
        assert!((f + 1.0 / 3.0).abs() <= 1e-15);
    }

    #[test]
    fn to_float_tight_bounds() {
        for (lit, val) in [
            ("2*sqrt(2)", 2.8284271247461903),
            ("1-2*sqrt(2)", -1.8284271247461903),
            ("2-sqrt(2)-10*sqrt(3)", -16.734721638061868),
        ] {
            let f = s(lit).to_float(1e-14);
            assert!((f - val).abs() <= 1e-13, "{lit}: {f} vs {val}");
        }
    }

    #[test]
    fn sign_agrees_with_float() {
        for lit in ["1/7-1/100*sqrt(2)", "sqrt(5)-sqrt(3)-1/2", "-2+sqrt(3)", "1/9"] {
            let v = s(lit);
            let f = v.to_float(1e-12);
            if f.abs() > 2e-12 {
                assert_eq!(v.sign().as_i8() as f64, f.signum(), "{lit}");
            }
        }
    }

    #[test]
    fn display_round_trips() {
        for lit in [
            "0",
            "-5",
            "3/2+2*sqrt(2)",
            "1/2-3*sqrt(6)",
            "sqrt(2)",
            "-sqrt(7)+1/3",
            "2/3*sqrt(10)-4",
        ] {
            let v = s(lit);
            let rendered = v.to_string();
            assert_eq!(rendered.parse::<Scalar>().unwrap(), v, "{lit} -> {rendered}");
        }
        assert_eq!(s("3/2+2*sqrt(2)").to_string(), "3/2+2*sqrt(2)");
        assert_eq!(s("0").to_string(), "0");
    }

    #[test]
    fn ordering_is_total_and_exact() {
        let mut vals = [
            s("0"),
            s("1"),
            s("sqrt(2)"),
            s("3/2"),
            s("-sqrt(3)"),
            s("2-sqrt(2)"),
        ];
        vals.sort();
        let floats: alloc::vec::Vec<f64> = vals.iter().map(|v| v.to_float(1e-12)).collect();
        for w in floats.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn radicand_reduction() {
        assert_eq!(reduce_radicand(8), (2, 2));
        assert_eq!(reduce_radicand(9), (3, 1));
        assert_eq!(reduce_radicand(1), (1, 1));
        assert_eq!(reduce_radicand(360), (6, 10));
        assert_eq!(reduce_radicand(997), (1, 997));
    }
}
