//! Word-windowed gcd for large operands.
//!
//! Rational Lyness orbits reach operands of hundreds of thousands of bits
//! within a thousand steps, where a bit-at-a-time binary gcd is far too
//! slow. This is the classic Lehmer reduction: simulate a run of Euclidean
//! steps on the leading 64 bits of both operands with single-word
//! arithmetic, then apply the accumulated 2x2 matrix to the full numbers in
//! one pass.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = if a >= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    loop {
        if b.is_zero() {
            return a;
        }
        if b.bits() <= 64 {
            let r = &a % &b;
            if r.is_zero() {
                return b;
            }
            return BigUint::from(u64_gcd(b.to_u64().unwrap(), r.to_u64().unwrap()));
        }
        let shift = a.bits() - 64;
        let ah = (&a >> shift).to_u64().expect("64-bit window") as i128;
        let bh = (&b >> shift).to_u64().expect("64-bit window") as i128;
        // Simulate Euclid on the windows; (ca, cb, cc, cd) tracks the
        // cofactor matrix, and the run stops as soon as a quotient could
        // differ from the true one.
        let (mut x, mut y) = (ah, bh);
        let (mut ca, mut cb, mut cc, mut cd) = (1i128, 0i128, 0i128, 1i128);
        loop {
            if y + cc == 0 || y + cd == 0 {
                break;
            }
            let q = (x + ca) / (y + cc);
            if q != (x + cb) / (y + cd) {
                break;
            }
            let step = (|| {
                let nca = ca.checked_sub(q.checked_mul(cc)?)?;
                let ncb = cb.checked_sub(q.checked_mul(cd)?)?;
                let nx = x.checked_sub(q.checked_mul(y)?)?;
                Some((nca, ncb, nx))
            })();
            let Some((nca, ncb, nx)) = step else { break };
            ca = cc;
            cc = nca;
            cb = cd;
            cd = ncb;
            x = y;
            y = nx;
        }
        if cb == 0 {
            // window gave no certain quotient; take one exact Euclid step
            let r = &a % &b;
            a = core::mem::replace(&mut b, r);
        } else {
            let sa = BigInt::from(a.clone());
            let sb = BigInt::from(b.clone());
            let na = BigInt::from(ca) * &sa + BigInt::from(cb) * &sb;
            let nb = BigInt::from(cc) * sa + BigInt::from(cd) * sb;
            debug_assert!(!na.is_negative() && !nb.is_negative());
            a = na.magnitude().clone();
            b = nb.magnitude().clone();
            if a < b {
                core::mem::swap(&mut a, &mut b);
            }
        }
    }
}

fn u64_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// gcd of the magnitudes of two signed integers.
pub(crate) fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    BigInt::from(gcd(a.magnitude(), b.magnitude()))
}

/// `num/den` reduced to canonical form (positive denominator) with the fast
/// gcd; `den` must be nonzero.
pub(crate) fn make_ratio(num: BigInt, den: BigInt) -> crate::scalar::Rational {
    debug_assert!(!den.is_zero());
    let g = gcd_int(&num, &den);
    let (mut n, mut d) = if g.is_one() { (num, den) } else { (num / &g, den / g) };
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    num_rational::Ratio::new_raw(n, d)
}
