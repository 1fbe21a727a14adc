//! Exact Gaussian-rational scalars.
//!
//! All structural data in this crate (jets, Gram matrices, orbit
//! coordinates) lives over `Q(i)`: complex numbers whose real and
//! imaginary parts are arbitrary-precision rationals. Floating point
//! enters only at evaluation time.

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational.
pub type Rat = BigRational;

/// Gaussian rational: complex number with exact rational parts.
pub type Cq = num::complex::Complex<Rat>;

/// Rational from an integer pair `p/q`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Rational from an integer.
pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// Gaussian rational with integer parts.
pub fn cq_int(re: i64, im: i64) -> Cq {
    Cq::new(rat_int(re), rat_int(im))
}

/// Gaussian rational from two rational pairs `(p/q) + (r/s) i`.
pub fn cq(re_p: i64, re_q: i64, im_p: i64, im_q: i64) -> Cq {
    Cq::new(rat(re_p, re_q), rat(im_p, im_q))
}

pub fn cq_zero() -> Cq {
    Cq::new(Rat::zero(), Rat::zero())
}

pub fn cq_one() -> Cq {
    Cq::new(Rat::one(), Rat::zero())
}

pub fn cq_from_rat(re: Rat) -> Cq {
    Cq::new(re, Rat::zero())
}

/// `|x|^2` as an exact rational.
pub fn norm_sqr(x: &Cq) -> Rat {
    &x.re * &x.re + &x.im * &x.im
}

pub fn conj(x: &Cq) -> Cq {
    Cq::new(x.re.clone(), -x.im.clone())
}

pub fn cq_is_zero(x: &Cq) -> bool {
    x.re.is_zero() && x.im.is_zero()
}

/// Exact inverse; `None` for zero.
pub fn cq_inv(x: &Cq) -> Option<Cq> {
    let n = norm_sqr(x);
    if n.is_zero() {
        return None;
    }
    Some(Cq::new(&x.re / &n, -&x.im / &n))
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn cq_to_c64(x: &Cq) -> Complex64 {
    Complex64::new(rat_to_f64(&x.re), rat_to_f64(&x.im))
}

/// Dyadic rational closest to `x` with denominator `2^bits`;
/// keeps randomly drawn floats exactly representable.
pub fn rat_from_f64_dyadic(x: f64, bits: u32) -> Rat {
    let scale = (1u64 << bits) as f64;
    let num = (x * scale).round() as i64;
    Rat::new(BigInt::from(num), BigInt::from(1u64 << bits))
}

pub fn cq_from_c64_dyadic(z: Complex64, bits: u32) -> Cq {
    Cq::new(rat_from_f64_dyadic(z.re, bits), rat_from_f64_dyadic(z.im, bits))
}

/// Rational upper bound on `sqrt(x)` for `x >= 0`, within relative
/// excess `2^-20`. Used for certified tail bounds.
pub fn rat_sqrt_upper(x: &Rat) -> Rat {
    assert!(!x.is_negative(), "rat_sqrt_upper needs a nonnegative input");
    if x.is_zero() {
        return Rat::zero();
    }
    // Newton from a float seed overshoots for f(u) = u^2 - x when
    // started above the root, so one corrected step suffices; we
    // iterate a few times and then nudge up until u^2 >= x.
    let seed = rat_to_f64(x).sqrt();
    let mut u = if seed.is_finite() && seed > 0.0 {
        rat_from_f64_dyadic(seed * (1.0 + 1e-9) + f64::MIN_POSITIVE, 40)
    } else {
        x.clone() + Rat::one()
    };
    if u.is_zero() || u.is_negative() {
        u = x.clone() + Rat::one();
    }
    for _ in 0..4 {
        // u <- (u + x/u) / 2, staying above sqrt(x) once above it
        u = (&u + x / &u) / rat_int(2);
    }
    let mut guard = 0;
    while &u * &u < *x {
        u *= rat(1_048_577, 1_048_576); // 1 + 2^-20
        guard += 1;
        if guard > 64 {
            return x.clone() + Rat::one();
        }
    }
    // Newton leaves huge numerators; of themselves harmless, but powers
    // of the result feed certified geometric bounds, so round up to a
    // small dyadic (still an upper bound).
    let scale: BigInt = BigInt::one() << 32;
    let scaled = (&u * Rat::from_integer(scale.clone())).ceil();
    Rat::new(scaled.to_integer(), scale)
}

/// `x^n` by binary exponentiation (keeps reductions logarithmic).
pub fn rat_pow(x: &Rat, mut n: usize) -> Rat {
    let mut base = x.clone();
    let mut acc = Rat::one();
    while n > 0 {
        if n & 1 == 1 {
            acc *= &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Formats a rational as `p/q` (always with an explicit denominator).
pub fn rat_to_string(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn rat_from_str(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|e| format!("bad numerator {p:?}: {e}"))?;
            let q: BigInt = q.trim().parse().map_err(|e| format!("bad denominator {q:?}: {e}"))?;
            if q.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Rat::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|e| format!("bad rational {s:?}: {e}"))?;
            Ok(Rat::from_integer(p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_multiplies_back() {
        let x = cq(3, 4, -2, 7);
        let inv = cq_inv(&x).unwrap();
        assert_eq!(x * inv, cq_one());
        assert!(cq_inv(&cq_zero()).is_none());
    }

    #[test]
    fn sqrt_upper_is_an_upper_bound() {
        for (p, q) in [(1i64, 2i64), (3, 4), (99, 100), (7, 3), (1, 1_000_000)] {
            let x = rat(p, q);
            let u = rat_sqrt_upper(&x);
            assert!(&u * &u >= x, "u^2 < x for {p}/{q}");
            // not wildly loose
            let lo = &u * rat(1_048_575, 1_048_576); // u * (1 - 2^-20)-ish
            assert!(&lo * &lo <= (&x * rat(1_000_001, 1_000_000)));
        }
        assert!(rat_sqrt_upper(&Rat::zero()).is_zero());
    }

    #[test]
    fn string_round_trip() {
        let x = rat(-22, 7);
        assert_eq!(rat_to_string(&x), "-22/7");
        assert_eq!(rat_from_str("-22/7").unwrap(), x);
        assert_eq!(rat_from_str("5").unwrap(), rat_int(5));
        assert!(rat_from_str("1/0").is_err());
    }

    #[test]
    fn dyadic_snap_is_exact_for_halves() {
        assert_eq!(rat_from_f64_dyadic(0.5, 16), rat(1, 2));
        assert_eq!(rat_from_f64_dyadic(-0.75, 16), rat(-3, 4));
    }
}
