//! Finite Blaschke products with exact disc zeros.
//!
//! Used as the inner function generating the tail subspace for
//! `C1 + fC[z]` algebras: the tail kernel is `B(z) conj(B(w))` times the
//! Szego kernel, and projections onto the tail only ever need the
//! exactly computable series coefficients of `B` up to the degree of the
//! polynomial being projected.

use crate::rational::{
    cq_inv, cq_is_zero, cq_one, cq_to_c64, cq_zero, norm_sqr, rat_int, rat_sqrt_upper, rat_to_f64,
    Cq, Rat,
};
use num::complex::Complex64;
use num::{One, Signed, Zero};

/// Product of disc factors `(z - a) / (1 - conj(a) z)` with
/// multiplicities. Unimodular on the circle; the constant unimodular
/// normalization is irrelevant here because the tail kernel pairs `B`
/// with its own conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<(Cq, usize)>,
}

impl BlaschkeProduct {
    /// Zeros must lie strictly inside the disc (exact check).
    pub fn new(zeros: Vec<(Cq, usize)>) -> Result<Self, crate::quotient::QuotientError> {
        for (a, m) in &zeros {
            if *m == 0 {
                return Err(crate::quotient::QuotientError::ZeroJetOrder);
            }
            if norm_sqr(a) >= Rat::one() {
                return Err(crate::quotient::QuotientError::OutsideBall);
            }
        }
        Ok(BlaschkeProduct { zeros })
    }

    pub fn zeros(&self) -> &[(Cq, usize)] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.iter().map(|(_, m)| m).sum()
    }

    /// Exact Taylor coefficients `b_0..b_n` at the origin, by convolving
    /// the factor expansions `(z - a) sum conj(a)^j z^j`.
    pub fn coefficients(&self, n: usize) -> Vec<Cq> {
        let mut coeffs = vec![cq_zero(); n + 1];
        coeffs[0] = cq_one();
        for (a, m) in &self.zeros {
            for _ in 0..*m {
                let factor = factor_coefficients(a, n);
                coeffs = convolve_truncated(&coeffs, &factor, n);
            }
        }
        coeffs
    }

    pub fn eval_cq(&self, z: &Cq) -> Option<Cq> {
        let mut acc = cq_one();
        for (a, m) in &self.zeros {
            let num = z - a;
            let den = &cq_one() - &(crate::rational::conj(a) * z);
            let inv = cq_inv(&den)?;
            let factor = num * inv;
            for _ in 0..*m {
                acc = &acc * &factor;
            }
        }
        Some(acc)
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (a, m) in &self.zeros {
            let af = cq_to_c64(a);
            let factor = (z - af) / (1.0 - af.conj() * z);
            acc *= factor.powu(*m as u32);
        }
        acc
    }

    /// Certified upper bound on `sum_{j>n} |b_j|^2`, from the analytic
    /// continuation of `B` past the circle of radius `1/rho` (`rho` a
    /// rational upper bound on the largest zero modulus). Zero when all
    /// zeros sit at the origin (then `B` is a monomial). `None` when no
    /// usable radius exists (a zero modulus bound touching 1).
    pub fn tail_bound_sqr(&self, n: usize) -> Option<Rat> {
        let nonzero: Vec<(Rat, usize)> = self
            .zeros
            .iter()
            .filter(|(a, _)| !cq_is_zero(a))
            .map(|(a, m)| (rat_sqrt_upper(&norm_sqr(a)), *m))
            .collect();
        if nonzero.is_empty() {
            return Some(Rat::zero());
        }
        let rho = nonzero.iter().map(|(r, _)| r).max().unwrap().clone();
        if rho >= Rat::one() {
            return None;
        }
        // evaluate the modulus bound on |z| = r, 1 < r < 1/rho
        let r = (Rat::one() + rat_int(1) / &rho) / rat_int(2);
        let mut m_bound = Rat::one();
        for (amod, mult) in &nonzero {
            let num = &r + amod;
            let den = Rat::one() - amod * &r;
            if !den.is_positive() {
                return None;
            }
            for _ in 0..*mult {
                m_bound = m_bound * &num / &den;
            }
        }
        // zeros at the origin multiply B by a monomial, modulus r on the circle
        let origin_mult: usize =
            self.zeros.iter().filter(|(a, _)| cq_is_zero(a)).map(|(_, m)| m).sum();
        for _ in 0..origin_mult {
            m_bound = m_bound * &r;
        }
        // |b_j| <= M(r) / r^j, so the squared tail is geometric
        let q = rat_int(1) / (&r * &r); // < 1
        let qn = crate::rational::rat_pow(&q, n + 1);
        Some(&m_bound * &m_bound * qn / (Rat::one() - q))
    }
}

fn factor_coefficients(a: &Cq, n: usize) -> Vec<Cq> {
    // (z - a) * sum_j conj(a)^j z^j
    let ac = crate::rational::conj(a);
    let mut out = vec![cq_zero(); n + 1];
    out[0] = -a.clone();
    let mut pow = cq_one(); // conj(a)^(j-1)
    for item in out.iter_mut().skip(1) {
        let one_minus = cq_one() - a * &ac;
        *item = &pow * &one_minus;
        pow = &pow * &ac;
    }
    out
}

fn convolve_truncated(a: &[Cq], b: &[Cq], n: usize) -> Vec<Cq> {
    let mut out = vec![cq_zero(); n + 1];
    for (i, ai) in a.iter().enumerate() {
        if cq_is_zero(ai) {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n + 1 - i) {
            let prod = ai * bj;
            out[i + j] = &out[i + j] + &prod;
        }
    }
    out
}

/// Smallest truncation degree whose certified tail bound is below the
/// tolerance, or an error carrying the best achievable bound.
pub fn truncation_degree(
    b: &BlaschkeProduct,
    tol_sqr: &Rat,
    max_degree: usize,
) -> Result<usize, super::DaSpaceError> {
    let mut lo = b.degree();
    loop {
        match b.tail_bound_sqr(lo) {
            Some(bound) if bound <= *tol_sqr => return Ok(lo),
            Some(bound) => {
                if lo >= max_degree {
                    return Err(super::DaSpaceError::TruncationInsufficient {
                        degree: max_degree,
                        bound: rat_to_f64(&bound).sqrt(),
                    });
                }
                lo = (lo * 2).clamp(8, max_degree);
            }
            None => {
                return Err(super::DaSpaceError::TruncationInsufficient {
                    degree: max_degree,
                    bound: f64::INFINITY,
                })
            }
        }
    }
}
