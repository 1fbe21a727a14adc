//! The Drury-Arveson side: exact inner products on polynomials, tail
//! kernels for the conductor subspace, family kernel models, and the
//! mechanical checks of the exact identities the construction rests on.

pub mod blaschke;
pub mod identities;
pub mod kernel;
pub mod poly;

pub use blaschke::BlaschkeProduct;
pub use identities::{
    defect_identity, inner_sequence_check, must_be_close_check, pair_overlap_check,
    InnerSequenceReport, MustBeCloseReport, PairOverlapReport,
};
pub use kernel::{KernelModel, TailKernel, TruncationConfig};
pub use poly::MultiPoly;

use crate::rational::{conj, cq_zero, Cq, Rat};
use num::{BigInt, One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DaSpaceError {
    #[error("polynomials live in different variable counts ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("element is not a unit")]
    NotAUnit,
    #[error("certified truncation error {bound:.3e} exceeds tolerance at degree {degree}")]
    TruncationInsufficient { degree: usize, bound: f64 },
    #[error("evaluation point lies outside the open unit ball")]
    PointOutsideBall,
    #[error("hypotheses not met: {0}")]
    HypothesisNotMet(String),
    #[error("kernel/target shapes do not match: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Quotient(#[from] crate::quotient::QuotientError),
}

/// Squared norm of the monomial `z^a`: `a! / |a|!`.
pub fn monomial_norm_sqr(exps: &[u32]) -> Rat {
    let total: u32 = exps.iter().sum();
    let mut num = BigInt::one();
    for &e in exps {
        num *= factorial(e);
    }
    Rat::new(num, factorial(total))
}

fn factorial(n: u32) -> BigInt {
    let mut f = BigInt::one();
    for k in 2..=n as u64 {
        f *= BigInt::from(k);
    }
    f
}

/// Exact inner product of polynomials in the Drury-Arveson space:
/// `sum_a p_a conj(q_a) a!/|a|!`.
pub fn inner_product(p: &MultiPoly, q: &MultiPoly) -> Result<Cq, DaSpaceError> {
    if p.vars() != q.vars() {
        return Err(DaSpaceError::DimensionMismatch(p.vars(), q.vars()));
    }
    let mut acc = cq_zero();
    for (e, pc) in p.terms() {
        let qc = q.coeff(e);
        if crate::rational::cq_is_zero(&qc) {
            continue;
        }
        let w = monomial_norm_sqr(e);
        let term = (pc * &conj(&qc)).scale(w);
        acc = &acc + &term;
    }
    Ok(acc)
}

/// `||p||^2` as an exact (real) rational.
pub fn norm_sqr(p: &MultiPoly) -> Rat {
    let ip = inner_product(p, p).expect("same polynomial");
    debug_assert!(ip.im.is_zero());
    ip.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{cq_int, cq_one, rat};

    #[test]
    fn monomial_norms() {
        assert_eq!(monomial_norm_sqr(&[0, 0]), rat(1, 1));
        assert_eq!(monomial_norm_sqr(&[1, 1]), rat(1, 2)); // 1!1!/2!
        assert_eq!(monomial_norm_sqr(&[2, 1]), rat(1, 3)); // 2!1!/3!
    }

    #[test]
    fn inner_product_examples() {
        let one = MultiPoly::one(2);
        assert_eq!(inner_product(&one, &one).unwrap(), cq_one());
        let z1z2 = MultiPoly::monomial(2, &[1, 1], cq_one());
        assert_eq!(norm_sqr(&z1z2), rat(1, 2));
        let p = MultiPoly::monomial(1, &[0], cq_int(2, 0));
        assert_eq!(
            inner_product(&p, &one).unwrap_err(),
            DaSpaceError::DimensionMismatch(1, 2)
        );
    }

    #[test]
    fn hermitian_and_positive() {
        let p = MultiPoly::monomial(2, &[1, 0], cq_int(0, 1));
        let q = MultiPoly::monomial(2, &[1, 0], cq_int(3, -2));
        let pq = inner_product(&p, &q).unwrap();
        let qp = inner_product(&q, &p).unwrap();
        assert_eq!(pq, conj(&qp));
        assert!(norm_sqr(&p) > num::Zero::zero());
    }
}
