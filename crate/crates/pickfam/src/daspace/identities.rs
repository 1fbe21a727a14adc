//! Mechanical verification of the exact identities behind the
//! construction: the two-variable defect identity, the inner-sequence
//! property of the cusp submodule, and the closeness inequalities that
//! obstruct predual factorization for matrices.

use super::poly::{MultiPoly, RatPoly};
use super::{monomial_norm_sqr, norm_sqr, DaSpaceError};
use crate::rational::{norm_sqr as cq_norm_sqr, rat_int, Rat};
use num::{One, Signed, Zero};

/// `||z1 f||^2 + ||z2 f||^2 - ||f||^2 - sum |a_mn|^2 (m!n!/(m+n)!) / (m+n+1)`.
///
/// Identically zero for every two-variable polynomial; returned so the
/// property can be asserted exactly.
pub fn defect_identity(f: &MultiPoly) -> Rat {
    assert_eq!(f.vars(), 2, "defect identity is a two-variable statement");
    let z1f = f.mul(&MultiPoly::monomial(2, &[1, 0], crate::rational::cq_one()));
    let z2f = f.mul(&MultiPoly::monomial(2, &[0, 1], crate::rational::cq_one()));
    let mut correction = Rat::zero();
    for (e, c) in f.terms() {
        let total = (e[0] + e[1] + 1) as i64;
        correction += cq_norm_sqr(c) * monomial_norm_sqr(e) / rat_int(total);
    }
    norm_sqr(&z1f) + norm_sqr(&z2f) - norm_sqr(f) - correction
}

/// Result of checking the inner-sequence identity on all monomials up to
/// a total degree.
#[derive(Debug, Clone)]
pub struct InnerSequenceReport {
    pub max_total_degree: u32,
    /// Monomials `(m, n)` where the operator identity failed (empty on
    /// a passing run).
    pub violations: Vec<(u32, u32)>,
    /// The circle identity `|w|^2 + |z|^4 + |z|^2 |w|^2 = 1` under
    /// `|w|^2 = 1 - |z|^2`, checked symbolically.
    pub sphere_identity_ok: bool,
}

impl InnerSequenceReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.sphere_identity_ok
    }
}

/// Verifies, exactly on every monomial of total degree at most `n`, that
/// the multipliers `w, z^2, zw` satisfy
/// `sum_f M_f M_f* = I - P_1 - P_z`, and checks the sphere identity
/// symbolically. Monomials are eigenvectors of each `M_f M_f*`, with
/// eigenvalue the ratio of squared monomial norms.
pub fn inner_sequence_check(n: u32) -> InnerSequenceReport {
    assert!(n >= 4, "degree bound must be at least 4");
    let multipliers: [(u32, u32); 3] = [(0, 1), (2, 0), (1, 1)];
    let mut violations = Vec::new();
    for m in 0..=n {
        for k in 0..=(n - m) {
            let norm = monomial_norm_sqr(&[m, k]);
            let mut acc = Rat::zero();
            for &(p, q) in &multipliers {
                if m >= p && k >= q {
                    acc += &norm / monomial_norm_sqr(&[m - p, k - q]);
                }
            }
            let expected = if (m, k) == (0, 0) || (m, k) == (1, 0) {
                Rat::zero()
            } else {
                Rat::one()
            };
            if acc != expected {
                violations.push((m, k));
            }
        }
    }
    // |w|^2 + |z|^4 + |z|^2 |w|^2 with |w|^2 = 1 - |z|^2, in t = |z|^2
    let t = RatPoly::new(vec![Rat::zero(), Rat::one()]);
    let one_minus_t = RatPoly::new(vec![Rat::one(), -Rat::one()]);
    let lhs = one_minus_t.add(&t.mul(&t)).add(&t.mul(&one_minus_t));
    let sphere_identity_ok = lhs == RatPoly::new(vec![Rat::one()]);
    InnerSequenceReport { max_total_degree: n, violations, sphere_identity_ok }
}

/// Outcome of the closeness check for one function. All quantities are
/// homogeneous in `||f||^2`, so exact rational inputs need no
/// normalization.
#[derive(Debug, Clone)]
pub struct MustBeCloseReport {
    pub norm_sq: Rat,
    /// `|<f, 1>|^2`.
    pub a00_sq: Rat,
    /// Required lower bound `(1 - 4 eps) ||f||^2`... the constant-term
    /// mass must reach this.
    pub a00_lower: Rat,
    /// `||f - a00||^2 = ||f||^2 - |a00|^2`.
    pub dist_sq: Rat,
    /// Required upper bound `4 eps ||f||^2`.
    pub dist_bound: Rat,
}

impl MustBeCloseReport {
    pub fn holds(&self) -> bool {
        self.a00_sq >= self.a00_lower && self.dist_sq <= self.dist_bound
    }
}

/// Checks the closeness conclusions for `f` with almost-isometric
/// coordinate multipliers: if `||z_i f||^2 > (1 - eps) ||f||^2` for both
/// coordinates, then the constant term carries mass at least
/// `(1 - 4 eps) ||f||^2` and the distance to the constants is at most
/// `4 eps ||f||^2`.
pub fn must_be_close_check(f: &MultiPoly, eps: &Rat) -> Result<MustBeCloseReport, DaSpaceError> {
    assert_eq!(f.vars(), 2, "closeness check is a two-variable statement");
    assert!(eps.is_positive(), "eps must be positive");
    let n = norm_sqr(f);
    if n.is_zero() {
        return Err(DaSpaceError::HypothesisNotMet("f must be nonzero".into()));
    }
    let hypothesis = (Rat::one() - eps) * &n;
    for exps in [[1u32, 0u32], [0, 1]] {
        let zif = f.mul(&MultiPoly::monomial(2, &exps, crate::rational::cq_one()));
        if norm_sqr(&zif) <= hypothesis {
            return Err(DaSpaceError::HypothesisNotMet(format!(
                "multiplication by coordinate {} loses more than eps of the norm",
                if exps[0] == 1 { 1 } else { 2 },
            )));
        }
    }
    let a00_sq = cq_norm_sqr(&f.coeff(&[0, 0]));
    let four_eps = rat_int(4) * eps;
    Ok(MustBeCloseReport {
        a00_lower: (Rat::one() - &four_eps) * &n,
        dist_sq: &n - &a00_sq,
        dist_bound: four_eps * &n,
        norm_sq: n,
        a00_sq,
    })
}

/// Outcome of the two-function overlap bound.
#[derive(Debug, Clone)]
pub struct PairOverlapReport {
    /// `|<f, g>|^2`.
    pub inner_sq: Rat,
    /// `(1 - 8 eps)^2 ||f||^2 ||g||^2`; vacuous when `8 eps > 1`.
    pub bound_sq: Rat,
    pub vacuous: bool,
}

impl PairOverlapReport {
    pub fn holds(&self) -> bool {
        self.vacuous || self.inner_sq >= self.bound_sq
    }
}

/// The overlap bound `|<f, g>| >= 1 - 8 eps` for two normalized
/// functions meeting the eps-hypotheses with positive constant terms;
/// checked homogeneously on squares.
pub fn pair_overlap_check(
    f: &MultiPoly,
    g: &MultiPoly,
    eps: &Rat,
) -> Result<PairOverlapReport, DaSpaceError> {
    for h in [f, g] {
        let c = h.coeff(&[0, 0]);
        if !c.im.is_zero() || !c.re.is_positive() {
            return Err(DaSpaceError::HypothesisNotMet(
                "constant terms must be positive reals".into(),
            ));
        }
        must_be_close_check(h, eps)?;
    }
    let ip = super::inner_product(f, g).expect("both live in two variables");
    let inner_sq = cq_norm_sqr(&ip);
    let one_minus = Rat::one() - rat_int(8) * eps;
    let vacuous = one_minus.is_negative();
    let bound_sq = &one_minus * &one_minus * norm_sqr(f) * norm_sqr(g);
    Ok(PairOverlapReport { inner_sq, bound_sq, vacuous })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{cq_int, cq_one, rat, Cq};

    #[test]
    fn defect_identity_hand_cases() {
        // f = 1: ||z1||^2 + ||z2||^2 = 2 = 1 + 1
        assert!(defect_identity(&MultiPoly::one(2)).is_zero());
        // f = z1: ||z1^2||^2 + ||z1 z2||^2 = 1 + 1/2 = ||z1||^2 + 1/2
        let z1 = MultiPoly::monomial(2, &[1, 0], cq_one());
        assert!(defect_identity(&z1).is_zero());
    }

    #[test]
    fn defect_identity_on_random_polynomials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let mut f = MultiPoly::zero(2);
            for _ in 0..20 {
                let e = vec![rng.gen_range(0..6u32), rng.gen_range(0..6u32)];
                let c = Cq::new(
                    rat(rng.gen_range(-9..=9), rng.gen_range(1..=9)),
                    rat(rng.gen_range(-9..=9), rng.gen_range(1..=9)),
                );
                f.add_term(e, c);
            }
            if f.is_zero() {
                continue;
            }
            assert!(defect_identity(&f).is_zero());
        }
    }

    #[test]
    fn inner_sequence_monomial_cases() {
        let report = inner_sequence_check(8);
        assert!(report.ok(), "violations: {:?}", report.violations);
        // spot-check the eigenvalue bookkeeping used by the sweep
        let norm_zw = monomial_norm_sqr(&[1, 1]);
        let from_w = &norm_zw / monomial_norm_sqr(&[1, 0]);
        let from_zw = &norm_zw / monomial_norm_sqr(&[0, 0]);
        assert_eq!(from_w + from_zw, Rat::one());
    }

    #[test]
    fn must_be_close_trivial_and_failing() {
        // f = 1 passes any eps with slack
        let one = MultiPoly::one(2);
        let eps = rat(1, 100);
        let report = must_be_close_check(&one, &eps).unwrap();
        assert!(report.holds());
        assert_eq!(report.a00_sq, Rat::one());

        // f = z1 fails the hypotheses for eps < 1/2: ||z1^2||^2 = 1/2
        let z1 = MultiPoly::monomial(2, &[1, 0], cq_one());
        assert!(matches!(
            must_be_close_check(&z1, &rat(1, 4)),
            Err(DaSpaceError::HypothesisNotMet(_))
        ));
    }

    #[test]
    fn must_be_close_near_constant() {
        // f = 1 + delta z1 with the defect computed exactly:
        // ||z1 f||^2 = 1 + delta^2 / 2, ||f||^2 = 1 + delta^2,
        // so the defect fraction is (delta^2/2 + ...) over 1 + delta^2.
        let delta = rat(1, 10);
        let mut f = MultiPoly::one(2);
        f.add_term(vec![1, 0], Cq::new(delta.clone(), Rat::zero()));
        // choose eps barely above the worst coordinate defect
        let n = norm_sqr(&f);
        let z2f = f.mul(&MultiPoly::monomial(2, &[0, 1], cq_one()));
        let defect = (&n - &norm_sqr(&z2f)) / &n;
        let eps = defect + rat(1, 1000);
        let report = must_be_close_check(&f, &eps).unwrap();
        assert!(report.holds());
    }

    #[test]
    fn pair_overlap_bound() {
        let eps = rat(1, 50);
        let mut f = MultiPoly::one(2);
        f.add_term(vec![1, 0], Cq::new(rat(1, 20), Rat::zero()));
        let mut g = MultiPoly::one(2);
        g.add_term(vec![0, 1], Cq::new(rat(-1, 25), Rat::zero()));
        let report = pair_overlap_check(&f, &g, &eps).unwrap();
        assert!(!report.vacuous);
        assert!(report.holds());
        // negative or complex constant terms are rejected
        let mut bad = MultiPoly::zero(2);
        bad.add_term(vec![0, 0], cq_int(0, 1));
        assert!(matches!(
            pair_overlap_check(&bad, &g, &eps),
            Err(DaSpaceError::HypothesisNotMet(_))
        ));
    }
}
