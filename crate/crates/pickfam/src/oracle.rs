//! Independent minimax ground truth for disc problems.
//!
//! Approximates the minimal supremum norm of a constrained interpolant
//! by direct convex minimization over truncated polynomials on a circle
//! grid: parametrize the affine solution space of the linear conditions,
//! then run an iteratively-reweighted least-squares loop (Lawson-style)
//! for the discrete Chebyshev objective, with bisection-guided restarts.
//! Every weighted least-squares solve yields a certified lower bound on
//! the discrete optimum, so results come with a bracket.
//!
//! Disc only: for one variable the multiplier norm is the sup norm, so a
//! grid maximum plus the classical degree-dependent sampling factor
//! bounds the true norm. Nothing comparable is attempted in the ball.

use crate::daspace::MultiPoly;
use crate::quotient::Subalgebra;
use crate::rational::{cq_to_c64, cq_from_c64_dyadic, cq_one};
use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("constraint system is inconsistent at this degree (residual {0:.3e})")]
    InfeasibleConstraints(f64),
    #[error("bad instance: {0}")]
    BadInstance(String),
}

/// Minimax problem: linear conditions on the coefficients of a
/// polynomial of degree at most `degree`, minimized in maximum modulus
/// over `grid` circle points.
#[derive(Debug, Clone)]
pub struct MinimaxInstance {
    /// Rows `(a, rhs)`: `sum_j a_j c_j = rhs` over coefficients
    /// `c_0..c_degree`. Membership functionals have `rhs = 0`,
    /// interpolation conditions carry the target.
    pub constraints: Vec<(Vec<Complex64>, Complex64)>,
    pub degree: usize,
    pub grid: usize,
    pub delta: f64,
}

impl MinimaxInstance {
    /// Assembles the instance for a one-variable subalgebra: membership
    /// rows from the annihilator functionals composed with the
    /// coefficient-to-jet map, plus one interpolation row per node.
    pub fn for_subalgebra(
        sub: &Subalgebra,
        nodes: &[Complex64],
        targets: &[Complex64],
        degree: usize,
        grid: usize,
        delta: f64,
    ) -> Result<Self, OracleError> {
        if sub.ring().vars() != 1 {
            return Err(OracleError::BadInstance("oracle supports one-variable specs only".into()));
        }
        if nodes.len() != targets.len() {
            return Err(OracleError::BadInstance("node/target count mismatch".into()));
        }
        if grid < 8 * degree {
            return Err(OracleError::BadInstance(format!(
                "grid {grid} is below 8 x degree {degree}"
            )));
        }
        let mut constraints = membership_rows(sub, degree);
        for (z, w) in nodes.iter().zip(targets) {
            let row: Vec<Complex64> = (0..=degree as u32).map(|n| z.powu(n)).collect();
            constraints.push((row, *w));
        }
        Ok(MinimaxInstance { constraints, degree, grid, delta })
    }
}

/// Linear conditions on `c_0..c_degree` whose joint kernel is exactly
/// the coefficient vectors of members of the subalgebra.
pub fn membership_rows(sub: &Subalgebra, degree: usize) -> Vec<(Vec<Complex64>, Complex64)> {
    let ring = sub.ring();
    let ann = sub.annihilator();
    let d = ring.dim();
    // columns: jets of the monomials
    let monomial_jets: Vec<Vec<Complex64>> = (0..=degree as u32)
        .map(|n| {
            let m = MultiPoly::monomial(1, &[n], cq_one());
            ring.reduce(&m).expect("one variable").flatten().iter().map(cq_to_c64).collect()
        })
        .collect();
    (0..ann.rows)
        .map(|r| {
            let phi: Vec<Complex64> = (0..d).map(|c| cq_to_c64(&ann[(r, c)])).collect();
            let row: Vec<Complex64> = monomial_jets
                .iter()
                .map(|jets| jets.iter().zip(&phi).map(|(j, p)| j * p).sum())
                .collect();
            (row, Complex64::new(0.0, 0.0))
        })
        .collect()
}

/// Result of a minimax solve. `value` is the witness's grid maximum;
/// the discrete optimum lies in `[certified_lower, value]`, and the
/// continuous supremum of the witness is at most `continuous_bound`.
#[derive(Debug, Clone)]
pub struct MinimaxResult {
    pub value: f64,
    pub certified_lower: f64,
    pub witness: Vec<Complex64>,
    pub sampling_factor: f64,
    pub continuous_bound: f64,
    pub passes: usize,
}

impl MinimaxResult {
    /// Witness evaluated as a polynomial.
    pub fn witness_eval(&self, z: Complex64) -> Complex64 {
        horner(&self.witness, z)
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

const MAX_PASSES: usize = 600;
const MAX_RESTARTS: usize = 6;
const WEIGHT_FLOOR: f64 = 1e-14;

/// Approximate minimizer of the grid supremum subject to the instance
/// constraints. The returned value is achieved by the witness, hence an
/// upper bound on the discrete optimum; `certified_lower` comes from the
/// weighted least-squares duals.
pub fn min_sup_norm(inst: &MinimaxInstance) -> Result<MinimaxResult, OracleError> {
    let n_coeffs = inst.degree + 1;
    let dim = 2 * n_coeffs;
    let m = inst.grid;

    // real embedding of the complex constraint system
    let n_rows = 2 * inst.constraints.len();
    let mut c_mat = DMatrix::<f64>::zeros(n_rows.max(1), dim);
    let mut rhs = DVector::<f64>::zeros(n_rows.max(1));
    for (r, (row, b)) in inst.constraints.iter().enumerate() {
        let scale = row.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
        for (j, a) in row.iter().enumerate() {
            c_mat[(2 * r, 2 * j)] = a.re / scale;
            c_mat[(2 * r, 2 * j + 1)] = -a.im / scale;
            c_mat[(2 * r + 1, 2 * j)] = a.im / scale;
            c_mat[(2 * r + 1, 2 * j + 1)] = a.re / scale;
        }
        rhs[2 * r] = b.re / scale;
        rhs[2 * r + 1] = b.im / scale;
    }

    // particular solution and nullspace parametrization
    let (x0, basis) = if inst.constraints.is_empty() {
        (DVector::zeros(dim), DMatrix::identity(dim, dim))
    } else {
        let svd = c_mat.clone().svd(true, true);
        let x0 = svd
            .solve(&rhs, 1e-12)
            .map_err(|e| OracleError::BadInstance(e.to_string()))?;
        let resid = (&c_mat * &x0 - &rhs).norm();
        if resid > 1e-9 * (1.0 + rhs.norm()) {
            return Err(OracleError::InfeasibleConstraints(resid));
        }
        let gram = c_mat.transpose() * &c_mat;
        let eig = gram.symmetric_eigen();
        let max_ev = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
        // rank gap: true null eigenvalues sit at machine noise, well
        // below any honest constraint direction of the normalized rows
        let tol = 1e-12 * max_ev.max(1.0);
        let null_cols: Vec<usize> =
            (0..dim).filter(|&i| eig.eigenvalues[i] <= tol).collect();
        let mut basis = DMatrix::<f64>::zeros(dim, null_cols.len());
        for (k, &i) in null_cols.iter().enumerate() {
            basis.set_column(k, &eig.eigenvectors.column(i));
        }
        (x0, basis)
    };
    let q = basis.ncols();

    // grid evaluation operator (2 rows per point: Re, Im)
    let mut e_mat = DMatrix::<f64>::zeros(2 * m, dim);
    for g in 0..m {
        let theta = 2.0 * std::f64::consts::PI * g as f64 / m as f64;
        for j in 0..n_coeffs {
            let (s, c) = (j as f64 * theta).sin_cos();
            e_mat[(2 * g, 2 * j)] = c;
            e_mat[(2 * g, 2 * j + 1)] = -s;
            e_mat[(2 * g + 1, 2 * j)] = s;
            e_mat[(2 * g + 1, 2 * j + 1)] = c;
        }
    }
    let g0 = &e_mat * &x0;
    let g_mat = &e_mat * &basis;

    let residuals = |y: &DVector<f64>| -> Vec<f64> {
        let e = &g0 + &g_mat * y;
        (0..m).map(|g| e[2 * g].hypot(e[2 * g + 1])).collect()
    };

    let weighted_solve = |w: &[f64]| -> DVector<f64> {
        if q == 0 {
            return DVector::zeros(0);
        }
        let mut a = DMatrix::<f64>::zeros(q, q);
        let mut b = DVector::<f64>::zeros(q);
        for g in 0..m {
            let wg = w[g];
            if wg <= 0.0 {
                continue;
            }
            for r in [2 * g, 2 * g + 1] {
                let row = g_mat.row(r);
                for i in 0..q {
                    let ri = row[i];
                    if ri == 0.0 {
                        continue;
                    }
                    for j in i..q {
                        a[(i, j)] += wg * ri * row[j];
                    }
                    b[i] -= wg * ri * g0[r];
                }
            }
        }
        for i in 0..q {
            for j in 0..i {
                a[(i, j)] = a[(j, i)];
            }
            a[(i, i)] += 1e-300;
        }
        a.clone()
            .cholesky()
            .map(|ch| ch.solve(&b))
            .unwrap_or_else(|| a.lu().solve(&b).unwrap_or_else(|| DVector::zeros(q)))
    };

    let mut weights = vec![1.0 / m as f64; m];
    let mut best_value = f64::INFINITY;
    let mut best_y = DVector::<f64>::zeros(q);
    let mut best_lower = 0.0f64;
    let mut passes = 0;
    let mut restarts = 0;
    let mut last_value = f64::INFINITY;
    let mut stall = 0;

    while passes < MAX_PASSES {
        passes += 1;
        let y = weighted_solve(&weights);
        let r = residuals(&y);
        let value = r.iter().cloned().fold(0.0f64, f64::max);
        let lower = r
            .iter()
            .zip(&weights)
            .map(|(ri, wi)| wi * ri * ri)
            .sum::<f64>()
            .sqrt();
        if lower > best_lower {
            best_lower = lower;
        }
        if value < best_value {
            best_value = value;
            best_y = y;
        }
        if best_value - best_lower <= inst.delta || best_value <= inst.delta {
            break;
        }
        if last_value - value < inst.delta * 1e-3 {
            stall += 1;
        } else {
            stall = 0;
        }
        last_value = value;
        if stall >= 8 {
            if restarts >= MAX_RESTARTS {
                break;
            }
            restarts += 1;
            stall = 0;
            // bisection restart: concentrate weight on the active set at
            // the midpoint level
            let t = 0.5 * (best_lower + best_value);
            let total: f64 = r.iter().map(|ri| if *ri >= t { 1.0 } else { WEIGHT_FLOOR }).sum();
            for (w, ri) in weights.iter_mut().zip(&r) {
                *w = if *ri >= t { 1.0 } else { WEIGHT_FLOOR } / total;
            }
            continue;
        }
        // Lawson update
        let mut total = 0.0;
        for (w, ri) in weights.iter_mut().zip(&r) {
            *w = (*w * ri).max(WEIGHT_FLOOR);
            total += *w;
        }
        for w in &mut weights {
            *w /= total;
        }
    }

    let x = &x0 + &basis * &best_y;
    let witness: Vec<Complex64> =
        (0..n_coeffs).map(|j| Complex64::new(x[2 * j], x[2 * j + 1])).collect();
    let sampling_factor = 1.0 / (std::f64::consts::PI * inst.degree as f64 / inst.grid as f64).cos();
    Ok(MinimaxResult {
        value: best_value,
        certified_lower: best_lower,
        continuous_bound: best_value * sampling_factor,
        sampling_factor,
        witness,
        passes,
    })
}

/// Grid size used when certifying the norm of generated instances.
const ATTAINABLE_GRID: usize = 4096;
const ATTAINABLE_DEGREE: u32 = 12;

/// Draws targets attained by a certified member of the closed unit ball
/// of the algebra: a random polynomial on the allowed monomials, scaled
/// by its grid supremum times the sampling factor (so the continuous sup
/// norm is certified below 1), evaluated at the nodes.
pub fn sample_attainable(
    sub: &Subalgebra,
    nodes: &[Complex64],
    rng: &mut impl Rng,
) -> Result<(Vec<Complex64>, MultiPoly), OracleError> {
    if sub.ring().vars() != 1 {
        return Err(OracleError::BadInstance("attainable sampling is disc-only".into()));
    }
    let f = random_member(sub, rng);
    let coeffs: Vec<Complex64> = f.coeffs().iter().map(cq_to_c64).collect();
    let mut sup = 0.0f64;
    for g in 0..ATTAINABLE_GRID {
        let theta = 2.0 * std::f64::consts::PI * g as f64 / ATTAINABLE_GRID as f64;
        let z = Complex64::from_polar(1.0, theta);
        sup = sup.max(horner(&coeffs, z).norm());
    }
    let factor =
        1.0 / (std::f64::consts::PI * ATTAINABLE_DEGREE as f64 / ATTAINABLE_GRID as f64).cos();
    let scale = 1.0 / (sup.max(1e-12) * factor * (1.0 + 1e-6));
    let scale_cq = cq_from_c64_dyadic(Complex64::new(scale, 0.0), 48);
    let f = f.scale(&scale_cq);
    let coeffs: Vec<Complex64> = f.coeffs().iter().map(cq_to_c64).collect();
    let targets = nodes.iter().map(|z| horner(&coeffs, *z)).collect();
    Ok((targets, f))
}

/// Random polynomial in the algebra with degree at most 12 on the
/// allowed monomial pattern, dyadic-rational coefficients.
fn random_member(sub: &Subalgebra, rng: &mut impl Rng) -> MultiPoly {
    use crate::quotient::SubalgebraSpec;
    let mut draw = |rng: &mut dyn rand::RngCore| {
        let re = rng.gen_range(-1.0..1.0f64);
        let im = rng.gen_range(-1.0..1.0f64);
        cq_from_c64_dyadic(Complex64::new(re, im), 24)
    };
    match sub.spec() {
        SubalgebraSpec::Semigroup(s) => {
            let mut f = MultiPoly::zero(1);
            for n in 0..=ATTAINABLE_DEGREE {
                if s.contains(n as u64) {
                    f.add_term(vec![n], draw(rng));
                }
            }
            if f.is_zero() {
                f = MultiPoly::one(1);
            }
            f
        }
        SubalgebraSpec::OnePlusIdeal { roots } => {
            let mut fc = MultiPoly::one(1);
            for (root, mult) in roots {
                let factor = MultiPoly::from_coeffs(&[-root.clone(), cq_one()]);
                for _ in 0..*mult {
                    fc = fc.mul(&factor);
                }
            }
            let deg_f = fc.total_degree();
            let mut h = MultiPoly::zero(1);
            for n in 0..=ATTAINABLE_DEGREE.saturating_sub(deg_f) {
                h.add_term(vec![n], draw(rng));
            }
            let mut f = MultiPoly::constant(1, draw(rng));
            f = f.add(&fc.mul(&h));
            f
        }
        SubalgebraSpec::TwoVarExample => MultiPoly::one(2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::{Subalgebra, SubalgebraSpec};
    use crate::rational::cq_zero;
    use crate::semigroup::NumericalSemigroup;
    use rand::SeedableRng;

    fn sub(gens: &[u64]) -> Subalgebra {
        Subalgebra::new(SubalgebraSpec::Semigroup(NumericalSemigroup::new(gens).unwrap())).unwrap()
    }

    fn two_node_instance(
        s: &Subalgebra,
        nodes: [Complex64; 2],
        targets: [Complex64; 2],
    ) -> MinimaxInstance {
        MinimaxInstance::for_subalgebra(s, &nodes, &targets, 24, 512, 1e-6).unwrap()
    }

    #[test]
    fn unconstrained_single_condition_is_constant() {
        let s = sub(&[1]);
        let inst = MinimaxInstance::for_subalgebra(
            &s,
            &[Complex64::new(0.0, 0.0)],
            &[Complex64::new(0.5, 0.0)],
            16,
            256,
            1e-6,
        )
        .unwrap();
        let res = min_sup_norm(&inst).unwrap();
        assert!((res.value - 0.5).abs() < 1e-4, "value {}", res.value);
        assert!((res.witness_eval(Complex64::new(0.0, 0.0)) - 0.5).norm() < 1e-9);
    }

    #[test]
    fn constrained_attains_z_squared() {
        // f(0) = 0 and f(1/2) = 1/4 inside <2,3>: f = z^2 is optimal-ish
        let s = sub(&[2, 3]);
        let inst = two_node_instance(
            &s,
            [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.25, 0.0)],
        );
        let res = min_sup_norm(&inst).unwrap();
        assert!(res.value <= 1.0 + 1e-5, "value {}", res.value);
        // witness obeys both conditions
        assert!(res.witness_eval(Complex64::new(0.0, 0.0)).norm() < 1e-9);
        assert!((res.witness_eval(Complex64::new(0.5, 0.0)) - 0.25).norm() < 1e-9);
        // membership: coefficient of z vanishes
        assert!(res.witness[1].norm() < 1e-9);
    }

    #[test]
    fn constrained_infeasible_data_exceeds_one() {
        // Schwarz-type obstruction: members vanishing at 0 with zero
        // derivative satisfy |f(1/2)| <= 1/4 in the unit ball
        let s = sub(&[2, 3]);
        let inst = two_node_instance(
            &s,
            [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.9, 0.0)],
        );
        let res = min_sup_norm(&inst).unwrap();
        assert!(res.value > 1.0, "value {}", res.value);
        assert!(res.certified_lower > 1.0, "lower {}", res.certified_lower);
    }

    #[test]
    fn two_point_classical_matches_closed_form() {
        // closed form from the 2x2 Pick matrix determinant root
        let s = sub(&[1]);
        let z1 = Complex64::new(0.2, 0.1);
        let z2 = Complex64::new(-0.4, 0.3);
        let w1 = Complex64::new(0.3, -0.2);
        let w2 = Complex64::new(0.1, 0.5);
        let k11 = 1.0 / (1.0 - z1.norm_sqr());
        let k22 = 1.0 / (1.0 - z2.norm_sqr());
        let k12 = (1.0 - z1 * z2.conj()).inv();
        let a = k11 * k22 - k12.norm_sqr();
        let b = -(w1.norm_sqr() + w2.norm_sqr()) * k11 * k22
            + 2.0 * k12.norm_sqr() * (w1 * w2.conj()).re;
        let c = w1.norm_sqr() * w2.norm_sqr() * a;
        let t = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
        let closed_form = t.sqrt();

        let inst = two_node_instance(&s, [z1, z2], [w1, w2]);
        let res = min_sup_norm(&inst).unwrap();
        let slack = 2.0 * inst.delta + (res.sampling_factor - 1.0) * closed_form + 1e-4;
        assert!(
            (res.value - closed_form).abs() <= slack,
            "oracle {} vs closed form {closed_form}",
            res.value
        );
    }

    #[test]
    fn value_nonincreasing_in_degree() {
        let s = sub(&[2, 3]);
        let nodes = [Complex64::new(0.1, 0.2), Complex64::new(0.45, -0.15)];
        let targets = [Complex64::new(0.05, 0.0), Complex64::new(0.2, 0.1)];
        let mut prev = f64::INFINITY;
        for degree in [12usize, 16, 20, 24] {
            let inst =
                MinimaxInstance::for_subalgebra(&s, &nodes, &targets, degree, 8 * degree, 1e-6)
                    .unwrap();
            let res = min_sup_norm(&inst).unwrap();
            assert!(res.value <= prev + 1e-5, "degree {degree}: {} > {prev}", res.value);
            prev = res.value;
        }
    }

    #[test]
    fn inconsistent_constraints_are_reported() {
        // two different values at the same node
        let s = sub(&[2, 3]);
        let inst = two_node_instance(
            &s,
            [Complex64::new(0.3, 0.0), Complex64::new(0.3, 0.0)],
            [Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.0)],
        );
        assert!(matches!(min_sup_norm(&inst), Err(OracleError::InfeasibleConstraints(_))));
    }

    #[test]
    fn attainable_targets_respect_schwarz_bound() {
        let s = sub(&[2, 3]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let nodes = [Complex64::new(0.3, 0.0), Complex64::new(-0.2, 0.25)];
        for _ in 0..20 {
            let (targets, witness) = sample_attainable(&s, &nodes, &mut rng).unwrap();
            // witness is in the algebra: no z^1 term
            assert!(crate::rational::cq_is_zero(&witness.coeff(&[1])));
            for (z, w) in nodes.iter().zip(&targets) {
                // members of <2,3> vanish to second order at 0 up to the
                // constant term, so |w - f(0)| <= |z|^2 sup-ish; a loose
                // empirical check that targets are small
                assert!(w.norm() <= 1.0 + 1e-9, "target modulus {} exceeds ball", w.norm());
                let _ = z;
            }
            // certified membership: witness evaluates on the grid below 1
            let coeffs: Vec<Complex64> = witness.coeffs().iter().map(cq_to_c64).collect();
            for g in 0..64 {
                let theta = 2.0 * std::f64::consts::PI * g as f64 / 64.0;
                let v = horner(&coeffs, Complex64::from_polar(1.0, theta));
                assert!(v.norm() < 1.0);
            }
        }
    }

    #[test]
    fn attainable_constant_for_trivial_spec() {
        let s = sub(&[1]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let nodes = [Complex64::new(0.5, 0.0)];
        let (targets, _) = sample_attainable(&s, &nodes, &mut rng).unwrap();
        assert_eq!(targets.len(), 1);
        assert!(targets[0].norm() <= 1.0);
        let _ = cq_zero();
    }
}
