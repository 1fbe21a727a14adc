//! Family kernel models.
//!
//! A cyclic module over the subalgebra determines an invariant subspace
//! `N + tail`, where the tail is the common subspace cut out by the
//! conductor. Its reproducing kernel splits into an exact
//! finite-dimensional part (module basis and inverse Gram matrix) plus a
//! closed-form tail kernel. Matrix-valued kernels arise the same way
//! from modules of matrices, with the trace inner product; the tail then
//! carries the rank as a multiplicity.

use super::blaschke::{truncation_degree, BlaschkeProduct};
use super::poly::MultiPoly;
use super::DaSpaceError;
use crate::exact::CqMat;
use crate::quotient::{JetElement, QsSample, Subalgebra, SubalgebraSpec};
use crate::rational::{
    cq_inv, cq_one, cq_to_c64, cq_zero, norm_sqr as cq_norm_sqr, rat, Cq, Rat,
};
use num::complex::Complex64;
use num::{One, Zero};

/// Closed-form reproducing kernel of the tail subspace.
#[derive(Debug, Clone, PartialEq)]
pub enum TailKernel {
    /// No tail (purely finite-dimensional model).
    None,
    /// `(z conj(w))^m / (1 - z conj(w))` on the disc.
    Monomial(usize),
    /// `B(z) conj(B(w)) / (1 - z conj(w))` on the disc.
    Blaschke(BlaschkeProduct),
    /// The two-variable cusp tail
    /// `(z2 conj(w2) + z1^2 conj(w1)^2 + z1 z2 conj(w1) conj(w2)) /
    ///  (1 - z1 conj(w1) - z2 conj(w2))`.
    TwoVar,
}

/// One finite-part function: `poly`, minus `B * tail_part` when the tail
/// is a Blaschke subspace (the projection of `poly` onto it).
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedFn {
    pub poly: MultiPoly,
    pub tail_part: Option<MultiPoly>,
}

impl ProjectedFn {
    fn plain(poly: MultiPoly) -> Self {
        ProjectedFn { poly, tail_part: None }
    }

    fn eval_c64(&self, b: Option<&BlaschkeProduct>, z: &[Complex64]) -> Complex64 {
        let mut v = self.poly.eval_c64(z);
        if let Some(g) = &self.tail_part {
            let b = b.expect("tail part implies a Blaschke tail");
            v -= b.eval_c64(z[0]) * g.eval_c64(z);
        }
        v
    }

    fn eval_cq(&self, b: Option<&BlaschkeProduct>, z: &[Cq]) -> Cq {
        let mut v = self.poly.eval_cq(z);
        if let Some(g) = &self.tail_part {
            let b = b.expect("tail part implies a Blaschke tail");
            let bv = b.eval_cq(&z[0]).expect("denominators are nonzero inside the disc");
            v = &v - &(&bv * &g.eval_cq(z));
        }
        v
    }
}

/// Truncation policy for materializing Blaschke-projected basis
/// functions as plain polynomials.
#[derive(Debug, Clone)]
pub struct TruncationConfig {
    /// Certified bound on the dropped tail norm.
    pub tol: Rat,
    pub max_degree: usize,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig { tol: rat(1, 1_000_000_000_000i64), max_degree: 512 }
    }
}

/// A family kernel: exact finite part plus closed-form tail.
#[derive(Debug, Clone)]
pub struct KernelModel {
    vars: usize,
    block_size: usize,
    value_rank: usize,
    /// Vector-space basis of the finite part; each element is a
    /// `k x s` matrix of projected functions, row-major. Scalar kernels
    /// have `k = s = 1`.
    basis: Vec<Vec<ProjectedFn>>,
    gram: CqMat,
    gram_inverse: CqMat,
    tail: TailKernel,
}

const BALL_MARGIN: f64 = 1e-12;

impl KernelModel {
    /// Kernel of the cyclic module generated by a unit.
    pub fn submodule_kernel(sub: &Subalgebra, u: &JetElement) -> Result<Self, DaSpaceError> {
        if !u.is_unit() {
            return Err(DaSpaceError::NotAUnit);
        }
        Self::cyclic_kernel(sub, u)
    }

    /// Kernel of the cyclic module generated by any nonzero element
    /// (boundary modules included). The module basis may be smaller than
    /// the subalgebra dimension.
    pub fn cyclic_kernel(sub: &Subalgebra, v: &JetElement) -> Result<Self, DaSpaceError> {
        let gens: Vec<Vec<JetElement>> =
            sub.cyclic_module_basis(v).into_iter().map(|e| vec![e]).collect();
        Self::from_matrix_spanning(sub, gens, 1, 1)
    }

    /// Matrix-valued kernel labeled by a surjective module map: the
    /// module of `k x s` matrices generated by the map under the matrix
    /// algebra over the subalgebra.
    pub fn matrix_submodule_kernel(
        sub: &Subalgebra,
        qs: &QsSample,
    ) -> Result<Self, DaSpaceError> {
        if sub.ring().vars() != 1 {
            return Err(DaSpaceError::ShapeMismatch(
                "matrix kernels are supported for one-variable specs only".into(),
            ));
        }
        let (k, s) = (qs.k, qs.s);
        // spanning set E_pq (b X): all single-entry-row rearrangements of
        // the subalgebra multiples of the map
        let mut spanning = Vec::with_capacity(k * k * sub.basis().len());
        for b in sub.basis() {
            let scaled: Vec<JetElement> =
                qs.entries.iter().map(|e| e.mul(b).expect("same ring")).collect();
            for p in 0..k {
                for q in 0..k {
                    // E_pq M has row p equal to row q of M
                    let mut mat = vec![sub.ring().zero(); k * s];
                    for j in 0..s {
                        mat[p * s + j] = scaled[q * s + j].clone();
                    }
                    spanning.push(mat);
                }
            }
        }
        Self::from_matrix_spanning(sub, spanning, k, s)
    }

    fn from_matrix_spanning(
        sub: &Subalgebra,
        spanning: Vec<Vec<JetElement>>,
        k: usize,
        s: usize,
    ) -> Result<Self, DaSpaceError> {
        let ring = sub.ring();
        let tail = tail_for(sub)?;
        let vars = ring.vars();

        // independent subset of the spanning matrices, exactly
        let kept: Vec<Vec<JetElement>> = if spanning.is_empty() || ring.dim() == 0 {
            vec![]
        } else {
            let flat = CqMat::from_rows(
                spanning
                    .iter()
                    .map(|m| m.iter().flat_map(JetElement::flatten).collect())
                    .collect(),
            );
            flat.independent_rows().into_iter().map(|i| spanning[i].clone()).collect()
        };

        // lift to polynomial representatives and project off the tail
        let b_product = match &tail {
            TailKernel::Blaschke(b) => Some(b.clone()),
            _ => None,
        };
        let basis: Vec<Vec<ProjectedFn>> = kept
            .iter()
            .map(|mat| {
                mat.iter()
                    .map(|jet| {
                        let p = ring.lift_to_poly(jet);
                        match &b_product {
                            Some(b) => {
                                let g = blaschke_projection_coefficient(b, &p);
                                ProjectedFn { poly: p, tail_part: Some(g) }
                            }
                            None => ProjectedFn::plain(p),
                        }
                    })
                    .collect()
            })
            .collect();

        // exact Gram under the entrywise-sum inner product; the Blaschke
        // correction uses that multiplication by an inner function is an
        // isometry: <p - Bg, q - Bh> = <p, q> - <g, h>
        let r = basis.len();
        let mut gram = CqMat::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                let mut acc = cq_zero();
                for e in 0..k * s {
                    let fi = &basis[i][e];
                    let fj = &basis[j][e];
                    let main = super::inner_product(&fi.poly, &fj.poly)?;
                    acc = &acc + &main;
                    if let (Some(gi), Some(gj)) = (&fi.tail_part, &fj.tail_part) {
                        let corr = super::inner_product(gi, gj)?;
                        acc = &acc - &corr;
                    }
                }
                gram[(i, j)] = acc;
            }
        }
        debug_assert!(gram.is_hermitian());
        let gram_inverse = if r == 0 {
            CqMat::zeros(0, 0)
        } else {
            gram.inverse().ok_or_else(|| {
                DaSpaceError::ShapeMismatch("finite-part Gram matrix is singular".into())
            })?
        };

        Ok(KernelModel { vars, block_size: k, value_rank: s, basis, gram, gram_inverse, tail })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn value_rank(&self) -> usize {
        self.value_rank
    }

    pub fn tail(&self) -> &TailKernel {
        &self.tail
    }

    pub fn basis(&self) -> &[Vec<ProjectedFn>] {
        &self.basis
    }

    pub fn gram(&self) -> &CqMat {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &CqMat {
        &self.gram_inverse
    }

    /// Basis functions materialized as plain polynomials. Exact for
    /// monomial and two-variable tails; for Blaschke tails the
    /// projection series is truncated with a certified bound.
    pub fn materialized_basis(
        &self,
        cfg: &TruncationConfig,
    ) -> Result<Vec<Vec<MultiPoly>>, DaSpaceError> {
        let degree = match &self.tail {
            TailKernel::Blaschke(b) => {
                let tol_sqr = &cfg.tol * &cfg.tol;
                Some(truncation_degree(b, &tol_sqr, cfg.max_degree)?)
            }
            _ => None,
        };
        Ok(self
            .basis
            .iter()
            .map(|mat| {
                mat.iter()
                    .map(|f| match (&f.tail_part, &self.tail) {
                        (Some(g), TailKernel::Blaschke(b)) => {
                            let n = degree.expect("degree chosen for Blaschke tails");
                            let bg = MultiPoly::from_coeffs(&b.coefficients(n as usize)).mul(g);
                            f.poly.sub(&bg.truncate_degree(n as u32))
                        }
                        _ => f.poly.clone(),
                    })
                    .collect()
            })
            .collect())
    }

    /// Compiles the exact model into a floating-point evaluator (used
    /// once per kernel inside sweeps).
    pub fn compile(&self) -> KernelEvaluator {
        let blaschke = match &self.tail {
            TailKernel::Blaschke(b) => Some(b.clone()),
            _ => None,
        };
        let gram_inv: Vec<Complex64> = (0..self.basis.len().pow(2))
            .map(|idx| {
                cq_to_c64(&self.gram_inverse[(idx / self.basis.len(), idx % self.basis.len())])
            })
            .collect();
        KernelEvaluator {
            vars: self.vars,
            k: self.block_size,
            s: self.value_rank,
            basis: self.basis.clone(),
            blaschke,
            gram_inv,
            tail: self.tail.clone(),
        }
    }

    /// Kernel value as a `k x k` block; scalar models give a 1 x 1
    /// block. Finite part exact, tail exact; use rational points.
    pub fn eval_exact(&self, z: &[Cq], w: &[Cq]) -> Result<Vec<Vec<Cq>>, DaSpaceError> {
        for pt in [z, w] {
            if pt.len() != self.vars {
                return Err(DaSpaceError::DimensionMismatch(pt.len(), self.vars));
            }
            let n: Rat = pt.iter().map(cq_norm_sqr).sum();
            if n >= Rat::one() {
                return Err(DaSpaceError::PointOutsideBall);
            }
        }
        let k = self.block_size;
        let b = match &self.tail {
            TailKernel::Blaschke(b) => Some(b),
            _ => None,
        };
        let mut out = vec![vec![cq_zero(); k]; k];
        let r = self.basis.len();
        for ri in 0..r {
            let mz: Vec<Cq> =
                self.basis[ri].iter().map(|f| f.eval_cq(b, z)).collect();
            for ti in 0..r {
                let c = &self.gram_inverse[(ti, ri)];
                if crate::rational::cq_is_zero(c) {
                    continue;
                }
                let mw: Vec<Cq> =
                    self.basis[ti].iter().map(|f| f.eval_cq(b, w)).collect();
                // M_r(z) M_t(w)^*: (k x s)(s x k)
                for p in 0..k {
                    for q in 0..k {
                        let mut acc = cq_zero();
                        for j in 0..self.value_rank {
                            let prod = &mz[p * self.value_rank + j]
                                * &crate::rational::conj(&mw[q * self.value_rank + j]);
                            acc = &acc + &prod;
                        }
                        let term = c * &acc;
                        out[p][q] = &out[p][q] + &term;
                    }
                }
            }
        }
        let t = self.tail_eval_exact(z, w)?;
        let s_factor = Cq::new(Rat::from_integer(num::BigInt::from(self.value_rank)), Rat::zero());
        let t_scaled = &t * &s_factor;
        for (p, row) in out.iter_mut().enumerate() {
            row[p] = &row[p] + &t_scaled;
        }
        Ok(out)
    }

    fn tail_eval_exact(&self, z: &[Cq], w: &[Cq]) -> Result<Cq, DaSpaceError> {
        let pairing = |a: &[Cq], b: &[Cq]| -> Cq {
            a.iter().zip(b).map(|(x, y)| x * &crate::rational::conj(y)).fold(cq_zero(), |s, t| &s + &t)
        };
        match &self.tail {
            TailKernel::None => Ok(cq_zero()),
            TailKernel::Monomial(m) => {
                let zw = pairing(z, w);
                let den = &cq_one() - &zw;
                let mut num = cq_one();
                for _ in 0..*m {
                    num = &num * &zw;
                }
                Ok(&num * &cq_inv(&den).expect("1 - <z,w> is nonzero inside the ball"))
            }
            TailKernel::Blaschke(b) => {
                let zw = pairing(z, w);
                let den = &cq_one() - &zw;
                let bz = b.eval_cq(&z[0]).expect("inside the disc");
                let bw = b.eval_cq(&w[0]).expect("inside the disc");
                Ok(&(&bz * &crate::rational::conj(&bw))
                    * &cq_inv(&den).expect("1 - z conj(w) is nonzero inside the disc"))
            }
            TailKernel::TwoVar => {
                let (z1, z2) = (&z[0], &z[1]);
                let (w1, w2) = (&w[0], &w[1]);
                let (w1c, w2c) = (crate::rational::conj(w1), crate::rational::conj(w2));
                let num = &(&(z2 * &w2c) + &(&(z1 * z1) * &(&w1c * &w1c)))
                    + &(&(z1 * z2) * &(&w1c * &w2c));
                let den = &(&cq_one() - &(z1 * &w1c)) - &(z2 * &w2c);
                Ok(&num * &cq_inv(&den).expect("denominator nonzero inside the ball"))
            }
        }
    }
}

/// Floating-point kernel evaluator compiled from an exact model.
#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    vars: usize,
    k: usize,
    s: usize,
    basis: Vec<Vec<ProjectedFn>>,
    blaschke: Option<BlaschkeProduct>,
    gram_inv: Vec<Complex64>,
    tail: TailKernel,
}

impl KernelEvaluator {
    pub fn block_size(&self) -> usize {
        self.k
    }

    /// `k x k` kernel block at a pair of ball points, row-major.
    pub fn eval(&self, z: &[Complex64], w: &[Complex64]) -> Result<Vec<Complex64>, DaSpaceError> {
        for pt in [z, w] {
            if pt.len() != self.vars {
                return Err(DaSpaceError::DimensionMismatch(pt.len(), self.vars));
            }
            let n: f64 = pt.iter().map(|x| x.norm_sqr()).sum();
            if n > 1.0 - BALL_MARGIN {
                return Err(DaSpaceError::PointOutsideBall);
            }
        }
        let (k, s) = (self.k, self.s);
        let r = self.basis.len();
        let b = self.blaschke.as_ref();
        let mz: Vec<Vec<Complex64>> = self
            .basis
            .iter()
            .map(|mat| mat.iter().map(|f| f.eval_c64(b, z)).collect())
            .collect();
        let mw: Vec<Vec<Complex64>> = self
            .basis
            .iter()
            .map(|mat| mat.iter().map(|f| f.eval_c64(b, w)).collect())
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); k * k];
        for ri in 0..r {
            for ti in 0..r {
                let c = self.gram_inv[ti * r + ri];
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for p in 0..k {
                    for q in 0..k {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for j in 0..s {
                            acc += mz[ri][p * s + j] * mw[ti][q * s + j].conj();
                        }
                        out[p * k + q] += c * acc;
                    }
                }
            }
        }
        let t = self.tail_eval(z, w) * s as f64;
        for p in 0..k {
            out[p * k + p] += t;
        }
        Ok(out)
    }

    /// Scalar kernel value; panics on matrix models.
    pub fn eval_scalar(&self, z: &[Complex64], w: &[Complex64]) -> Result<Complex64, DaSpaceError> {
        assert_eq!(self.k, 1, "eval_scalar needs a scalar kernel");
        Ok(self.eval(z, w)?[0])
    }

    fn tail_eval(&self, z: &[Complex64], w: &[Complex64]) -> Complex64 {
        let pairing = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
            a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
        };
        match &self.tail {
            TailKernel::None => Complex64::new(0.0, 0.0),
            TailKernel::Monomial(m) => {
                let zw = pairing(z, w);
                zw.powu(*m as u32) / (1.0 - zw)
            }
            TailKernel::Blaschke(b) => {
                let zw = pairing(z, w);
                b.eval_c64(z[0]) * b.eval_c64(w[0]).conj() / (1.0 - zw)
            }
            TailKernel::TwoVar => {
                let (z1, z2) = (z[0], z[1]);
                let (w1, w2) = (w[0], w[1]);
                let num = z2 * w2.conj() + z1 * z1 * (w1.conj() * w1.conj())
                    + z1 * z2 * w1.conj() * w2.conj();
                num / (1.0 - z1 * w1.conj() - z2 * w2.conj())
            }
        }
    }
}

fn tail_for(sub: &Subalgebra) -> Result<TailKernel, DaSpaceError> {
    Ok(match sub.spec() {
        SubalgebraSpec::Semigroup(s) => TailKernel::Monomial(s.conductor_exponent() as usize),
        SubalgebraSpec::OnePlusIdeal { roots } => {
            TailKernel::Blaschke(BlaschkeProduct::new(roots.clone())?)
        }
        SubalgebraSpec::TwoVarExample => TailKernel::TwoVar,
    })
}

/// Coefficient function `g` of the projection of `p` onto `B H^2`:
/// `P(p) = B g` with `g_j = sum_i p_i conj(b_(i-j))`. Exact and finite
/// because `p` is a polynomial.
fn blaschke_projection_coefficient(b: &BlaschkeProduct, p: &MultiPoly) -> MultiPoly {
    let pc = p.coeffs();
    let deg = pc.len().saturating_sub(1);
    let bc = b.coefficients(deg);
    let mut g = vec![cq_zero(); pc.len()];
    for (j, gj) in g.iter_mut().enumerate() {
        let mut acc = cq_zero();
        for (i, pi) in pc.iter().enumerate().skip(j) {
            let term = pi * &crate::rational::conj(&bc[i - j]);
            acc = &acc + &term;
        }
        *gj = acc;
    }
    MultiPoly::from_coeffs(&g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::sample_qs;
    use crate::rational::{cq, cq_int, rat_to_f64};
    use crate::semigroup::NumericalSemigroup;

    fn semigroup_sub(gens: &[u64]) -> Subalgebra {
        Subalgebra::new(SubalgebraSpec::Semigroup(NumericalSemigroup::new(gens).unwrap())).unwrap()
    }

    #[test]
    fn kernel_25_at_unit_one() {
        let sub = semigroup_sub(&[2, 5]);
        let k = KernelModel::submodule_kernel(&sub, &sub.ring().one()).unwrap();
        assert_eq!(k.basis().len(), 2);
        assert_eq!(k.gram(), &CqMat::identity(2));
        assert_eq!(*k.tail(), TailKernel::Monomial(4));
        // value at z = w = 1/2: 1 + 1/16 + (1/256)/(3/4) = 205/192
        let half = vec![cq(1, 2, 0, 1)];
        let v = k.eval_exact(&half, &half).unwrap();
        assert_eq!(v[0][0], cq(205, 192, 0, 1));
        let vf = k.compile().eval_scalar(&[Complex64::new(0.5, 0.0)], &[Complex64::new(0.5, 0.0)]).unwrap();
        assert!((vf.re - rat_to_f64(&rat(205, 192))).abs() < 1e-14);
        assert!(vf.im.abs() < 1e-15);
    }

    #[test]
    fn kernel_23_closed_form() {
        let sub = semigroup_sub(&[2, 3]);
        let k = KernelModel::submodule_kernel(&sub, &sub.ring().one()).unwrap();
        let ev = k.compile();
        let z = [Complex64::new(0.3, 0.2)];
        let w = [Complex64::new(-0.1, 0.4)];
        let zw = z[0] * w[0].conj();
        let expected = 1.0 + zw.powu(2) / (1.0 - zw);
        assert!((ev.eval_scalar(&z, &w).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn classical_kernel_is_szego() {
        let sub = semigroup_sub(&[1]);
        let u = sub.element_from_coordinates(&[]);
        let k = KernelModel::submodule_kernel(&sub, &u).unwrap();
        assert!(k.basis().is_empty());
        let z = vec![cq(1, 3, 1, 7)];
        let w = vec![cq(-2, 5, 1, 9)];
        let v = k.eval_exact(&z, &w).unwrap();
        let zw = &z[0] * &crate::rational::conj(&w[0]);
        let expected = cq_inv(&(&cq_one() - &zw)).unwrap();
        assert_eq!(v[0][0], expected);
    }

    #[test]
    fn two_var_kernel_matches_formula() {
        let sub = Subalgebra::new(SubalgebraSpec::TwoVarExample).unwrap();
        // unit 1 + 2z: finite part (1 + 2 z1)/5 paired, since the Gram is
        // 1 + |2|^2 = 5
        let u = sub.ring().from_flat(&[cq_one(), cq_int(2, 0)]);
        let k = KernelModel::submodule_kernel(&sub, &u).unwrap();
        let z = [Complex64::new(0.2, 0.0), Complex64::new(0.3, 0.1)];
        let w = [Complex64::new(-0.1, 0.2), Complex64::new(0.0, 0.25)];
        let got = k.compile().eval_scalar(&z, &w).unwrap();
        let f = |p: &[Complex64]| Complex64::new(1.0, 0.0) + 2.0 * p[0];
        let tail_num = z[1] * w[1].conj()
            + z[0].powu(2) * w[0].conj().powu(2)
            + z[0] * z[1] * w[0].conj() * w[1].conj();
        let tail = tail_num / (1.0 - z[0] * w[0].conj() - z[1] * w[1].conj());
        let expected = f(&z) * f(&w).conj() / 5.0 + tail;
        assert!((got - expected).norm() < 1e-15);
    }

    #[test]
    fn one_plus_ideal_projection_is_orthogonal_to_tail() {
        // f = z(z - 1/2): basis rep of the unit orbit element with
        // coordinate 3 is interpolated exactly, projected, and the
        // materialized polynomial is near-orthogonal to B z^j
        let sub = Subalgebra::new(SubalgebraSpec::OnePlusIdeal {
            roots: vec![(cq_zero(), 1), (cq(1, 2, 0, 1), 1)],
        })
        .unwrap();
        let u = sub.element_from_coordinates(&[cq_int(3, 0)]);
        let k = KernelModel::submodule_kernel(&sub, &u).unwrap();
        assert_eq!(k.basis().len(), 1);
        let cfg = TruncationConfig::default();
        let mats = k.materialized_basis(&cfg).unwrap();
        let f = &mats[0][0];
        let TailKernel::Blaschke(b) = k.tail() else { panic!("expected a Blaschke tail") };
        let n = 96;
        let bc = MultiPoly::from_coeffs(&b.coefficients(n));
        for j in 0..4u32 {
            let bzj = bc.mul(&MultiPoly::monomial(1, &[j], cq_one())).truncate_degree(n as u32);
            let ip = super::super::inner_product(f, &bzj).unwrap();
            let sz = rat_to_f64(&cq_norm_sqr(&ip)).sqrt();
            assert!(sz < 1e-11, "projection residual {sz} at j={j}");
        }
        // Gram via isometry equals the truncated direct computation
        let direct = super::super::norm_sqr(f);
        let exact = k.gram()[(0, 0)].clone();
        assert!((rat_to_f64(&direct) - rat_to_f64(&exact.re)).abs() < 1e-9);
    }

    #[test]
    fn matrix_scalar_consistency() {
        let sub = semigroup_sub(&[2, 5]);
        let u = sub.ring().from_flat(&[cq_one(), cq_int(1, 0), cq_zero(), cq_int(2, 0)]);
        let scalar = KernelModel::submodule_kernel(&sub, &u).unwrap();
        let qs = QsSample { k: 1, s: 1, entries: vec![u.clone()] };
        let matrix = KernelModel::matrix_submodule_kernel(&sub, &qs).unwrap();
        assert_eq!(scalar.gram(), matrix.gram());
        let z = vec![cq(1, 4, 0, 1)];
        let w = vec![cq(1, 3, -1, 5)];
        assert_eq!(
            scalar.eval_exact(&z, &w).unwrap(),
            matrix.eval_exact(&z, &w).unwrap()
        );
    }

    #[test]
    fn matrix_kernel_identity_map() {
        // k = s = 2, Z = I over <2,3>: module is all constant 2x2
        // matrices; the kernel is 2 (1 + 2 tail/2... ) — concretely
        // 2 I + 2 tail I with tail multiplicity s = 2
        let sub = semigroup_sub(&[2, 3]);
        let ring = sub.ring();
        let qs = QsSample {
            k: 2,
            s: 2,
            entries: vec![ring.one(), ring.zero(), ring.zero(), ring.one()],
        };
        let k = KernelModel::matrix_submodule_kernel(&sub, &qs).unwrap();
        assert_eq!(k.basis().len(), 4);
        assert_eq!(k.gram(), &CqMat::identity(4));
        let z = [Complex64::new(0.4, 0.1)];
        let w = [Complex64::new(0.2, -0.3)];
        let zw = z[0] * w[0].conj();
        let tail = zw.powu(2) / (1.0 - zw);
        let got = k.compile().eval(&z, &w).unwrap();
        for p in 0..2 {
            for q in 0..2 {
                let expected = if p == q { 2.0 * (1.0 + tail) } else { Complex64::new(0.0, 0.0) };
                assert!((got[p * 2 + q] - expected).norm() < 1e-14, "block ({p},{q})");
            }
        }
    }

    #[test]
    fn matrix_kernel_rank_one_map() {
        // k = 2, s = 1, X = (1, z)^T over <2,3>: the module is all of
        // (P/c)^2, giving kernel (1 + z conj(w)) I + tail I
        let sub = semigroup_sub(&[2, 3]);
        let ring = sub.ring();
        let z_jet = ring.from_flat(&[cq_zero(), cq_one()]);
        let qs = QsSample { k: 2, s: 1, entries: vec![ring.one(), z_jet] };
        let k = KernelModel::matrix_submodule_kernel(&sub, &qs).unwrap();
        assert_eq!(k.basis().len(), 4);
        let z = [Complex64::new(0.25, 0.35)];
        let w = [Complex64::new(-0.4, 0.1)];
        let zw = z[0] * w[0].conj();
        let tail = zw.powu(2) / (1.0 - zw);
        let got = k.compile().eval(&z, &w).unwrap();
        for p in 0..2 {
            for q in 0..2 {
                let expected =
                    if p == q { 1.0 + zw + tail } else { Complex64::new(0.0, 0.0) };
                assert!((got[p * 2 + q] - expected).norm() < 1e-14, "block ({p},{q})");
            }
        }
    }

    #[test]
    fn hermitian_symmetry_and_positivity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let subs = vec![
            semigroup_sub(&[2, 3]),
            semigroup_sub(&[2, 5]),
            Subalgebra::new(SubalgebraSpec::OnePlusIdeal {
                roots: vec![(cq_zero(), 1), (cq(1, 2, 0, 1), 1)],
            })
            .unwrap(),
        ];
        for sub in subs {
            let coords: Vec<Cq> = (0..sub.picard_dim())
                .map(|_| cq_int(rng.gen_range(-2..=2), rng.gen_range(-2..=2)))
                .collect();
            let u = sub.element_from_coordinates(&coords);
            if !u.is_unit() {
                continue;
            }
            let ev = KernelModel::submodule_kernel(&sub, &u).unwrap().compile();
            let points: Vec<[Complex64; 1]> = (0..6)
                .map(|_| {
                    [Complex64::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(0.0..6.28))]
                })
                .collect();
            // Hermitian symmetry
            for a in &points {
                for b in &points {
                    let kab = ev.eval_scalar(a, b).unwrap();
                    let kba = ev.eval_scalar(b, a).unwrap();
                    assert!((kab - kba.conj()).norm() <= 1e-14 * (1.0 + kab.norm()));
                }
            }
            // positivity of the sampled Gram matrix via its smallest
            // eigenvalue (power iteration on the inverse is overkill;
            // use the characteristic bound: all leading principal minors
            // nonnegative is flaky numerically, so check x* G x >= -tol
            // for random x)
            let n = points.len();
            let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
            let mut trace = 0.0;
            for i in 0..n {
                for j in 0..n {
                    gram[i * n + j] = ev.eval_scalar(&points[i], &points[j]).unwrap();
                }
                trace += gram[i * n + i].re;
            }
            for _ in 0..32 {
                let x: Vec<Complex64> = (0..n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let mut quad = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        quad += x[i].conj() * gram[i * n + j] * x[j];
                    }
                }
                assert!(quad.re >= -1e-10 * trace, "kernel Gram not PSD: {}", quad.re);
            }
        }
    }

    #[test]
    fn kernel_is_orbit_invariant() {
        // equivalent units give literally the same kernel values
        let sub = semigroup_sub(&[2, 5]);
        let ring = sub.ring();
        let u = ring.from_flat(&[cq_one(), cq_int(2, 0), cq_int(1, 0), cq_int(-1, 0)]);
        let a = ring.from_flat(&[cq_int(3, 0), cq_zero(), cq_int(2, 0), cq_zero()]); // 3 + 2 z^2
        let v = u.mul(&a).unwrap();
        let k1 = KernelModel::submodule_kernel(&sub, &u).unwrap();
        let k2 = KernelModel::submodule_kernel(&sub, &v).unwrap();
        let z = vec![cq(2, 5, 1, 5)];
        let w = vec![cq(-1, 4, 1, 8)];
        assert_eq!(k1.eval_exact(&z, &w).unwrap(), k2.eval_exact(&z, &w).unwrap());
    }

    #[test]
    fn eval_rejects_points_outside_ball() {
        let sub = semigroup_sub(&[2, 3]);
        let k = KernelModel::submodule_kernel(&sub, &sub.ring().one()).unwrap();
        let ev = k.compile();
        assert!(matches!(
            ev.eval_scalar(&[Complex64::new(1.0, 0.0)], &[Complex64::new(0.0, 0.0)]),
            Err(DaSpaceError::PointOutsideBall)
        ));
        assert!(matches!(
            k.eval_exact(&[cq_one()], &[cq_zero()]),
            Err(DaSpaceError::PointOutsideBall)
        ));
    }

    #[test]
    fn non_unit_generator_gives_boundary_kernel() {
        // <2,3>, generator z: kernel z conj(w) + tail
        let sub = semigroup_sub(&[2, 3]);
        let zjet = sub.ring().from_flat(&[cq_zero(), cq_one()]);
        let k = KernelModel::cyclic_kernel(&sub, &zjet).unwrap();
        assert_eq!(k.basis().len(), 1);
        let z = vec![cq(1, 2, 0, 1)];
        let w = vec![cq(1, 3, 0, 1)];
        let got = k.eval_exact(&z, &w).unwrap()[0][0].clone();
        let zw = &z[0] * &crate::rational::conj(&w[0]);
        let tail = &(&zw * &zw) * &cq_inv(&(&cq_one() - &zw)).unwrap();
        let expected = &zw + &tail;
        assert_eq!(got, expected);
        // the unit-checked path rejects it
        assert!(matches!(
            KernelModel::submodule_kernel(&sub, &zjet),
            Err(DaSpaceError::NotAUnit)
        ));
    }

    #[test]
    fn sample_qs_shapes_flow_through() {
        use rand::SeedableRng;
        let sub = semigroup_sub(&[2, 3]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for s in 1..=2 {
            let qs = sample_qs(sub.ring(), 2, s, &mut rng).unwrap();
            let k = KernelModel::matrix_submodule_kernel(&sub, &qs).unwrap();
            assert_eq!(k.block_size(), 2);
            assert_eq!(k.value_rank(), s);
        }
    }
}
