//! Exact arithmetic in Artinian quotient rings via Taylor jets.
//!
//! The quotient of the polynomial ring by a conductor ideal splits as a
//! product of local jet algebras at the support points. Elements are
//! stored as truncated Taylor expansions there, which makes the unit
//! criterion (nonzero value at every support point), inversion, and all
//! the orbit computations structural and exact.

use crate::daspace::poly::MultiPoly;
use crate::exact::CqMat;
use crate::rational::{cq_inv, cq_is_zero, cq_one, cq_zero, norm_sqr, Cq, Rat};
use crate::semigroup::NumericalSemigroup;
use num::{BigInt, One};
use rand::Rng;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuotientError {
    #[error("support point must lie strictly inside the unit ball")]
    OutsideBall,
    #[error("support points must be pairwise distinct")]
    DuplicateSupport,
    #[error("jet order must be positive")]
    ZeroJetOrder,
    #[error("polynomial has {got} variables, ring expects {expected}")]
    VariableCount { expected: usize, got: usize },
    #[error("elements belong to different quotient rings")]
    RingMismatch,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("invalid module map shape: need 1 <= s <= k, got k={k}, s={s}")]
    InvalidShape { k: usize, s: usize },
    #[error("could not draw a surjective module map after {0} attempts")]
    SampleRetriesExhausted(usize),
}

/// Support point of the conductor: a ball point together with the jet
/// order of the primary ideal there.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportPoint {
    pub location: Vec<Cq>,
    pub jet_order: usize,
}

impl SupportPoint {
    pub fn new(location: Vec<Cq>, jet_order: usize) -> Result<Self, QuotientError> {
        if jet_order == 0 {
            return Err(QuotientError::ZeroJetOrder);
        }
        let n: Rat = location.iter().map(norm_sqr).sum();
        if n >= Rat::one() {
            return Err(QuotientError::OutsideBall);
        }
        Ok(SupportPoint { location, jet_order })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RingKind {
    /// Jets along `z` at points of the disc.
    Univariate,
    /// The fixed two-variable quotient by `(w, z^2)`: value and `d/dz`
    /// at the origin. Same jet arithmetic as a univariate double point.
    TwoVarCusp,
}

/// A product of local jet algebras; the Chinese-remainder form of the
/// quotient by a conductor ideal.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientRing {
    vars: usize,
    points: Vec<SupportPoint>,
    kind: RingKind,
}

impl QuotientRing {
    /// Univariate quotient with jets of the given orders at the given
    /// disc points. An empty point list is the zero ring (unconstrained
    /// problems reduce to it).
    pub fn univariate(points: Vec<(Cq, usize)>) -> Result<Arc<Self>, QuotientError> {
        for (i, (a, _)) in points.iter().enumerate() {
            for (b, _) in &points[..i] {
                if a == b {
                    return Err(QuotientError::DuplicateSupport);
                }
            }
        }
        let points = points
            .into_iter()
            .map(|(a, k)| SupportPoint::new(vec![a], k))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Arc::new(QuotientRing { vars: 1, points, kind: RingKind::Univariate }))
    }

    /// The quotient `C[z,w]/(w, z^2)` of the fixed two-variable cusp.
    pub fn two_var_cusp() -> Arc<Self> {
        let origin = SupportPoint { location: vec![cq_zero(), cq_zero()], jet_order: 2 };
        Arc::new(QuotientRing { vars: 2, points: vec![origin], kind: RingKind::TwoVarCusp })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn support(&self) -> &[SupportPoint] {
        &self.points
    }

    /// Total vector-space dimension (sum of the per-point jet orders).
    pub fn dim(&self) -> usize {
        self.points.iter().map(|p| p.jet_order).sum()
    }

    fn point_offsets(&self) -> Vec<usize> {
        let mut offs = Vec::with_capacity(self.points.len());
        let mut acc = 0;
        for p in &self.points {
            offs.push(acc);
            acc += p.jet_order;
        }
        offs
    }

    /// Quotient map: Taylor jets of `p` at each support point, truncated
    /// to the jet order. A ring homomorphism, exactly.
    pub fn reduce(self: &Arc<Self>, p: &MultiPoly) -> Result<JetElement, QuotientError> {
        if p.vars() != self.vars {
            return Err(QuotientError::VariableCount { expected: self.vars, got: p.vars() });
        }
        let coeffs = match self.kind {
            RingKind::Univariate => self
                .points
                .iter()
                .map(|pt| univariate_jets(p, &pt.location[0], pt.jet_order))
                .collect(),
            RingKind::TwoVarCusp => {
                vec![vec![p.coeff(&[0, 0]), p.coeff(&[1, 0])]]
            }
        };
        Ok(JetElement { ring: Arc::clone(self), coeffs })
    }

    pub fn zero(self: &Arc<Self>) -> JetElement {
        JetElement {
            ring: Arc::clone(self),
            coeffs: self.points.iter().map(|p| vec![cq_zero(); p.jet_order]).collect(),
        }
    }

    pub fn one(self: &Arc<Self>) -> JetElement {
        let mut e = self.zero();
        for c in &mut e.coeffs {
            c[0] = cq_one();
        }
        e
    }

    /// Element from the flat coordinate vector (points in order, then
    /// ascending jet order within each point).
    pub fn from_flat(self: &Arc<Self>, flat: &[Cq]) -> JetElement {
        assert_eq!(flat.len(), self.dim(), "flat coordinate length mismatch");
        let mut coeffs = Vec::with_capacity(self.points.len());
        let mut i = 0;
        for p in &self.points {
            coeffs.push(flat[i..i + p.jet_order].to_vec());
            i += p.jet_order;
        }
        JetElement { ring: Arc::clone(self), coeffs }
    }

    /// Hermite interpolation: the unique polynomial of degree below the
    /// ring dimension with the prescribed jets. For the two-variable
    /// cusp the representative is `a + b z` in two variables.
    pub fn lift_to_poly(self: &Arc<Self>, a: &JetElement) -> MultiPoly {
        assert!(Arc::ptr_eq(&a.ring, self) || *self == a.ring, "ring mismatch in lift");
        match self.kind {
            RingKind::TwoVarCusp => {
                let mut p = MultiPoly::zero(2);
                p.add_term(vec![0, 0], a.coeffs[0][0].clone());
                p.add_term(vec![1, 0], a.coeffs[0][1].clone());
                p
            }
            RingKind::Univariate => {
                let d = self.dim();
                if d == 0 {
                    return MultiPoly::zero(1);
                }
                // single point at the origin: jets are the coefficients
                if self.points.len() == 1 && cq_is_zero(&self.points[0].location[0]) {
                    return MultiPoly::from_coeffs(&a.coeffs[0]);
                }
                let mut rows = Vec::with_capacity(d);
                let mut rhs = Vec::with_capacity(d);
                for (pi, pt) in self.points.iter().enumerate() {
                    let alpha = &pt.location[0];
                    for i in 0..pt.jet_order {
                        let mut row = Vec::with_capacity(d);
                        for n in 0..d {
                            row.push(jet_coefficient_of_monomial(n, i, alpha));
                        }
                        rows.push(row);
                        rhs.push(a.coeffs[pi][i].clone());
                    }
                }
                let (sol, _) = CqMat::from_rows(rows)
                    .solve(&rhs)
                    .expect("Hermite interpolation system is unisolvent");
                MultiPoly::from_coeffs(&sol)
            }
        }
    }
}

/// Jets of the univariate restriction: coefficient `i` is the `i`-th
/// Taylor coefficient of `p` at `alpha`.
fn univariate_jets(p: &MultiPoly, alpha: &Cq, order: usize) -> Vec<Cq> {
    let mut jets = vec![cq_zero(); order];
    for (exps, c) in p.terms() {
        let n = exps[0] as usize;
        let top = order.min(n + 1);
        for (i, jet) in jets.iter_mut().enumerate().take(top) {
            let contrib = c * &jet_coefficient_of_monomial(n, i, alpha);
            *jet = &*jet + &contrib;
        }
    }
    jets
}

/// `binom(n, i) * alpha^(n-i)`: the `i`-th Taylor coefficient of `z^n`
/// at `alpha`.
fn jet_coefficient_of_monomial(n: usize, i: usize, alpha: &Cq) -> Cq {
    if i > n {
        return cq_zero();
    }
    if cq_is_zero(alpha) {
        return if i == n { cq_one() } else { cq_zero() };
    }
    let mut pow = cq_one();
    for _ in 0..(n - i) {
        pow = &pow * alpha;
    }
    let b = binomial(n, i);
    pow.scale(Rat::from_integer(b))
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut b = BigInt::one();
    for j in 0..k {
        b = b * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    b
}

/// Element of the quotient ring: one truncated Taylor expansion per
/// support point.
#[derive(Debug, Clone, PartialEq)]
pub struct JetElement {
    ring: Arc<QuotientRing>,
    coeffs: Vec<Vec<Cq>>,
}

impl JetElement {
    pub fn ring(&self) -> &Arc<QuotientRing> {
        &self.ring
    }

    pub fn point_coeffs(&self, point: usize) -> &[Cq] {
        &self.coeffs[point]
    }

    /// Order-zero jet (the value) at a support point.
    pub fn value_at(&self, point: usize) -> &Cq {
        &self.coeffs[point][0]
    }

    pub fn flatten(&self) -> Vec<Cq> {
        self.coeffs.iter().flatten().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(cq_is_zero)
    }

    fn same_ring(&self, other: &JetElement) -> Result<(), QuotientError> {
        if Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring {
            Ok(())
        } else {
            Err(QuotientError::RingMismatch)
        }
    }

    pub fn add(&self, other: &JetElement) -> Result<JetElement, QuotientError> {
        self.same_ring(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(JetElement { ring: Arc::clone(&self.ring), coeffs })
    }

    pub fn sub(&self, other: &JetElement) -> Result<JetElement, QuotientError> {
        self.same_ring(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(JetElement { ring: Arc::clone(&self.ring), coeffs })
    }

    pub fn scale(&self, c: &Cq) -> JetElement {
        let coeffs = self.coeffs.iter().map(|a| a.iter().map(|x| x * c).collect()).collect();
        JetElement { ring: Arc::clone(&self.ring), coeffs }
    }

    /// Truncated convolution per support point (Leibniz rule in jet
    /// coordinates). Multiplicative exactly: `reduce(p)*reduce(q) =
    /// reduce(pq)`.
    pub fn mul(&self, other: &JetElement) -> Result<JetElement, QuotientError> {
        self.same_ring(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| {
                let k = a.len();
                let mut out = vec![cq_zero(); k];
                for (i, ai) in a.iter().enumerate() {
                    if cq_is_zero(ai) {
                        continue;
                    }
                    for (j, bj) in b.iter().enumerate().take(k - i) {
                        let prod = ai * bj;
                        out[i + j] = &out[i + j] + &prod;
                    }
                }
                out
            })
            .collect();
        Ok(JetElement { ring: Arc::clone(&self.ring), coeffs })
    }

    /// Unit iff the value at every support point is nonzero.
    pub fn is_unit(&self) -> bool {
        self.coeffs.iter().all(|c| !cq_is_zero(&c[0]))
    }

    /// Exact inverse by per-point power-series inversion.
    pub fn invert(&self) -> Result<JetElement, QuotientError> {
        if !self.is_unit() {
            return Err(QuotientError::NotAUnit);
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let k = a.len();
                let inv0 = cq_inv(&a[0]).expect("unit has nonzero value");
                let mut b = vec![cq_zero(); k];
                b[0] = inv0.clone();
                for i in 1..k {
                    let mut acc = cq_zero();
                    for j in 1..=i {
                        let prod = &a[j] * &b[i - j];
                        acc = &acc + &prod;
                    }
                    b[i] = -&acc * &inv0;
                }
                b
            })
            .collect();
        Ok(JetElement { ring: Arc::clone(&self.ring), coeffs })
    }
}

/// Which cusp subalgebra cuts the ring out.
#[derive(Debug, Clone, PartialEq)]
pub enum SubalgebraSpec {
    /// Monomial algebra spanned by `z^n`, `n` in the semigroup.
    Semigroup(NumericalSemigroup),
    /// `C 1 + f C[z]` with `f` the monic polynomial with the given
    /// roots and multiplicities, all roots inside the disc.
    OnePlusIdeal { roots: Vec<(Cq, usize)> },
    /// The fixed algebra generated by `w, zw, z^2, z^3` in two variables.
    TwoVarExample,
}

/// A subalgebra spec prepared for computation: the quotient ring, the
/// basis of the subalgebra mod conductor, and the linear functionals
/// cutting it out of the full quotient.
#[derive(Debug, Clone)]
pub struct Subalgebra {
    spec: SubalgebraSpec,
    ring: Arc<QuotientRing>,
    /// Vector-space basis of the subalgebra mod conductor; `basis[0]`
    /// is the identity whenever the ring is nonzero.
    basis: Vec<JetElement>,
    /// Rows spanning the annihilator of the subalgebra inside the dual
    /// of the quotient; corank equals `basis.len()`.
    annihilator: CqMat,
    /// Flat positions eliminated by the unit action in canonical forms
    /// (the non-identity subalgebra directions); empty unless the
    /// subalgebra mod conductor has dimension > 1.
    eliminated_positions: Vec<usize>,
    /// Generating functions of the algebra, used for separation tests.
    generators: Vec<MultiPoly>,
}

impl Subalgebra {
    pub fn new(spec: SubalgebraSpec) -> Result<Self, QuotientError> {
        match &spec {
            SubalgebraSpec::Semigroup(s) => {
                let m = s.conductor_exponent() as usize;
                let ring = if m == 0 {
                    QuotientRing::univariate(vec![])?
                } else {
                    QuotientRing::univariate(vec![(cq_zero(), m)])?
                };
                let exps = s.subalgebra_basis_mod_conductor();
                let basis = exps
                    .iter()
                    .map(|&n| {
                        let mono = MultiPoly::monomial(1, &[n as u32], cq_one());
                        ring.reduce(&mono).expect("one variable")
                    })
                    .collect::<Vec<_>>();
                let gaps = s.gaps();
                let mut ann = CqMat::zeros(gaps.len(), m);
                for (r, &g) in gaps.iter().enumerate() {
                    ann[(r, g as usize)] = cq_one();
                }
                let eliminated = exps.iter().filter(|&&n| n > 0).map(|&n| n as usize).collect();
                let generators = s
                    .generators()
                    .iter()
                    .map(|&a| MultiPoly::monomial(1, &[a as u32], cq_one()))
                    .collect();
                Ok(Subalgebra {
                    spec,
                    ring,
                    basis,
                    annihilator: ann,
                    eliminated_positions: eliminated,
                    generators,
                })
            }
            SubalgebraSpec::OnePlusIdeal { roots } => {
                let ring = QuotientRing::univariate(roots.clone())?;
                let d = ring.dim();
                let basis = vec![ring.one()];
                let offsets = ring.point_offsets();
                let mut rows = Vec::new();
                for (j, pt) in ring.support().iter().enumerate() {
                    for i in 1..pt.jet_order {
                        let mut row = vec![cq_zero(); d];
                        row[offsets[j] + i] = cq_one();
                        rows.push(row);
                    }
                    if j > 0 {
                        let mut row = vec![cq_zero(); d];
                        row[offsets[0]] = cq_one();
                        row[offsets[j]] = -cq_one();
                        rows.push(row);
                    }
                }
                let ann = if rows.is_empty() {
                    CqMat::zeros(0, d)
                } else {
                    CqMat::from_rows(rows)
                };
                // f and z f generate enough of C1 + fC[z] to separate
                // any pair the algebra separates
                let mut f = MultiPoly::one(1);
                for (root, mult) in roots {
                    let factor =
                        MultiPoly::from_coeffs(&[-root.clone(), cq_one()]);
                    for _ in 0..*mult {
                        f = f.mul(&factor);
                    }
                }
                let zf = f.mul(&MultiPoly::monomial(1, &[1], cq_one()));
                Ok(Subalgebra {
                    spec,
                    ring,
                    basis,
                    annihilator: ann,
                    eliminated_positions: vec![],
                    generators: vec![f, zf],
                })
            }
            SubalgebraSpec::TwoVarExample => {
                let ring = QuotientRing::two_var_cusp();
                let basis = vec![ring.one()];
                let mut ann = CqMat::zeros(1, 2);
                ann[(0, 1)] = cq_one();
                let generators = vec![
                    MultiPoly::monomial(2, &[0, 1], cq_one()),
                    MultiPoly::monomial(2, &[1, 1], cq_one()),
                    MultiPoly::monomial(2, &[2, 0], cq_one()),
                    MultiPoly::monomial(2, &[3, 0], cq_one()),
                ];
                Ok(Subalgebra {
                    spec,
                    ring,
                    basis,
                    annihilator: ann,
                    eliminated_positions: vec![],
                    generators,
                })
            }
        }
    }

    pub fn spec(&self) -> &SubalgebraSpec {
        &self.spec
    }

    pub fn ring(&self) -> &Arc<QuotientRing> {
        &self.ring
    }

    pub fn basis(&self) -> &[JetElement] {
        &self.basis
    }

    pub fn annihilator(&self) -> &CqMat {
        &self.annihilator
    }

    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    /// Dimension of the orbit-coordinate space: ring dimension minus
    /// subalgebra dimension.
    pub fn picard_dim(&self) -> usize {
        self.ring.dim() - self.basis.len()
    }

    /// Membership in the subalgebra mod conductor: all annihilator
    /// functionals vanish on `a`.
    pub fn in_subalgebra(&self, a: &JetElement) -> Result<bool, QuotientError> {
        self.check_ring(a)?;
        let flat = a.flatten();
        for r in 0..self.annihilator.rows {
            let mut acc = cq_zero();
            for (c, x) in flat.iter().enumerate() {
                if !cq_is_zero(&self.annihilator[(r, c)]) {
                    let prod = &self.annihilator[(r, c)] * x;
                    acc = &acc + &prod;
                }
            }
            if !cq_is_zero(&acc) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_ring(&self, a: &JetElement) -> Result<(), QuotientError> {
        if Arc::ptr_eq(&self.ring, a.ring()) || *self.ring == **a.ring() {
            Ok(())
        } else {
            Err(QuotientError::RingMismatch)
        }
    }

    /// Vector-space basis of the cyclic module generated by a unit.
    pub fn submodule_basis(&self, u: &JetElement) -> Result<Vec<JetElement>, QuotientError> {
        self.check_ring(u)?;
        if !u.is_unit() {
            return Err(QuotientError::NotAUnit);
        }
        Ok(self.cyclic_module_basis(u))
    }

    /// Same as `submodule_basis` but accepts non-units (boundary
    /// modules); dependent products are dropped by exact row reduction.
    pub fn cyclic_module_basis(&self, v: &JetElement) -> Vec<JetElement> {
        let products: Vec<JetElement> =
            self.basis.iter().map(|b| v.mul(b).expect("same ring")).collect();
        if products.is_empty() {
            return vec![];
        }
        let mat = CqMat::from_rows(products.iter().map(JetElement::flatten).collect());
        mat.independent_rows().into_iter().map(|i| products[i].clone()).collect()
    }

    /// Do two units generate the same cyclic module? Solved exactly:
    /// `u1 = a u2` for `a` in the subalgebra, then `a` must be a unit.
    pub fn orbit_equivalent(&self, u1: &JetElement, u2: &JetElement) -> Result<bool, QuotientError> {
        self.check_ring(u1)?;
        self.check_ring(u2)?;
        if !u1.is_unit() || !u2.is_unit() {
            return Err(QuotientError::NotAUnit);
        }
        if self.ring.dim() == 0 {
            return Ok(true);
        }
        let cols: Vec<Vec<Cq>> =
            self.basis.iter().map(|b| u2.mul(b).expect("same ring").flatten()).collect();
        let d = self.ring.dim();
        let mut mat = CqMat::zeros(d, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for i in 0..d {
                mat[(i, j)] = col[i].clone();
            }
        }
        let Some((sol, _)) = mat.solve(&u1.flatten()) else {
            return Ok(false);
        };
        let mut a = self.ring.zero();
        for (c, b) in sol.iter().zip(&self.basis) {
            a = a.add(&b.scale(c)).expect("same ring");
        }
        Ok(a.is_unit())
    }

    /// Complete orbit invariant for the unit action of the subalgebra.
    ///
    /// The unit is scaled so the value at the first support point is 1,
    /// then each non-identity subalgebra direction is eliminated from
    /// the jet coordinates greedily in flat coordinate order. The
    /// remaining free coordinates are returned; two units are orbit
    /// equivalent iff these agree exactly.
    pub fn picard_coordinates(&self, u: &JetElement) -> Result<Vec<Cq>, QuotientError> {
        self.check_ring(u)?;
        if !u.is_unit() {
            return Err(QuotientError::NotAUnit);
        }
        let d = self.ring.dim();
        if d == 0 {
            return Ok(vec![]);
        }
        let scale = cq_inv(u.value_at(0)).expect("unit value is nonzero");
        let mut v = u.scale(&scale).flatten();

        if self.basis.len() > 1 {
            let rows: Vec<Vec<Cq>> = self.basis[1..]
                .iter()
                .map(|b| u.mul(b).expect("same ring").flatten())
                .collect();
            let mut w = CqMat::from_rows(rows);
            let pivots = w.rref();
            debug_assert_eq!(
                pivots, self.eliminated_positions,
                "elimination pivots should sit at the subalgebra monomial positions"
            );
            for (r, &p) in pivots.iter().enumerate() {
                if cq_is_zero(&v[p]) {
                    continue;
                }
                let f = v[p].clone();
                for j in 0..d {
                    let sub = &f * &w[(r, j)];
                    v[j] = &v[j] - &sub;
                }
            }
        }
        debug_assert_eq!(v[0], cq_one());
        Ok((1..d).filter(|i| !self.eliminated_positions.contains(i)).map(|i| v[i].clone()).collect())
    }

    /// Canonical element with the given orbit coordinates: value 1 at
    /// the first support point, zeros on the eliminated positions. Not
    /// always a unit (a zero coordinate at another support point gives a
    /// boundary generator); callers check.
    pub fn element_from_coordinates(&self, coords: &[Cq]) -> JetElement {
        let d = self.ring.dim();
        assert_eq!(coords.len(), self.picard_dim(), "coordinate arity mismatch");
        let mut flat = vec![cq_zero(); d];
        if d == 0 {
            return self.ring.from_flat(&flat);
        }
        flat[0] = cq_one();
        let mut it = coords.iter();
        for (i, slot) in flat.iter_mut().enumerate().skip(1) {
            if !self.eliminated_positions.contains(&i) {
                *slot = it.next().expect("coordinate count matches").clone();
            }
        }
        self.ring.from_flat(&flat)
    }
}

/// Surjective module map drawn for the matrix-valued family: a `k x s`
/// array of jets whose value matrix has full rank `s` at every support
/// point (the Nakayama certificate).
#[derive(Debug, Clone, PartialEq)]
pub struct QsSample {
    pub k: usize,
    pub s: usize,
    /// Row-major `k x s`; column `j` is a generator of the module.
    pub entries: Vec<JetElement>,
}

impl QsSample {
    pub fn entry(&self, i: usize, j: usize) -> &JetElement {
        &self.entries[i * self.s + j]
    }

    /// Nakayama criterion: the `k x s` matrix of values at each support
    /// point has rank `s`.
    pub fn is_surjective(&self) -> bool {
        let ring = self.entries[0].ring();
        for p in 0..ring.support().len() {
            let mat = CqMat::from_rows(
                (0..self.k)
                    .map(|i| (0..self.s).map(|j| self.entry(i, j).value_at(p).clone()).collect())
                    .collect(),
            );
            if mat.rank() < self.s {
                return false;
            }
        }
        true
    }
}

const QS_SAMPLE_RETRIES: usize = 64;

/// Draws a random surjective module map with small Gaussian-integer jet
/// coefficients; deterministic under a fixed generator.
pub fn sample_qs(
    ring: &Arc<QuotientRing>,
    k: usize,
    s: usize,
    rng: &mut impl Rng,
) -> Result<QsSample, QuotientError> {
    if s == 0 || s > k {
        return Err(QuotientError::InvalidShape { k, s });
    }
    for _ in 0..QS_SAMPLE_RETRIES {
        let entries: Vec<JetElement> = (0..k * s)
            .map(|_| {
                let flat: Vec<Cq> = (0..ring.dim())
                    .map(|_| {
                        crate::rational::cq_int(rng.gen_range(-3..=3), rng.gen_range(-3..=3))
                    })
                    .collect();
                ring.from_flat(&flat)
            })
            .collect();
        let sample = QsSample { k, s, entries };
        if ring.dim() == 0 || sample.is_surjective() {
            return Ok(sample);
        }
    }
    Err(QuotientError::SampleRetriesExhausted(QS_SAMPLE_RETRIES))
}

/// Ring-valued determinant by cofactor expansion.
fn det_jets(entries: &[Vec<JetElement>], ring: &Arc<QuotientRing>) -> JetElement {
    let n = entries.len();
    match n {
        0 => ring.one(),
        1 => entries[0][0].clone(),
        _ => {
            let mut acc = ring.zero();
            for j in 0..n {
                let minor: Vec<Vec<JetElement>> = entries[1..]
                    .iter()
                    .map(|row| {
                        row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, e)| e.clone()).collect()
                    })
                    .collect();
                let term = entries[0][j].mul(&det_jets(&minor, ring)).expect("same ring");
                acc = if j % 2 == 0 {
                    acc.add(&term).expect("same ring")
                } else {
                    acc.sub(&term).expect("same ring")
                };
            }
            acc
        }
    }
}

/// Are two module maps related by an invertible change of generators
/// over the subalgebra? Solves the exact linear system `Z1 = F Z2` for
/// `F` with entries in the subalgebra, then looks for an invertible
/// point in the affine solution set.
pub fn qs_equivalent(
    sub: &Subalgebra,
    z1: &QsSample,
    z2: &QsSample,
) -> Result<bool, QuotientError> {
    if z1.k != z2.k || z1.s != z2.s {
        return Err(QuotientError::InvalidShape { k: z1.k, s: z1.s });
    }
    let (k, s) = (z1.k, z1.s);
    let ring = sub.ring();
    let d = ring.dim();
    if d == 0 {
        return Ok(true);
    }
    let t = sub.basis().len();
    // unknown f_{i,p,c}: coefficient of basis element c in F[i][p]
    let unknowns = k * k * t;
    let mut rows = Vec::with_capacity(k * s * d);
    let mut rhs = Vec::with_capacity(k * s * d);
    for i in 0..k {
        for j in 0..s {
            let mut cols: Vec<Vec<Cq>> = vec![Vec::new(); unknowns];
            for p in 0..k {
                for (c, b) in sub.basis().iter().enumerate() {
                    let prod = b.mul(z2.entry(p, j)).expect("same ring").flatten();
                    cols[(i * k + p) * t + c] = prod;
                }
            }
            let target = z1.entry(i, j).flatten();
            for row_idx in 0..d {
                let row: Vec<Cq> = cols
                    .iter()
                    .map(|col| if col.is_empty() { cq_zero() } else { col[row_idx].clone() })
                    .collect();
                rows.push(row);
                rhs.push(target[row_idx].clone());
            }
        }
    }
    let Some((particular, nullspace)) = CqMat::from_rows(rows).solve(&rhs) else {
        return Ok(false);
    };

    let build_f = |x: &[Cq]| -> Vec<Vec<JetElement>> {
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|p| {
                        let mut e = ring.zero();
                        for (c, b) in sub.basis().iter().enumerate() {
                            e = e.add(&b.scale(&x[(i * k + p) * t + c])).expect("same ring");
                        }
                        e
                    })
                    .collect()
            })
            .collect()
    };
    let invertible = |x: &[Cq]| det_jets(&build_f(x), ring).is_unit();

    if invertible(&particular) {
        return Ok(true);
    }
    if nullspace.is_empty() {
        return Ok(false);
    }
    // The determinant is polynomial on the affine solution set; if an
    // invertible solution exists, small deterministic perturbations
    // along the nullspace find one.
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x51C2_EBA5);
    for _ in 0..40 {
        let mut x = particular.clone();
        for v in &nullspace {
            let c = crate::rational::cq_int(rng.gen_range(-3..=3), rng.gen_range(-3..=3));
            for (xi, vi) in x.iter_mut().zip(v) {
                let add = vi * &c;
                *xi = &*xi + &add;
            }
        }
        if invertible(&x) {
            return Ok(true);
        }
    }
    Ok(false)
}
