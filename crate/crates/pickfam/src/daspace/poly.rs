//! Multivariate polynomials with exact Gaussian-rational coefficients.

use crate::rational::{cq_is_zero, cq_to_c64, cq_zero, conj, Cq};
use num::complex::Complex64;
use num::Zero;
use std::collections::BTreeMap;

/// Polynomial in `vars` variables; term map from exponent multi-index to
/// coefficient. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, Cq>,
}

impl MultiPoly {
    pub fn zero(vars: usize) -> Self {
        MultiPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, c: Cq) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars], c);
        p
    }

    pub fn one(vars: usize) -> Self {
        Self::constant(vars, crate::rational::cq_one())
    }

    pub fn monomial(vars: usize, exps: &[u32], c: Cq) -> Self {
        assert_eq!(exps.len(), vars, "exponent arity mismatch");
        let mut p = Self::zero(vars);
        p.add_term(exps.to_vec(), c);
        p
    }

    /// Univariate polynomial from the coefficient list `c_0 + c_1 z + ...`.
    pub fn from_coeffs(coeffs: &[Cq]) -> Self {
        let mut p = Self::zero(1);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(vec![i as u32], c.clone());
        }
        p
    }

    /// Univariate coefficient vector up to the degree of the polynomial.
    pub fn coeffs(&self) -> Vec<Cq> {
        assert_eq!(self.vars, 1, "coeffs() is univariate-only");
        let deg = self.terms.keys().map(|e| e[0]).max().unwrap_or(0) as usize;
        let mut out = vec![cq_zero(); deg + 1];
        for (e, c) in &self.terms {
            out[e[0] as usize] = c.clone();
        }
        out
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Cq)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> Cq {
        self.terms.get(exps).cloned().unwrap_or_else(cq_zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Cq) {
        assert_eq!(exps.len(), self.vars, "exponent arity mismatch");
        if cq_is_zero(&c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if cq_is_zero(&sum) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, other.vars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, other.vars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Cq) -> MultiPoly {
        if cq_is_zero(c) {
            return MultiPoly::zero(self.vars);
        }
        let mut out = MultiPoly::zero(self.vars);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a * c);
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, other.vars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    /// Exact evaluation at a Gaussian-rational point.
    pub fn eval_cq(&self, point: &[Cq]) -> Cq {
        assert_eq!(point.len(), self.vars, "point arity mismatch");
        let mut acc = cq_zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    term = &term * x;
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Floating-point evaluation.
    pub fn eval_c64(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.vars, "point arity mismatch");
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut term = cq_to_c64(c);
            for (x, &k) in point.iter().zip(e) {
                term *= x.powu(k);
            }
            acc += term;
        }
        acc
    }

    /// Coefficient-wise conjugate `sum conj(c_a) z^a`.
    pub fn conj_coeffs(&self) -> MultiPoly {
        let mut out = MultiPoly::zero(self.vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), conj(c));
        }
        out
    }

    /// Drops all terms of total degree above `n`.
    pub fn truncate_degree(&self, n: u32) -> MultiPoly {
        let mut out = MultiPoly::zero(self.vars);
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() <= n {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }
}

/// Real rational polynomial in one formal variable; used for the symbolic
/// sphere-identity check where the variable stands for `|z|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatPoly {
    pub coeffs: Vec<crate::rational::Rat>,
}

impl RatPoly {
    pub fn new(coeffs: Vec<crate::rational::Rat>) -> Self {
        let mut p = RatPoly { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![crate::rational::Rat::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        RatPoly::new(out)
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return RatPoly::new(vec![]);
        }
        let mut out = vec![crate::rational::Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}
