//! Numerical semigroups and their conductor data.
//!
//! A semigroup `<a_1,...,a_r>` with `gcd = 1` describes the monomial cusp
//! algebra spanned by `z^n` for `n` in the semigroup; the conductor
//! exponent `m` is the least degree past which every monomial belongs,
//! so the conductor ideal of the algebra is `(z^m)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemigroupError {
    #[error("generator set must be nonempty")]
    Empty,
    #[error("generators must be positive")]
    NonPositive,
    #[error("gcd of generators is {0}, must be 1 for a finite conductor")]
    BadGcd(u64),
}

/// Numerical semigroup given by a generator set with gcd 1.
///
/// Stored sorted, deduplicated, and with redundant generators (those
/// representable by the others) removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NumericalSemigroup {
    generators: Vec<u64>,
}

impl NumericalSemigroup {
    pub fn new(generators: &[u64]) -> Result<Self, SemigroupError> {
        if generators.is_empty() {
            return Err(SemigroupError::Empty);
        }
        if generators.iter().any(|&g| g == 0) {
            return Err(SemigroupError::NonPositive);
        }
        let mut gens: Vec<u64> = generators.to_vec();
        gens.sort_unstable();
        gens.dedup();
        let g = gens.iter().copied().fold(0u64, gcd);
        if g != 1 {
            return Err(SemigroupError::BadGcd(g));
        }
        // drop any generator representable by the others
        let mut kept: Vec<u64> = Vec::new();
        for i in 0..gens.len() {
            let others: Vec<u64> =
                gens.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &g)| g).collect();
            if others.is_empty() || !representable(gens[i], &others) {
                kept.push(gens[i]);
            }
        }
        Ok(NumericalSemigroup { generators: kept })
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// Membership: is `n` a nonnegative integer combination of the
    /// generators? Dynamic programming up to `n`.
    pub fn contains(&self, n: u64) -> bool {
        representable(n, &self.generators)
    }

    /// Least `m` such that every `n >= m` lies in the semigroup.
    ///
    /// Scans the membership table until a run of `min_generator`
    /// consecutive members appears; from the start of that run on,
    /// adding the smallest generator reaches everything.
    pub fn conductor_exponent(&self) -> u64 {
        let a = self.generators[0];
        if a == 1 {
            return 0;
        }
        let mut members: Vec<bool> = Vec::new();
        let mut run = 0u64;
        let mut n = 0u64;
        loop {
            let is_in = n == 0
                || self.generators.iter().any(|&g| g <= n && members[(n - g) as usize]);
            members.push(is_in);
            if is_in {
                run += 1;
                if run == a {
                    return n + 1 - a;
                }
            } else {
                run = 0;
            }
            n += 1;
        }
    }

    /// Exponents `n` in the semigroup below the conductor; the monomials
    /// `z^n` form a vector-space basis of the subalgebra mod conductor.
    pub fn subalgebra_basis_mod_conductor(&self) -> Vec<u64> {
        (0..self.conductor_exponent()).filter(|&n| self.contains(n)).collect()
    }

    /// Non-members below the conductor exponent.
    pub fn gaps(&self) -> Vec<u64> {
        (0..self.conductor_exponent()).filter(|&n| !self.contains(n)).collect()
    }
}

impl<'de> Deserialize<'de> for NumericalSemigroup {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            generators: Vec<u64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        NumericalSemigroup::new(&raw.generators).map_err(serde::de::Error::custom)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn representable(n: u64, gens: &[u64]) -> bool {
    let n = n as usize;
    let mut table = vec![false; n + 1];
    table[0] = true;
    for i in 1..=n {
        table[i] = gens.iter().any(|&g| (g as usize) <= i && table[i - g as usize]);
    }
    table[n]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sg(gens: &[u64]) -> NumericalSemigroup {
        NumericalSemigroup::new(gens).unwrap()
    }

    #[test]
    fn membership() {
        assert!(sg(&[2, 3]).contains(0));
        // exhaustive: 2a + 5b <= 3 reaches only {0, 2}
        assert!(!sg(&[2, 5]).contains(3));
        assert!(sg(&[2, 5]).contains(7)); // 7 = 2 + 5
    }

    #[test]
    fn conductor_examples() {
        assert_eq!(sg(&[2, 3]).conductor_exponent(), 2);
        assert_eq!(sg(&[2, 5]).conductor_exponent(), 4);
        assert_eq!(sg(&[1]).conductor_exponent(), 0);
        // by exhaustion: 3,4,5 present and 1,2 absent
        assert_eq!(sg(&[3, 4, 5]).conductor_exponent(), 3);
    }

    #[test]
    fn basis_mod_conductor() {
        assert_eq!(sg(&[2, 5]).subalgebra_basis_mod_conductor(), vec![0, 2]);
        assert_eq!(sg(&[2, 3]).subalgebra_basis_mod_conductor(), vec![0]);
        assert_eq!(sg(&[3, 4, 5]).subalgebra_basis_mod_conductor(), vec![0]);
        assert_eq!(sg(&[1]).subalgebra_basis_mod_conductor(), Vec::<u64>::new());
    }

    #[test]
    fn conductor_boundary() {
        for gens in [vec![2u64, 3], vec![2, 5], vec![3, 4, 5], vec![4, 7, 9], vec![6, 10, 15]] {
            let s = sg(&gens);
            let m = s.conductor_exponent();
            for n in m..m + 2 * gens.iter().max().unwrap() {
                assert!(s.contains(n), "{gens:?} should contain {n} >= {m}");
            }
            if m > 0 {
                assert!(!s.contains(m - 1), "{gens:?} conductor too large");
            }
        }
    }

    #[test]
    fn two_generator_frobenius_formula() {
        // conductor of <a,b> is (a-1)(b-1) for coprime a, b
        for a in 2u64..=12 {
            for b in (a + 1)..=30 {
                if gcd(a, b) != 1 {
                    continue;
                }
                assert_eq!(sg(&[a, b]).conductor_exponent(), (a - 1) * (b - 1), "<{a},{b}>");
            }
        }
    }

    #[test]
    fn basis_contains_zero_and_no_gaps() {
        for gens in [vec![2u64, 3], vec![2, 5], vec![3, 5], vec![3, 4, 5], vec![5, 7, 9, 11]] {
            let s = sg(&gens);
            let basis = s.subalgebra_basis_mod_conductor();
            let gaps = s.gaps();
            if s.conductor_exponent() > 0 {
                assert_eq!(basis[0], 0);
            }
            assert!(basis.iter().all(|b| !gaps.contains(b)));
            assert_eq!(basis.len() + gaps.len(), s.conductor_exponent() as usize);
        }
    }

    #[test]
    fn redundant_generators_removed() {
        assert_eq!(sg(&[2, 4, 5]).generators(), &[2, 5]);
        assert_eq!(sg(&[2, 3, 7]).generators(), &[2, 3]);
    }

    #[test]
    fn invariants_rejected() {
        assert_eq!(NumericalSemigroup::new(&[]), Err(SemigroupError::Empty));
        assert_eq!(NumericalSemigroup::new(&[0, 3]), Err(SemigroupError::NonPositive));
        assert_eq!(NumericalSemigroup::new(&[4, 6]), Err(SemigroupError::BadGcd(2)));
    }

    #[test]
    fn json_shape() {
        let s = sg(&[2, 5]);
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"generators":[2,5]}"#);
        let back: NumericalSemigroup = serde_json::from_str(r#"{"generators":[2,5]}"#).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<NumericalSemigroup>(r#"{"generators":[4,6]}"#).is_err());
    }
}
