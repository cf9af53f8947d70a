//! Poisson structures on polynomial rings.
//!
//! A bracket is given by its values `{z_i, z_j}` on generator pairs and
//! extended to all of `k[z]` as a biderivation:
//!
//! `{f, g} = sum_{i<j} (df/dz_i dg/dz_j - df/dz_j dg/dz_i) {z_i, z_j}`.
//!
//! The jacobiator of a biderivation is a derivation in each slot, so the
//! Jacobi identity holds everywhere as soon as it holds on generator triples.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::poly::{Derivation, PolyError, Polynomial, VarTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PoissonError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("bracket of a generator with itself: ({0}, {0})")]
    DiagonalPair(String),
    #[error("bracket pair ({0}, {1}) given twice")]
    DuplicatePair(String, String),
}

/// Outcome of [`PoissonAlgebra::check_jacobi`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JacobiVerdict {
    Pass,
    Fail {
        triple: (usize, usize, usize),
        defect: Polynomial,
    },
}

impl JacobiVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, JacobiVerdict::Pass)
    }
}

/// Polynomial ring with an antisymmetric bracket table on generators.
#[derive(Debug, Clone)]
pub struct PoissonAlgebra {
    vars: Arc<VarTable>,
    /// Row-major `n x n`, antisymmetric, zero diagonal.
    table: Vec<Polynomial>,
    jacobi_verified: bool,
}

impl PartialEq for PoissonAlgebra {
    /// Equality of the underlying bracket; the verification flag is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.table == other.table
    }
}

impl PoissonAlgebra {
    /// Builds the bracket from `(i, j, {z_i, z_j})` entries. The reverse
    /// pair is filled in by antisymmetry; unlisted pairs are zero.
    pub fn new<I>(vars: &Arc<VarTable>, entries: I) -> Result<Self, PoissonError>
    where
        I: IntoIterator<Item = (usize, usize, Polynomial)>,
    {
        let n = vars.len();
        let mut table = vec![Polynomial::zero(vars); n * n];
        let mut seen: BTreeMap<(usize, usize), ()> = BTreeMap::new();
        for (i, j, value) in entries {
            for idx in [i, j] {
                if idx >= n {
                    return Err(PolyError::IndexOutOfRange { index: idx, arity: n }.into());
                }
            }
            if i == j {
                return Err(PoissonError::DiagonalPair(vars.name(i).to_string()));
            }
            if value.vars() != vars {
                return Err(PolyError::VarMismatch {
                    left: vars.describe(),
                    right: value.vars().describe(),
                }
                .into());
            }
            if seen.insert((i.min(j), i.max(j)), ()).is_some() {
                return Err(PoissonError::DuplicatePair(
                    vars.name(i).to_string(),
                    vars.name(j).to_string(),
                ));
            }
            table[j * n + i] = -&value;
            table[i * n + j] = value;
        }
        Ok(PoissonAlgebra {
            vars: Arc::clone(vars),
            table,
            jacobi_verified: false,
        })
    }

    /// The zero bracket on `k[vars]`.
    pub fn zero(vars: &Arc<VarTable>) -> Self {
        Self::new(vars, std::iter::empty()).expect("empty table is valid")
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn jacobi_verified(&self) -> bool {
        self.jacobi_verified
    }

    /// `{z_i, z_j}`.
    pub fn generator_bracket(&self, i: usize, j: usize) -> &Polynomial {
        &self.table[i * self.arity() + j]
    }

    /// Nonzero entries `(i, j, {z_i, z_j})` with `i < j`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Polynomial)> + '_ {
        let n = self.arity();
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .map(move |(i, j)| (i, j, self.generator_bracket(i, j)))
            .filter(|(_, _, p)| !p.is_zero())
    }

    pub fn bracket(&self, f: &Polynomial, g: &Polynomial) -> Result<Polynomial, PoissonError> {
        for p in [f, g] {
            if p.vars() != &self.vars {
                return Err(PolyError::VarMismatch {
                    left: self.vars.describe(),
                    right: p.vars().describe(),
                }
                .into());
            }
        }
        let n = self.arity();
        let df: Vec<Polynomial> = (0..n).map(|i| f.partial(i)).collect::<Result<_, _>>()?;
        let dg: Vec<Polynomial> = (0..n).map(|i| g.partial(i)).collect::<Result<_, _>>()?;
        let mut out = Polynomial::zero(&self.vars);
        for i in 0..n {
            for j in i + 1..n {
                let b = self.generator_bracket(i, j);
                if b.is_zero() {
                    continue;
                }
                let coeff = &(&df[i] * &dg[j]) - &(&df[j] * &dg[i]);
                if !coeff.is_zero() {
                    out += &(&coeff * b);
                }
            }
        }
        Ok(out)
    }

    /// The hamiltonian derivation `{f, -}`.
    pub fn hamiltonian(&self, f: &Polynomial) -> Result<Derivation, PoissonError> {
        let images = (0..self.arity())
            .map(|j| self.bracket(f, &Polynomial::var(&self.vars, j).expect("in range")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Derivation::new(&self.vars, images)?)
    }

    /// `{f,{g,h}} + {g,{h,f}} + {h,{f,g}}`.
    pub fn jacobiator(
        &self,
        f: &Polynomial,
        g: &Polynomial,
        h: &Polynomial,
    ) -> Result<Polynomial, PoissonError> {
        let a = self.bracket(f, &self.bracket(g, h)?)?;
        let b = self.bracket(g, &self.bracket(h, f)?)?;
        let c = self.bracket(h, &self.bracket(f, g)?)?;
        Ok(&(&a + &b) + &c)
    }

    /// Checks Jacobi on every generator triple `i <= j <= k` and records the
    /// result. Fails with the first offending triple.
    pub fn check_jacobi(&mut self) -> JacobiVerdict {
        let n = self.arity();
        let gens: Vec<Polynomial> = (0..n)
            .map(|i| Polynomial::var(&self.vars, i).expect("in range"))
            .collect();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let defect = self
                        .jacobiator(&gens[i], &gens[j], &gens[k])
                        .expect("generators share the table");
                    if !defect.is_zero() {
                        self.jacobi_verified = false;
                        return JacobiVerdict::Fail {
                            triple: (i, j, k),
                            defect,
                        };
                    }
                }
            }
        }
        self.jacobi_verified = true;
        JacobiVerdict::Pass
    }

    /// The bracket restricted to the first `n` generators, which must be
    /// closed under it (as for the base ring of an Ore-type extension).
    pub fn restrict(&self, vars: &Arc<VarTable>) -> Result<PoissonAlgebra, PoissonError> {
        let n = vars.len();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let b = self.generator_bracket(i, j);
                let parts = b.split_tail(vars)?;
                let mut value = Polynomial::zero(vars);
                for (tail, coeff) in parts {
                    if tail.iter().any(|&e| e > 0) {
                        return Err(PolyError::VarMismatch {
                            left: vars.describe(),
                            right: self.vars.describe(),
                        }
                        .into());
                    }
                    value = coeff;
                }
                if !value.is_zero() {
                    entries.push((i, j, value));
                }
            }
        }
        let mut out = PoissonAlgebra::new(vars, entries)?;
        out.jacobi_verified = self.jacobi_verified;
        Ok(out)
    }

    /// Test hook: forget or assert the Jacobi verification.
    #[doc(hidden)]
    pub fn assume_verified(mut self, verified: bool) -> Self {
        self.jacobi_verified = verified;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn so3() -> PoissonAlgebra {
        let v = VarTable::new(["z1", "z2", "z3"]).unwrap();
        let z = |i| Polynomial::var(&v, i).unwrap();
        PoissonAlgebra::new(&v, [(0, 1, z(2)), (1, 2, z(0)), (2, 0, z(1))]).unwrap()
    }

    fn nonjacobi() -> PoissonAlgebra {
        let v = VarTable::new(["z1", "z2", "z3"]).unwrap();
        let z = |i| Polynomial::var(&v, i).unwrap();
        PoissonAlgebra::new(&v, [(0, 1, z(0)), (1, 2, z(1)), (2, 0, z(2))]).unwrap()
    }

    fn p(text: &str, a: &PoissonAlgebra) -> Polynomial {
        Polynomial::parse(text, a.vars()).unwrap()
    }

    #[test]
    fn table_lookup_and_antisymmetry() {
        let a = so3();
        assert_eq!(a.bracket(&p("z1", &a), &p("z2", &a)).unwrap(), p("z3", &a));
        assert_eq!(a.bracket(&p("z1", &a), &p("z3", &a)).unwrap(), p("-z2", &a));
        let f = p("z1^2*z3 - z2", &a);
        assert!(a.bracket(&f, &f).unwrap().is_zero());
    }

    #[test]
    fn biderivation_expansion() {
        // {z1^2, z2} = 2 z1 {z1, z2}
        let a = so3();
        assert_eq!(a.bracket(&p("z1^2", &a), &p("z2", &a)).unwrap(), p("2*z1*z3", &a));
    }

    #[test]
    fn constants_are_central() {
        let a = so3();
        assert!(a
            .bracket(&p("5/3", &a), &p("z1*z2 + z3^2", &a))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn jacobiator_values() {
        let a = so3();
        assert!(a
            .jacobiator(&p("z1", &a), &p("z2", &a), &p("z3", &a))
            .unwrap()
            .is_zero());
        let b = nonjacobi();
        assert_eq!(
            b.jacobiator(&p("z1", &b), &p("z2", &b), &p("z3", &b)).unwrap(),
            p("z1 + z2 + z3", &b)
        );
        let zero = PoissonAlgebra::zero(a.vars());
        assert!(zero
            .jacobiator(&p("z1^2", &a), &p("z2*z3", &a), &p("z3", &a))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn check_jacobi_sets_flag() {
        let mut a = so3();
        assert!(!a.jacobi_verified());
        assert_eq!(a.check_jacobi(), JacobiVerdict::Pass);
        assert!(a.jacobi_verified());

        let mut b = nonjacobi();
        match b.check_jacobi() {
            JacobiVerdict::Fail { triple, defect } => {
                assert_eq!(triple, (0, 1, 2));
                assert_eq!(defect, p("z1 + z2 + z3", &b));
            }
            JacobiVerdict::Pass => panic!("expected failure"),
        }
        assert!(!b.jacobi_verified());

        let mut z = PoissonAlgebra::zero(a.vars());
        assert!(z.check_jacobi().passed());
    }

    #[test]
    fn rejects_bad_tables() {
        let v = VarTable::new(["z1", "z2"]).unwrap();
        let one = Polynomial::one(&v);
        assert!(matches!(
            PoissonAlgebra::new(&v, [(0, 0, one.clone())]),
            Err(PoissonError::DiagonalPair(_))
        ));
        assert!(matches!(
            PoissonAlgebra::new(&v, [(0, 1, one.clone()), (1, 0, one)]),
            Err(PoissonError::DuplicatePair(..))
        ));
    }

    #[test]
    fn hamiltonian_is_bracket() {
        let a = so3();
        let h = a.hamiltonian(&p("z1", &a)).unwrap();
        let f = p("z2^2*z3", &a);
        assert_eq!(h.apply(&f).unwrap(), a.bracket(&p("z1", &a), &f).unwrap());
    }
}
