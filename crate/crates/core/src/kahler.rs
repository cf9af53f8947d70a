//! Kähler differentials of a polynomial ring: the free module on `d(z_j)`,
//! with the Lie bracket and action induced by a Poisson bracket.

use std::sync::Arc;

use crate::envelope::{EnvAlgebra, EnvElement, EnvError, EnvKey};
use crate::poisson::{PoissonAlgebra, PoissonError};
use crate::poly::{PolyError, Polynomial, VarTable};

/// `sum_j f_j d(z_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KahlerElement {
    components: Vec<Polynomial>,
}

impl KahlerElement {
    pub fn zero(vars: &Arc<VarTable>) -> Self {
        KahlerElement {
            components: vec![Polynomial::zero(vars); vars.len()],
        }
    }

    pub fn new(vars: &Arc<VarTable>, components: Vec<Polynomial>) -> Result<Self, PolyError> {
        if components.len() != vars.len() {
            return Err(PolyError::ImageCount {
                expected: vars.len(),
                got: components.len(),
            });
        }
        for c in &components {
            if c.vars() != vars {
                return Err(PolyError::VarMismatch {
                    left: vars.describe(),
                    right: c.vars().describe(),
                });
            }
        }
        Ok(KahlerElement { components })
    }

    /// `a d(z_j)`.
    pub fn basis(a: Polynomial, j: usize) -> Result<Self, PolyError> {
        let vars = a.vars().clone();
        if j >= vars.len() {
            return Err(PolyError::IndexOutOfRange {
                index: j,
                arity: vars.len(),
            });
        }
        let mut out = KahlerElement::zero(&vars);
        out.components[j] = a;
        Ok(out)
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }

    /// `f * self`.
    pub fn scale_by(&self, f: &Polynomial) -> KahlerElement {
        KahlerElement {
            components: self.components.iter().map(|c| f * c).collect(),
        }
    }

    pub fn add(&self, other: &KahlerElement) -> KahlerElement {
        KahlerElement {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &KahlerElement) -> KahlerElement {
        KahlerElement {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

fn same_arity(p: &PoissonAlgebra, u: &KahlerElement) -> Result<(), PoissonError> {
    if let Some(c) = u.components.first() {
        if c.vars() != p.vars() {
            return Err(PolyError::VarMismatch {
                left: p.vars().describe(),
                right: c.vars().describe(),
            }
            .into());
        }
    } else if p.arity() != 0 {
        return Err(PolyError::ImageCount {
            expected: p.arity(),
            got: 0,
        }
        .into());
    }
    Ok(())
}

/// `df = sum_j (df/dz_j) d(z_j)`.
pub fn kahler_d(f: &Polynomial) -> KahlerElement {
    let n = f.vars().len();
    KahlerElement {
        components: (0..n).map(|j| f.partial(j).expect("in range")).collect(),
    }
}

/// `[a dr, b ds] = ab d{r,s} + a{r,b} ds - b{s,a} dr`, extended bilinearly.
pub fn kahler_bracket(
    p: &PoissonAlgebra,
    u: &KahlerElement,
    v: &KahlerElement,
) -> Result<KahlerElement, PoissonError> {
    same_arity(p, u)?;
    same_arity(p, v)?;
    let vars = p.vars();
    let gens: Vec<Polynomial> = (0..vars.len())
        .map(|j| Polynomial::var(vars, j).expect("in range"))
        .collect();
    let mut out = KahlerElement::zero(vars);
    for (r, a) in u.components.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (s, b) in v.components.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let rs = p.generator_bracket(r, s);
            out = out.add(&kahler_d(rs).scale_by(&(a * b)));
            out.components[s] += &(a * &p.bracket(&gens[r], b)?);
            out.components[r] -= &(b * &p.bracket(&gens[s], a)?);
        }
    }
    Ok(out)
}

/// `a dr . b = a {r, b}`.
pub fn kahler_action(
    p: &PoissonAlgebra,
    u: &KahlerElement,
    b: &Polynomial,
) -> Result<Polynomial, PoissonError> {
    same_arity(p, u)?;
    let vars = p.vars();
    let mut out = Polynomial::zero(vars);
    for (r, a) in u.components.iter().enumerate() {
        if !a.is_zero() {
            out += &(a * &p.bracket(&Polynomial::var(vars, r)?, b)?);
        }
    }
    Ok(out)
}

/// `sum_j i(f_j) d(z_j)` inside the enveloping algebra.
pub fn embed_kahler(e: &EnvAlgebra, u: &KahlerElement) -> Result<EnvElement, EnvError> {
    if u.components.len() != e.dz_count() || u.components.first().is_some_and(|c| c.vars() != e.coeff_vars())
    {
        return Err(EnvError::AlgebraMismatch);
    }
    let mut out = e.zero();
    for (j, f) in u.components.iter().enumerate() {
        let mut key = EnvKey::unit(e.dz_count());
        key.beta[j] = 1;
        out.add_term(key, f.clone());
    }
    Ok(out)
}
