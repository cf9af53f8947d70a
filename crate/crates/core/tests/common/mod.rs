#![allow(dead_code)]

use std::sync::Arc;

use poisore::envelope::EnvKey;
use poisore::poly::{int, rat};
use poisore::{DEDataPoisson, EnvAlgebra, EnvElement, PoissonAlgebra, Polynomial, Rational, VarTable};
use proptest::prelude::*;

pub fn vars(names: &[&str]) -> Arc<VarTable> {
    VarTable::new(names.iter().copied()).unwrap()
}

pub fn poly(s: &str, v: &Arc<VarTable>) -> Polynomial {
    Polynomial::parse(s, v).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn verified(names: &[&str], entries: &[(usize, usize, &str)]) -> PoissonAlgebra {
    let v = vars(names);
    let mut p = PoissonAlgebra::new(&v, entries.iter().map(|&(i, j, s)| (i, j, poly(s, &v)))).unwrap();
    assert!(p.check_jacobi().passed());
    p
}

pub fn zero_ring(names: &[&str]) -> PoissonAlgebra {
    verified(names, &[])
}

pub fn symplectic() -> PoissonAlgebra {
    verified(&["z1", "z2"], &[(0, 1, "1")])
}

pub fn so3() -> PoissonAlgebra {
    verified(&["z1", "z2", "z3"], &[(0, 1, "z3"), (1, 2, "z1"), (2, 0, "z2")])
}

/// `{z1, z2} = z1 z2` on two variables.
pub fn log_canonical() -> PoissonAlgebra {
    verified(&["z1", "z2"], &[(0, 1, "z1*z2")])
}

pub fn quantum_plane() -> EnvAlgebra {
    let r = zero_ring(&[]);
    let mut d = DEDataPoisson::zero(r.vars());
    d.q12 = int(1);
    EnvAlgebra::double(&r, &d).unwrap()
}

pub fn diag_alpha_data(r: &PoissonAlgebra) -> DEDataPoisson {
    let v = r.vars();
    let mut d = DEDataPoisson::zero(v);
    d.q11 = int(1);
    d.q12 = int(1);
    d.alpha[0][0].set_image(0, poly("z", v)).unwrap();
    d.alpha[1][1].set_image(0, poly("z", v)).unwrap();
    d
}

pub fn offdiag_alpha_data(r: &PoissonAlgebra) -> DEDataPoisson {
    let v = r.vars();
    let mut d = DEDataPoisson::zero(v);
    d.alpha[0][1].set_image(0, poly("1", v)).unwrap();
    d
}

/// `{f, g}` by recursion on monomials: peel one variable off `f`, then
/// off `g`, and read generator brackets from the table.
pub fn leibniz_bracket(p: &PoissonAlgebra, f: &Polynomial, g: &Polynomial) -> Polynomial {
    let v = p.vars();
    let mut out = Polynomial::zero(v);
    for (mf, cf) in f.terms() {
        for (mg, cg) in g.terms() {
            let b = monomial_bracket(p, mf.exponents(), mg.exponents());
            out += &b.scale(&(cf * cg));
        }
    }
    out
}

fn monomial_poly(v: &Arc<VarTable>, e: &[u32]) -> Polynomial {
    Polynomial::from_terms(v, [(e.to_vec(), int(1))])
}

fn monomial_bracket(p: &PoissonAlgebra, a: &[u32], b: &[u32]) -> Polynomial {
    let v = p.vars();
    if let Some(i) = a.iter().position(|&e| e > 0) {
        if a.iter().sum::<u32>() > 1 {
            // {z_i m, g} = z_i {m, g} + m {z_i, g}
            let mut rest = a.to_vec();
            rest[i] -= 1;
            let zi = Polynomial::var(v, i).unwrap();
            let mut single = vec![0; a.len()];
            single[i] = 1;
            return &(&zi * &monomial_bracket(p, &rest, b))
                + &(&monomial_poly(v, &rest) * &monomial_bracket(p, &single, b));
        }
        if let Some(j) = b.iter().position(|&e| e > 0) {
            if b.iter().sum::<u32>() > 1 {
                let mut rest = b.to_vec();
                rest[j] -= 1;
                let zj = Polynomial::var(v, j).unwrap();
                let mut single = vec![0; b.len()];
                single[j] = 1;
                return &(&zj * &monomial_bracket(p, a, &rest))
                    + &(&monomial_poly(v, &rest) * &monomial_bracket(p, a, &single));
            }
            return p.generator_bracket(i, j).clone();
        }
    }
    Polynomial::zero(v)
}

/// `D(f)` by expanding each monomial as a product of variables.
pub fn leibniz_apply(images: &[Polynomial], f: &Polynomial) -> Polynomial {
    let v = f.vars();
    let mut out = Polynomial::zero(v);
    for (m, c) in f.terms() {
        let e = m.exponents();
        for (i, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let mut rest = e.to_vec();
            rest[i] -= 1;
            let term = &monomial_poly(v, &rest) * &images[i];
            out += &term.scale(&(c * &int(i64::from(k))));
        }
    }
    out
}

/// The symplectic enveloping algebra acting on `k[z1, z2]` by
/// `z_j -> multiplication`, `d(z1) -> d/dz2`, `d(z2) -> -d/dz1`.
pub fn weyl_act(u: &EnvElement, f: &Polynomial) -> Polynomial {
    let mut out = Polynomial::zero(f.vars());
    for (key, coeff) in u.terms() {
        let mut g = f.clone();
        for _ in 0..key.beta[1] {
            g = -g.partial(0).unwrap();
        }
        for _ in 0..key.beta[0] {
            g = g.partial(1).unwrap();
        }
        out += &(coeff * &g);
    }
    out
}

pub fn key(beta: Vec<u32>) -> EnvKey {
    EnvKey {
        beta,
        m: 0,
        n: 0,
        p: 0,
        q: 0,
    }
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

/// Polynomials over `v` with up to `terms` terms of total degree at most
/// `degree`.
pub fn polynomial(v: Arc<VarTable>, degree: u32, terms: usize) -> impl Strategy<Value = Polynomial> {
    let n = v.len();
    let term = (proptest::collection::vec(0..=degree, n), small_rational());
    proptest::collection::vec(term, 0..=terms).prop_map(move |ts| {
        let ts = ts.into_iter().map(|(mut e, c)| {
            while e.iter().sum::<u32>() > degree {
                let i = e.iter().position(|&x| x > 0).unwrap();
                e[i] -= 1;
            }
            (e, c)
        });
        Polynomial::from_terms(&v, ts)
    })
}
