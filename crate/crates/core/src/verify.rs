//! Checks run against an enveloping algebra: readout of the straightening
//! data of each extension level, comparison with the closed-form data,
//! and sampled identity checks.

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::envelope::{EnvAlgebra, EnvElement, EnvError, EnvKey, EnvLayer, GDegree, Letter};
use crate::extension::{DEDataPoisson, PoissonOreData};
use crate::kahler::{embed_kahler, KahlerElement};
use crate::poly::{int, rat, Polynomial, Rational, VarTable};

pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_DEGREE: u32 = 3;

#[derive(Debug, Clone, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("readout failed: {0}")]
    Extraction(String),
    #[error("{0}")]
    Layer(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictReport {
    pub name: String,
    pub status: CheckStatus,
    pub witness: Option<String>,
    pub elapsed: Duration,
}

impl VerdictReport {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

fn timed(
    name: &str,
    body: impl FnOnce() -> Result<(CheckStatus, Option<String>), VerifyError>,
) -> Result<VerdictReport, VerifyError> {
    let start = Instant::now();
    let (status, witness) = body()?;
    Ok(VerdictReport {
        name: name.to_string(),
        status,
        witness,
        elapsed: start.elapsed(),
    })
}

fn verdict(failure: Option<String>) -> (CheckStatus, Option<String>) {
    match failure {
        None => (CheckStatus::Pass, None),
        Some(w) => (CheckStatus::Fail, Some(w)),
    }
}

/// A generator of the enveloping algebra as a coefficient module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Z(usize),
    Dz(usize),
    X(usize),
    Y(usize),
}

impl Generator {
    pub fn element(self, e: &EnvAlgebra) -> EnvElement {
        match self {
            Generator::Z(j) => e.z(j),
            Generator::Dz(j) => e.dz(j),
            Generator::X(k) => e.x(k),
            Generator::Y(k) => e.y(k),
        }
    }

    pub fn label(self, e: &EnvAlgebra) -> String {
        match self {
            Generator::Z(j) => e.coeff_vars().name(j).to_string(),
            Generator::Dz(j) => e.letter_name(Letter::Dz(j)),
            Generator::X(k) => e.letter_name(Letter::X(k)),
            Generator::Y(k) => e.letter_name(Letter::Y(k)),
        }
    }

    pub fn degree(self, e: &EnvAlgebra) -> GDegree {
        let mut g = GDegree::zero(e.dz_count());
        match self {
            Generator::Z(_) => {}
            Generator::Dz(j) => g.g1[j] = 1,
            Generator::X(0) => g.g2.0 = 1,
            Generator::X(_) => g.g2.1 = 1,
            Generator::Y(0) => g.g3.0 = 1,
            Generator::Y(_) => g.g3.1 = 1,
        }
        g
    }
}

/// `z_j` and `d(z_j)` for every coefficient generator.
pub fn zdz_generators(e: &EnvAlgebra) -> Vec<Generator> {
    let n = e.dz_count();
    (0..n)
        .map(Generator::Z)
        .chain((0..n).map(Generator::Dz))
        .collect()
}

/// Every generator, `x`'s and `y`'s included.
pub fn all_generators(e: &EnvAlgebra) -> Vec<Generator> {
    let mut out = zdz_generators(e);
    out.extend((0..e.x_count()).map(Generator::X));
    out.extend((0..e.x_count()).map(Generator::Y));
    out
}

/// Which extension variables are being read off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// `x` over the subalgebra generated by `z` and `d(z)`.
    Inner,
    /// `y` over the subalgebra generated by `z`, `d(z)` and `x`.
    Outer,
}

/// Straightening data `x_k u = sum_l sigma_kl(u) x_l + delta_k(u)` and
/// `x2 x1 = p11 x1^2 + p12 x1 x2 + tau1 x1 + tau2 x2 + tau0` of one level.
#[derive(Debug, Clone, PartialEq)]
pub struct DEDataAssoc {
    pub p11: Rational,
    pub p12: Rational,
    /// Per generator of the coefficient subalgebra, labelled.
    pub sigma: Vec<(String, [[EnvElement; 2]; 2])>,
    pub delta: Vec<(String, [EnvElement; 2])>,
    pub tau: [EnvElement; 3],
}

fn level_letter(level: Level, k: usize) -> Letter {
    match level {
        Level::Inner => Letter::X(k),
        Level::Outer => Letter::Y(k),
    }
}

fn level_generators(e: &EnvAlgebra, level: Level) -> Vec<Generator> {
    let mut gens = zdz_generators(e);
    if level == Level::Outer {
        gens.extend((0..e.x_count()).map(Generator::X));
    }
    gens
}

/// Exponents of the level's variables in `key`, and `key` with them cleared.
fn split_level(key: &EnvKey, level: Level) -> Result<((u32, u32), EnvKey), VerifyError> {
    let mut rest = key.clone();
    let exps = match level {
        Level::Inner => {
            if key.p > 0 || key.q > 0 {
                return Err(VerifyError::Extraction(
                    "outer variable in an inner-level product".into(),
                ));
            }
            rest.m = 0;
            rest.n = 0;
            (key.m, key.n)
        }
        Level::Outer => {
            rest.p = 0;
            rest.q = 0;
            (key.p, key.q)
        }
    };
    Ok((exps, rest))
}

/// Splits `u` as `c1 v1 + c2 v2 + c0` where `v` are the level's variables.
fn readout(e: &EnvAlgebra, u: &EnvElement, level: Level) -> Result<[EnvElement; 3], VerifyError> {
    let mut out = [e.zero(), e.zero(), e.zero()];
    for (key, c) in u.terms() {
        let (exps, rest) = split_level(key, level)?;
        let slot = match exps {
            (1, 0) => 0,
            (0, 1) => 1,
            (0, 0) => 2,
            _ => {
                return Err(VerifyError::Extraction(format!(
                    "term {} has degree 2 or more in the level variables",
                    e.render(&EnvElement::monomial(key.clone(), c.clone()))
                )))
            }
        };
        out[slot].add_term(rest, c.clone());
    }
    Ok(out)
}

fn scalar_of(e: &EnvAlgebra, u: &EnvElement, what: &str) -> Result<Rational, VerifyError> {
    if u.is_zero() {
        return Ok(Rational::zero());
    }
    let unit = e.unit_key();
    match (u.num_terms(), u.coefficient(&unit).as_constant()) {
        (1, Some(c)) if !c.is_zero() => Ok(c),
        _ => Err(VerifyError::Extraction(format!(
            "{what} coefficient {} is not a scalar",
            e.render(u)
        ))),
    }
}

/// Reads the straightening data of `level` off the multiplication.
pub fn extract_dedata(e: &EnvAlgebra, level: Level) -> Result<DEDataAssoc, VerifyError> {
    if e.x_count() != 2 {
        return Err(VerifyError::Layer(
            "straightening data needs a double extension".into(),
        ));
    }
    let mut sigma = Vec::new();
    let mut delta = Vec::new();
    for g in level_generators(e, level) {
        let u = g.element(e);
        let mut rows = Vec::with_capacity(2);
        for k in 0..2 {
            let prod = e.nf_mul(&e.letter(level_letter(level, k)), &u)?;
            rows.push(readout(e, &prod, level)?);
        }
        let [r0, r1]: [[EnvElement; 3]; 2] = rows.try_into().expect("two rows");
        let [s00, s01, d0] = r0;
        let [s10, s11, d1] = r1;
        sigma.push((g.label(e), [[s00, s01], [s10, s11]]));
        delta.push((g.label(e), [d0, d1]));
    }

    let prod = e.nf_mul(
        &e.letter(level_letter(level, 1)),
        &e.letter(level_letter(level, 0)),
    )?;
    let mut parts: [EnvElement; 5] = std::array::from_fn(|_| e.zero());
    for (key, c) in prod.terms() {
        let (exps, rest) = split_level(key, level)?;
        let slot = match exps {
            (2, 0) => 0,
            (1, 1) => 1,
            (1, 0) => 2,
            (0, 1) => 3,
            (0, 0) => 4,
            (0, 2) => {
                return Err(VerifyError::Extraction(
                    "unexpected square of the second variable".into(),
                ))
            }
            _ => {
                return Err(VerifyError::Extraction(
                    "cubic term in the quadratic relation".into(),
                ))
            }
        };
        parts[slot].add_term(rest, c.clone());
    }
    let [pa, pb, t1, t2, t0] = parts;
    Ok(DEDataAssoc {
        p11: scalar_of(e, &pa, "first-square")?,
        p12: scalar_of(e, &pb, "mixed")?,
        sigma,
        delta,
        tau: [t1, t2, t0],
    })
}

fn double_data(e: &EnvAlgebra) -> Result<&DEDataPoisson, VerifyError> {
    match e.layer() {
        EnvLayer::DoubleOre(d) => Ok(d),
        _ => Err(VerifyError::Layer("needs a double extension instance".into())),
    }
}

fn coeff_gen(e: &EnvAlgebra, j: usize) -> Polynomial {
    Polynomial::var(e.coeff_vars(), j).expect("generator index")
}

fn diag(u: &EnvElement, zero: &EnvElement) -> [[EnvElement; 2]; 2] {
    [[u.clone(), zero.clone()], [zero.clone(), u.clone()]]
}

/// The closed-form straightening data of a double extension's envelope:
///
/// ```text
/// inner: sigma(a) = diag(a, a)       delta(a) = 0
///        sigma(da)_kl = alpha_kl(a) + [k = l] da    delta(da)_k = nu_k(a)
///        P = (0, 1), tau = 0
/// outer: sigma(a), sigma(da) as above, sigma(x_l) = diag(x_l, x_l)
///        delta(a)_k  = alpha_k1(a) x1 + alpha_k2(a) x2 + nu_k(a)
///        delta(da)_k = x1 d alpha_k1(a) + x2 d alpha_k2(a) + d nu_k(a)
///        delta(x1) = (0, F), delta(x2) = (-F, 0)
///          with F = q11 x1^2 + q12 x1 x2 + w1 x1 + w2 x2 + w0
///        P = (0, 1)
///        tau = (2 q11 x1 + q12 x2 + w1, q12 x1 + w2, x1 dw1 + x2 dw2 + dw0)
/// ```
pub fn theorem_dedata(e: &EnvAlgebra, level: Level) -> Result<DEDataAssoc, VerifyError> {
    let data = double_data(e)?;
    let zero = e.zero();
    let bv = e.base().vars().clone();
    let nz = e.dz_count();
    let x_poly = [
        Polynomial::var(&bv, nz).expect("x1"),
        Polynomial::var(&bv, nz + 1).expect("x2"),
    ];
    let x = [e.x(0), e.x(1)];
    let mut sigma = Vec::new();
    let mut delta = Vec::new();
    for j in 0..nz {
        let a = coeff_gen(e, j);
        let ia = e.coeff_element(&a);
        let alpha = |k: usize, l: usize| data.alpha[k][l].apply(&a).expect("same table");
        let nu = |k: usize| data.nu[k].apply(&a).expect("same table");
        let label = e.coeff_vars().name(j).to_string();
        sigma.push((label.clone(), diag(&ia, &zero)));
        delta.push((
            label,
            match level {
                Level::Inner => [zero.clone(), zero.clone()],
                Level::Outer => {
                    let row = |k: usize| -> Result<EnvElement, EnvError> {
                        let mut out = e.coeff_element(&nu(k));
                        for (l, xl) in x.iter().enumerate() {
                            out.add_assign(&e.nf_mul(&e.coeff_element(&alpha(k, l)), xl)?);
                        }
                        Ok(out)
                    };
                    [row(0)?, row(1)?]
                }
            },
        ));
    }
    for j in 0..nz {
        let a = coeff_gen(e, j);
        let da = e.dz(j);
        let alpha = |k: usize, l: usize| data.alpha[k][l].apply(&a).expect("same table");
        let nu = |k: usize| data.nu[k].apply(&a).expect("same table");
        let label = e.letter_name(Letter::Dz(j));
        let entry = |k: usize, l: usize| {
            let mut out = e.coeff_element(&alpha(k, l));
            if k == l {
                out.add_assign(&da);
            }
            out
        };
        sigma.push((
            label.clone(),
            [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
        ));
        let d = match level {
            Level::Inner => [e.coeff_element(&nu(0)), e.coeff_element(&nu(1))],
            Level::Outer => {
                let row = |k: usize| -> Result<EnvElement, EnvError> {
                    let mut out = e.d_coeff(&nu(k))?;
                    for (l, xl) in x.iter().enumerate() {
                        out.add_assign(&e.nf_mul(xl, &e.d_coeff(&alpha(k, l))?)?);
                    }
                    Ok(out)
                };
                [row(0)?, row(1)?]
            }
        };
        delta.push((label, d));
    }
    let p11 = Rational::zero();
    let p12 = Rational::one();
    let tau = match level {
        Level::Inner => [zero.clone(), zero.clone(), zero.clone()],
        Level::Outer => {
            let f = e.i_map(&data.quadratic_bracket(&bv).map_err(EnvError::from)?)?;
            for (l, xl) in x.iter().enumerate() {
                let label = e.letter_name(Letter::X(l));
                sigma.push((label.clone(), diag(xl, &zero)));
                delta.push((
                    label,
                    if l == 0 {
                        [zero.clone(), f.clone()]
                    } else {
                        [-&f, zero.clone()]
                    },
                ));
            }
            let w = |i: usize| data.w[i].embed(&bv).expect("prefix");
            let q = |c: &Rational| Polynomial::constant(&bv, c.clone());
            let two = int(2);
            let t1 = &(&(&q(&(&two * &data.q11)) * &x_poly[0]) + &(&q(&data.q12) * &x_poly[1])) + &w(0);
            let t2 = &(&q(&data.q12) * &x_poly[0]) + &w(1);
            let mut t0 = e.d_coeff(&data.w[2])?;
            t0.add_assign(&e.nf_mul(&x[0], &e.d_coeff(&data.w[0])?)?);
            t0.add_assign(&e.nf_mul(&x[1], &e.d_coeff(&data.w[1])?)?);
            [e.i_map(&t1)?, e.i_map(&t2)?, t0]
        }
    };
    Ok(DEDataAssoc {
        p11,
        p12,
        sigma,
        delta,
        tau,
    })
}

const LEVEL_TAG: [&str; 2] = ["1", "2"];

fn compare_dedata(e: &EnvAlgebra, level: Level, got: &DEDataAssoc, want: &DEDataAssoc) -> Option<String> {
    let tag = LEVEL_TAG[level as usize];
    let mismatch = |what: String, g: &EnvElement, w: &EnvElement| {
        Some(format!(
            "{what}: extracted {}, expected {}",
            e.render(g),
            e.render(w)
        ))
    };
    if got.p11 != want.p11 || got.p12 != want.p12 {
        return Some(format!(
            "P{tag}: extracted ({}, {}), expected ({}, {})",
            got.p11, got.p12, want.p11, want.p12
        ));
    }
    for ((label, gs), (_, ws)) in got.sigma.iter().zip(&want.sigma) {
        for k in 0..2 {
            for l in 0..2 {
                if gs[k][l] != ws[k][l] {
                    return mismatch(
                        format!("sigma{tag}_{}{}({label})", k + 1, l + 1),
                        &gs[k][l],
                        &ws[k][l],
                    );
                }
            }
        }
    }
    for ((label, gd), (_, wd)) in got.delta.iter().zip(&want.delta) {
        for k in 0..2 {
            if gd[k] != wd[k] {
                return mismatch(format!("delta{tag}_{}({label})", k + 1), &gd[k], &wd[k]);
            }
        }
    }
    for (i, name) in ["tau1", "tau2", "tau0"].iter().enumerate() {
        if got.tau[i] != want.tau[i] {
            return mismatch(format!("{name} at level {tag}"), &got.tau[i], &want.tau[i]);
        }
    }
    if got.sigma.len() != want.sigma.len() || got.delta.len() != want.delta.len() {
        return Some(format!("level {tag}: generator lists differ"));
    }
    None
}

/// Compares the straightening data read off the multiplication with the
/// closed-form data at both levels.
pub fn verify_theorem(e: &EnvAlgebra) -> Result<VerdictReport, VerifyError> {
    double_data(e)?;
    timed("theorem", || {
        for level in [Level::Inner, Level::Outer] {
            let got = extract_dedata(e, level)?;
            let want = theorem_dedata(e, level)?;
            if let Some(w) = compare_dedata(e, level, &got, &want) {
                return Ok(verdict(Some(w)));
            }
        }
        Ok(verdict(None))
    })
}

fn single_data(e: &EnvAlgebra) -> Result<&PoissonOreData, VerifyError> {
    match e.layer() {
        EnvLayer::SingleOre(s) => Ok(s),
        _ => Err(VerifyError::Layer("needs a single extension instance".into())),
    }
}

/// One straightening formula `v u = sigma(u) v + delta(u)` of a single
/// extension, extracted and expected.
#[derive(Debug, Clone, PartialEq)]
pub struct OreEntry {
    pub formula: String,
    pub extracted: EnvElement,
    pub expected: EnvElement,
}

/// Straightening data of a single extension `R[x]`:
///
/// ```text
/// sigma1(a)  = a              delta1(a)  = 0
/// sigma1(da) = da + alpha(a)  delta1(da) = nu(a)
/// sigma2(a)  = a              delta2(a)  = alpha(a) x + nu(a)
/// sigma2(da) = da + alpha(a)  delta2(da) = x d alpha(a) + d nu(a)
/// sigma2(x)  = x              delta2(x)  = 0
/// ```
pub fn ore_entries(e: &EnvAlgebra) -> Result<Vec<OreEntry>, VerifyError> {
    let s = single_data(e)?;
    let x = e.x(0);
    let mut out = Vec::new();
    for level in [Level::Inner, Level::Outer] {
        let tag = LEVEL_TAG[level as usize];
        let v = e.letter(level_letter(level, 0));
        for g in level_generators(e, level) {
            let got = readout(e, &e.nf_mul(&v, &g.element(e))?, level)?;
            let (sig, del) = match g {
                Generator::Z(j) => {
                    let a = coeff_gen(e, j);
                    let del = match level {
                        Level::Inner => e.zero(),
                        Level::Outer => {
                            &e.nf_mul(&e.coeff_element(&s.alpha.apply(&a).expect("same table")), &x)?
                                + &e.coeff_element(&s.nu.apply(&a).expect("same table"))
                        }
                    };
                    (g.element(e), del)
                }
                Generator::Dz(j) => {
                    let a = coeff_gen(e, j);
                    let alpha = s.alpha.apply(&a).expect("same table");
                    let nu = s.nu.apply(&a).expect("same table");
                    let sig = &g.element(e) + &e.coeff_element(&alpha);
                    let del = match level {
                        Level::Inner => e.coeff_element(&nu),
                        Level::Outer => &e.nf_mul(&x, &e.d_coeff(&alpha)?)? + &e.d_coeff(&nu)?,
                    };
                    (sig, del)
                }
                _ => (x.clone(), e.zero()),
            };
            let label = g.label(e);
            let [s_got, _, d_got] = got;
            out.push(OreEntry {
                formula: format!("sigma{tag}({label})"),
                extracted: s_got,
                expected: sig,
            });
            out.push(OreEntry {
                formula: format!("delta{tag}({label})"),
                extracted: d_got,
                expected: del,
            });
        }
    }
    Ok(out)
}

/// Compares the single-extension straightening data with its closed form.
pub fn verify_ore_single(e: &EnvAlgebra) -> Result<VerdictReport, VerifyError> {
    single_data(e)?;
    timed("ore", || {
        for entry in ore_entries(e)? {
            if entry.extracted != entry.expected {
                return Ok(verdict(Some(format!(
                    "{}: extracted {}, expected {}",
                    entry.formula,
                    e.render(&entry.extracted),
                    e.render(&entry.expected)
                ))));
            }
        }
        Ok(verdict(None))
    })
}

/// All monomials of total degree at most `bound` in `slots` variables.
fn exponent_vectors(slots: usize, bound: u32) -> Vec<Vec<u32>> {
    fn rec(slots: usize, bound: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == slots {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=bound {
            prefix.push(e);
            rec(slots, bound - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(slots, bound, &mut Vec::with_capacity(slots), &mut out);
    out
}

/// Standard monomials with coefficient a monomial of `R`, of total degree
/// at most `bound` counting every `z`, `d(z)`, `x` and `y`. With `zdz_only`
/// the `x`'s and `y`'s are left out.
pub fn standard_monomials(e: &EnvAlgebra, bound: u32, zdz_only: bool) -> Vec<EnvElement> {
    let nz = e.dz_count();
    let nx = if zdz_only { 0 } else { e.x_count() };
    let vars = e.coeff_vars();
    exponent_vectors(2 * nz + 2 * nx, bound)
        .into_iter()
        .map(|v| {
            let mut key = e.unit_key();
            key.beta.copy_from_slice(&v[nz..2 * nz]);
            let rest = &v[2 * nz..];
            if nx >= 1 {
                key.m = rest[0];
                key.p = rest[nx];
            }
            if nx == 2 {
                key.n = rest[1];
                key.q = rest[3];
            }
            let c = Polynomial::from_terms(vars, [(v[..nz].to_vec(), Rational::one())]);
            EnvElement::monomial(key, c)
        })
        .collect()
}

fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let num = loop {
        let n: i64 = rng.gen_range(-3..=3);
        if n != 0 {
            break n;
        }
    };
    rat(num, rng.gen_range(1..=3))
}

/// One to three random standard monomials of degree at most `bound` with
/// small nonzero rational coefficients.
pub fn random_element<R: Rng>(pool: &[EnvElement], rng: &mut R) -> EnvElement {
    let count = rng.gen_range(1..=3);
    let mut out = EnvElement::zero(pool[0].vars());
    for _ in 0..count {
        let m = pool.choose(rng).expect("nonempty pool");
        out.add_assign(&m.scale(&small_rational(rng)));
    }
    out
}

/// Deterministic sample for a given seed.
pub fn random_sample(e: &EnvAlgebra, bound: u32, seed: u64) -> EnvElement {
    let pool = standard_monomials(e, bound, false);
    random_element(&pool, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// One to three random monomials of degree at most `bound` over `vars`.
pub fn random_polynomial<R: Rng>(vars: &Arc<VarTable>, bound: u32, rng: &mut R) -> Polynomial {
    let pool = exponent_vectors(vars.len(), bound);
    let count = rng.gen_range(1..=3);
    let mut out = Polynomial::zero(vars);
    for _ in 0..count {
        let m = pool.choose(rng).expect("nonempty pool").clone();
        out += &Polynomial::from_terms(vars, [(m, small_rational(rng))]);
    }
    out
}

/// `(uv)w = u(vw)` on sampled triples.
pub fn check_associativity(
    e: &EnvAlgebra,
    samples: usize,
    degree: u32,
    seed: u64,
) -> Result<VerdictReport, VerifyError> {
    timed("assoc", || {
        let pool = standard_monomials(e, degree, false);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let u = random_element(&pool, &mut rng);
            let v = random_element(&pool, &mut rng);
            let w = random_element(&pool, &mut rng);
            if let Some(witness) = associator_witness(e, &u, &v, &w)? {
                return Ok(verdict(Some(witness)));
            }
        }
        Ok(verdict(None))
    })
}

/// Describes `(u, v, w)` when `(uv)w != u(vw)`.
pub fn associator_witness(
    e: &EnvAlgebra,
    u: &EnvElement,
    v: &EnvElement,
    w: &EnvElement,
) -> Result<Option<String>, VerifyError> {
    let left = e.nf_mul(&e.nf_mul(u, v)?, w)?;
    let right = e.nf_mul(u, &e.nf_mul(v, w)?)?;
    if left == right {
        return Ok(None);
    }
    Ok(Some(format!(
        "u = {}, v = {}, w = {}, (uv)w - u(vw) = {}",
        e.render(u),
        e.render(v),
        e.render(w),
        e.render(&(&left - &right))
    )))
}

/// `i({f,g}) = [d f, i g]`, `d(fg) = i(f) d(g) + i(g) d(f)` and
/// `d({f,g}) = [d f, d g]` on sampled pairs from the base algebra.
pub fn check_property_p(
    e: &EnvAlgebra,
    samples: usize,
    degree: u32,
    seed: u64,
) -> Result<VerdictReport, VerifyError> {
    timed("propP", || {
        let bv = e.base().vars().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let f = random_polynomial(&bv, degree, &mut rng);
            let g = random_polynomial(&bv, degree, &mut rng);
            if let Some(w) = property_p_witness(e, &f, &g)? {
                return Ok(verdict(Some(w)));
            }
        }
        Ok(verdict(None))
    })
}

/// Describes the first of the three identities that fails at `(f, g)`.
pub fn property_p_witness(
    e: &EnvAlgebra,
    f: &Polynomial,
    g: &Polynomial,
) -> Result<Option<String>, VerifyError> {
    let fg = e.base().bracket(f, g).map_err(EnvError::from)?;
    let (i_f, i_g) = (e.i_map(f)?, e.i_map(g)?);
    let (d_f, d_g) = (e.d_map(f)?, e.d_map(g)?);
    let checks = [
        (
            "i({f,g}) - [d f, i g]",
            &e.i_map(&fg)? - &e.commutator(&d_f, &i_g)?,
        ),
        (
            "d(fg) - i(f) d(g) - i(g) d(f)",
            &(&e.d_map(&(f * g))? - &e.nf_mul(&i_f, &d_g)?) - &e.nf_mul(&i_g, &d_f)?,
        ),
        (
            "d({f,g}) - [d f, d g]",
            &e.d_map(&fg)? - &e.commutator(&d_f, &d_g)?,
        ),
    ];
    for (what, defect) in checks {
        if !defect.is_zero() {
            return Ok(Some(format!("f = {f}, g = {g}, {what} = {}", e.render(&defect))));
        }
    }
    Ok(None)
}

/// `i(a) d(r) i(b) d(s) = i(ab) d(r) d(s) + i(a{r,b}) d(s)` for sampled
/// `a, b` of degree at most 2 and generators `r, s`.
pub fn check_lem1(e: &EnvAlgebra, samples: usize, seed: u64) -> Result<VerdictReport, VerifyError> {
    timed("lem1", || {
        let n = e.dz_count();
        if n == 0 {
            return Ok(verdict(None));
        }
        let vars = e.coeff_vars().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let a = random_polynomial(&vars, 2, &mut rng);
            let r = rng.gen_range(0..n);
            let b = random_polynomial(&vars, 2, &mut rng);
            let s = rng.gen_range(0..n);
            if let Some(w) = lem1_witness(e, &a, r, &b, s)? {
                return Ok(verdict(Some(w)));
            }
        }
        Ok(verdict(None))
    })
}

pub fn lem1_witness(
    e: &EnvAlgebra,
    a: &Polynomial,
    r: usize,
    b: &Polynomial,
    s: usize,
) -> Result<Option<String>, VerifyError> {
    let adr = embed_kahler(e, &KahlerElement::basis(a.clone(), r).map_err(EnvError::from)?)?;
    let bds = embed_kahler(e, &KahlerElement::basis(b.clone(), s).map_err(EnvError::from)?)?;
    let lhs = e.nf_mul(&adr, &bds)?;
    let (dr, ds) = (e.dz(r), e.dz(s));
    let rb = e
        .coeff_algebra()
        .bracket(&coeff_gen(e, r), b)
        .map_err(EnvError::from)?;
    let main = e.nf_mul(&e.nf_mul(&e.coeff_element(&(a * b)), &dr)?, &ds)?;
    let corr = e.nf_mul(&e.coeff_element(&(a * &rb)), &ds)?;
    let rhs = &main + &corr;
    if lhs == rhs {
        return Ok(None);
    }
    let names = e.coeff_vars();
    Ok(Some(format!(
        "a = {a}, r = {}, b = {b}, s = {}, lhs - rhs = {}",
        names.name(r),
        names.name(s),
        e.render(&(&lhs - &rhs))
    )))
}

fn render_term(e: &EnvAlgebra, key: &EnvKey, c: &Polynomial) -> String {
    e.render(&EnvElement::monomial(key.clone(), c.clone()))
}

/// Every term of `[u, v]` for `z`/`d(z)` generators `u, v` lies strictly
/// below `deg u + deg v`.
pub fn check_gr_commutative(e: &EnvAlgebra) -> Result<VerdictReport, VerifyError> {
    timed("gr", || {
        let gens = zdz_generators(e);
        for &u in &gens {
            for &v in &gens {
                let bound = &u.degree(e) + &v.degree(e);
                let c = e.commutator(&u.element(e), &v.element(e))?;
                for (key, coeff) in c.terms() {
                    let deg = key.g_degree();
                    if deg >= bound {
                        return Ok(verdict(Some(format!(
                            "[{}, {}] has term {} of degree {} not below {}",
                            u.label(e),
                            v.label(e),
                            render_term(e, key, coeff),
                            deg,
                            bound
                        ))));
                    }
                }
            }
        }
        Ok(verdict(None))
    })
}

/// A term of a generator product lying above the degree sum.
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationViolation {
    pub left: String,
    pub right: String,
    pub term: String,
    pub degree: GDegree,
    pub bound: GDegree,
}

impl fmt::Display for FiltrationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} * {}: term {} of degree {} exceeds {}",
            self.left, self.right, self.term, self.degree, self.bound
        )
    }
}

/// Every term of `u v` for generators `u, v`, compared against
/// `deg u + deg v`.
pub fn filtration_violations(e: &EnvAlgebra) -> Result<Vec<FiltrationViolation>, VerifyError> {
    let gens = all_generators(e);
    let mut out = Vec::new();
    for &u in &gens {
        for &v in &gens {
            let bound = &u.degree(e) + &v.degree(e);
            let prod = e.nf_mul(&u.element(e), &v.element(e))?;
            for (key, coeff) in prod.terms() {
                let deg = key.g_degree();
                if deg > bound {
                    out.push(FiltrationViolation {
                        left: u.label(e),
                        right: v.label(e),
                        term: render_term(e, key, coeff),
                        degree: deg,
                        bound: bound.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Reports filtration violations in the witness without failing.
pub fn check_filtration(e: &EnvAlgebra) -> Result<VerdictReport, VerifyError> {
    timed("filtration", || {
        let v = filtration_violations(e)?;
        let witness = if v.is_empty() {
            None
        } else {
            Some(v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))
        };
        Ok((CheckStatus::Pass, witness))
    })
}

/// Products of up to five sampled `z`/`d(z)` elements stay free of `x`
/// and `y`.
pub fn check_subalgebra_closure(
    e: &EnvAlgebra,
    samples: usize,
    seed: u64,
) -> Result<VerdictReport, VerifyError> {
    timed("closure", || {
        let pool = standard_monomials(e, 2, true);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let len = rng.gen_range(0..=5);
            let factors: Vec<EnvElement> = (0..len).map(|_| random_element(&pool, &mut rng)).collect();
            let mut prod = e.one();
            for f in &factors {
                prod = e.nf_mul(&prod, f)?;
            }
            let stray = prod
                .terms()
                .find(|(k, _)| !k.is_zdz())
                .map(|(k, c)| render_term(e, k, c));
            if let Some(term) = stray {
                let rendered: Vec<String> = factors.iter().map(|f| format!("({})", e.render(f))).collect();
                return Ok(verdict(Some(format!(
                    "{} has term {}",
                    rendered.join(" * "),
                    term
                ))));
            }
        }
        Ok(verdict(None))
    })
}

/// Selection of checks for [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Theorem,
    Assoc,
    PropP,
    Lem1,
    Gr,
    Filtration,
    Ore,
    Closure,
}

impl Suite {
    pub const NAMES: [&'static str; 9] = [
        "all",
        "theorem",
        "assoc",
        "propP",
        "lem1",
        "gr",
        "filtration",
        "ore",
        "closure",
    ];

    pub fn from_name(name: &str) -> Option<Suite> {
        Some(match name {
            "all" => Suite::All,
            "theorem" => Suite::Theorem,
            "assoc" => Suite::Assoc,
            "propP" => Suite::PropP,
            "lem1" => Suite::Lem1,
            "gr" => Suite::Gr,
            "filtration" => Suite::Filtration,
            "ore" => Suite::Ore,
            "closure" => Suite::Closure,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub samples: usize,
    pub degree: u32,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            samples: DEFAULT_SAMPLES,
            degree: DEFAULT_DEGREE,
            seed: 0,
        }
    }
}

/// Runs the selected checks concurrently; reports are ordered by name.
/// `All` selects the checks that apply to the algebra's layer.
pub fn run_suite(
    e: &EnvAlgebra,
    suite: Suite,
    opts: SuiteOptions,
) -> Result<Vec<VerdictReport>, VerifyError> {
    let selected: Vec<Suite> = match suite {
        Suite::All => {
            let mut s = vec![
                Suite::Assoc,
                Suite::PropP,
                Suite::Lem1,
                Suite::Gr,
                Suite::Filtration,
            ];
            match e.layer() {
                EnvLayer::Plain => {}
                EnvLayer::SingleOre(_) => s.extend([Suite::Ore, Suite::Closure]),
                EnvLayer::DoubleOre(_) => s.extend([Suite::Theorem, Suite::Closure]),
            }
            s
        }
        other => vec![other],
    };
    let run = |s: Suite| -> Result<VerdictReport, VerifyError> {
        match s {
            Suite::Theorem => verify_theorem(e),
            Suite::Assoc => check_associativity(e, opts.samples, opts.degree, opts.seed),
            Suite::PropP => check_property_p(e, opts.samples, opts.degree, opts.seed),
            Suite::Lem1 => check_lem1(e, opts.samples, opts.seed),
            Suite::Gr => check_gr_commutative(e),
            Suite::Filtration => check_filtration(e),
            Suite::Ore => verify_ore_single(e),
            Suite::Closure => check_subalgebra_closure(e, opts.samples, opts.seed),
            Suite::All => unreachable!("expanded above"),
        }
    };
    let results: Vec<Result<VerdictReport, VerifyError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected.iter().map(|&s| scope.spawn(move || run(s))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("check thread panicked"))
            .collect()
    });
    let mut reports = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(reports)
}
