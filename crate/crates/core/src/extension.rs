//! Single and double Poisson-Ore extensions of a polynomial Poisson algebra.
//!
//! A double extension `R[x1, x2]` is fixed by data `{Q, alpha, nu, w}`:
//!
//! ```text
//! {a, b}   = {a, b}_R
//! {x2, x1} = q11 x1^2 + q12 x1 x2 + w1 x1 + w2 x2 + w0
//! {x_k, a} = alpha_k1(a) x1 + alpha_k2(a) x2 + nu_k(a)
//! ```
//!
//! The result is a Poisson algebra exactly when conditions (a)-(e) hold.
//! (a) and (b) are built into the representation ([`Derivation`] entries).
//! (c), (d) and (e) are checked on generators only: every defect expression
//! is a derivation in each argument once (a) and (b) hold, so vanishing on
//! generators forces vanishing everywhere.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::poisson::{PoissonAlgebra, PoissonError};
use crate::poly::{Derivation, PolyError, Polynomial, Rational, VarTable};

#[derive(Debug, Clone, Error)]
pub enum ExtensionError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error("base algebra has not passed the Jacobi check")]
    JacobiUnverified,
    #[error("extension data rejected: {0}")]
    Rejected(String),
    #[error("iterated decomposition needs alpha_12 = 0 or alpha_21 = 0")]
    BothOffDiagonal,
    #[error("with alpha_12 != 0 the x2-first decomposition needs q11 = 0")]
    SwapNeedsZeroQ11,
    #[error("iterated bracket differs from the direct bracket on ({0}, {1})")]
    RoundTripMismatch(String, String),
}

/// Data `{Q, alpha, nu, w}` of a double Poisson-Ore extension.
#[derive(Debug, Clone, PartialEq)]
pub struct DEDataPoisson {
    pub q11: Rational,
    pub q12: Rational,
    /// `alpha[k][l]` is `alpha_{k+1, l+1}`.
    pub alpha: [[Derivation; 2]; 2],
    pub nu: [Derivation; 2],
    /// `(w1, w2, w0)`.
    pub w: [Polynomial; 3],
}

impl DEDataPoisson {
    pub fn zero(vars: &Arc<VarTable>) -> Self {
        let d = Derivation::zero(vars);
        let z = Polynomial::zero(vars);
        DEDataPoisson {
            q11: Rational::zero(),
            q12: Rational::zero(),
            alpha: [[d.clone(), d.clone()], [d.clone(), d.clone()]],
            nu: [d.clone(), d],
            w: [z.clone(), z.clone(), z],
        }
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.nu[0].vars()
    }

    fn check_vars(&self, vars: &Arc<VarTable>) -> Result<(), PolyError> {
        let mismatch = |other: &Arc<VarTable>| PolyError::VarMismatch {
            left: vars.describe(),
            right: other.describe(),
        };
        for d in self.alpha.iter().flatten().chain(self.nu.iter()) {
            if d.vars() != vars {
                return Err(mismatch(d.vars()));
            }
        }
        for w in &self.w {
            if w.vars() != vars {
                return Err(mismatch(w.vars()));
            }
        }
        Ok(())
    }

    /// `q11 x1^2 + q12 x1 x2 + w1 x1 + w2 x2 + w0` over `ext`, whose last two
    /// generators are `x1, x2`.
    pub fn quadratic_bracket(&self, ext: &Arc<VarTable>) -> Result<Polynomial, PolyError> {
        let n = ext.len() - 2;
        let x1 = Polynomial::var(ext, n)?;
        let x2 = Polynomial::var(ext, n + 1)?;
        let mut out = (&x1 * &x1).scale(&self.q11);
        out += &(&x1 * &x2).scale(&self.q12);
        out += &(&self.w[0].embed(ext)? * &x1);
        out += &(&self.w[1].embed(ext)? * &x2);
        out += &self.w[2].embed(ext)?;
        Ok(out)
    }
}

/// Data `{alpha, nu}` of a single Poisson-Ore extension `{x, a} = alpha(a) x + nu(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonOreData {
    pub alpha: Derivation,
    pub nu: Derivation,
}

impl PoissonOreData {
    pub fn zero(vars: &Arc<VarTable>) -> Self {
        PoissonOreData {
            alpha: Derivation::zero(vars),
            nu: Derivation::zero(vars),
        }
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.alpha.vars()
    }
}

/// Nonzero value left over by a failing condition.
#[derive(Debug, Clone, PartialEq)]
pub enum Defect {
    Matrix(Box<[[Polynomial; 2]; 2]>),
    Vector(Box<[Polynomial; 2]>),
    Scalar(Polynomial),
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::Matrix(m) => write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1]),
            Defect::Vector(v) => write!(f, "[{}, {}]", v[0], v[1]),
            Defect::Scalar(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConditionOutcome {
    Pass,
    /// Holds because of how the data is represented.
    PassByConstruction,
    Fail {
        /// Generator names the condition was evaluated at, in argument order.
        arguments: Vec<String>,
        defect: Defect,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionVerdict {
    /// Short label: `a`..`e` for double data, `alpha`/`nu` for single data.
    pub condition: &'static str,
    pub outcome: ConditionOutcome,
}

impl ConditionVerdict {
    pub fn passed(&self) -> bool {
        !matches!(self.outcome, ConditionOutcome::Fail { .. })
    }

    /// `a=z2, defect -1` style summary of a failure.
    pub fn witness(&self) -> Option<String> {
        match &self.outcome {
            ConditionOutcome::Fail { arguments, defect } => {
                let labels = ["a", "b"];
                let args: Vec<String> = arguments
                    .iter()
                    .zip(labels)
                    .map(|(g, l)| format!("{l}={g}"))
                    .collect();
                Some(format!("{}, defect {}", args.join(", "), defect))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub conditions: Vec<ConditionVerdict>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(ConditionVerdict::passed)
    }

    pub fn get(&self, condition: &str) -> Option<&ConditionVerdict> {
        self.conditions.iter().find(|c| c.condition == condition)
    }

    /// Witnesses of the failing conditions, joined.
    pub fn summary(&self) -> String {
        self.conditions
            .iter()
            .filter_map(|c| c.witness().map(|w| format!("({}) {}", c.condition, w)))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn ensure_base(p: &PoissonAlgebra, vars: &Arc<VarTable>) -> Result<(), ExtensionError> {
    if p.vars() != vars {
        return Err(PolyError::VarMismatch {
            left: p.vars().describe(),
            right: vars.describe(),
        }
        .into());
    }
    if !p.jacobi_verified() {
        return Err(ExtensionError::JacobiUnverified);
    }
    Ok(())
}

fn generators(vars: &Arc<VarTable>) -> Vec<Polynomial> {
    (0..vars.len())
        .map(|i| Polynomial::var(vars, i).expect("in range"))
        .collect()
}

/// Evaluates conditions (a)-(e) for `data` over `p`.
pub fn check_dedata(p: &PoissonAlgebra, data: &DEDataPoisson) -> Result<ConditionReport, ExtensionError> {
    let vars = p.vars();
    data.check_vars(vars)?;
    ensure_base(p, vars)?;
    let n = vars.len();
    let gens = generators(vars);

    let alpha_at = |g: &Polynomial| -> Result<[[Polynomial; 2]; 2], PolyError> {
        Ok([
            [data.alpha[0][0].apply(g)?, data.alpha[0][1].apply(g)?],
            [data.alpha[1][0].apply(g)?, data.alpha[1][1].apply(g)?],
        ])
    };
    let nu_at = |g: &Polynomial| -> Result<[Polynomial; 2], PolyError> {
        Ok([data.nu[0].apply(g)?, data.nu[1].apply(g)?])
    };

    // (c) alpha({a,b}) = {alpha(a), b} + {a, alpha(b)} + [alpha(a), alpha(b)]
    let mut cond_c = ConditionOutcome::Pass;
    'c: for i in 0..n {
        for j in i..n {
            let (a, b) = (&gens[i], &gens[j]);
            let ab = p.bracket(a, b)?;
            let (aa, ab_) = (alpha_at(a)?, alpha_at(b)?);
            let z = Polynomial::zero(vars);
            let mut defect = [[z.clone(), z.clone()], [z.clone(), z.clone()]];
            for k in 0..2 {
                for l in 0..2 {
                    let mut d = data.alpha[k][l].apply(&ab)?;
                    d -= &p.bracket(&aa[k][l], b)?;
                    d -= &p.bracket(a, &ab_[k][l])?;
                    for m in 0..2 {
                        d -= &(&aa[k][m] * &ab_[m][l]);
                        d += &(&ab_[k][m] * &aa[m][l]);
                    }
                    defect[k][l] = d;
                }
            }
            if defect.iter().flatten().any(|d| !d.is_zero()) {
                cond_c = ConditionOutcome::Fail {
                    arguments: vec![vars.name(i).into(), vars.name(j).into()],
                    defect: Defect::Matrix(Box::new(defect)),
                };
                break 'c;
            }
        }
    }

    // (d) nu({a,b}) = {nu(a), b} + {a, nu(b)} + alpha(a) nu(b) - alpha(b) nu(a)
    let mut cond_d = ConditionOutcome::Pass;
    'd: for i in 0..n {
        for j in i..n {
            let (a, b) = (&gens[i], &gens[j]);
            let ab = p.bracket(a, b)?;
            let (aa, ab_) = (alpha_at(a)?, alpha_at(b)?);
            let (na, nb) = (nu_at(a)?, nu_at(b)?);
            let mut defect = [Polynomial::zero(vars), Polynomial::zero(vars)];
            for k in 0..2 {
                let mut d = data.nu[k].apply(&ab)?;
                d -= &p.bracket(&na[k], b)?;
                d -= &p.bracket(a, &nb[k])?;
                for m in 0..2 {
                    d -= &(&aa[k][m] * &nb[m]);
                    d += &(&ab_[k][m] * &na[m]);
                }
                defect[k] = d;
            }
            if defect.iter().any(|d| !d.is_zero()) {
                cond_d = ConditionOutcome::Fail {
                    arguments: vec![vars.name(i).into(), vars.name(j).into()],
                    defect: Defect::Vector(Box::new(defect)),
                };
                break 'd;
            }
        }
    }

    // (e) {x2,{x1,a}} + {x1,{a,x2}} + {a,{x2,x1}} = 0, evaluated in the
    // candidate bracket on R[x1, x2].
    let ext = build_double_poisson_ore_unchecked(p, data)?;
    let x1 = Polynomial::var(ext.vars(), n)?;
    let x2 = Polynomial::var(ext.vars(), n + 1)?;
    let mut cond_e = ConditionOutcome::Pass;
    for (j, g) in gens.iter().enumerate() {
        let a = g.embed(ext.vars())?;
        let defect = ext.jacobiator(&x2, &x1, &a)?;
        if !defect.is_zero() {
            cond_e = ConditionOutcome::Fail {
                arguments: vec![vars.name(j).into()],
                defect: Defect::Scalar(defect),
            };
            break;
        }
    }

    Ok(ConditionReport {
        conditions: vec![
            ConditionVerdict {
                condition: "a",
                outcome: ConditionOutcome::PassByConstruction,
            },
            ConditionVerdict {
                condition: "b",
                outcome: ConditionOutcome::PassByConstruction,
            },
            ConditionVerdict {
                condition: "c",
                outcome: cond_c,
            },
            ConditionVerdict {
                condition: "d",
                outcome: cond_d,
            },
            ConditionVerdict {
                condition: "e",
                outcome: cond_e,
            },
        ],
    })
}

/// The candidate bracket on `R[x1, x2]` without checking (c)-(e). The
/// result carries no Jacobi verification.
pub fn build_double_poisson_ore_unchecked(
    p: &PoissonAlgebra,
    data: &DEDataPoisson,
) -> Result<PoissonAlgebra, ExtensionError> {
    let vars = p.vars();
    data.check_vars(vars)?;
    let n = vars.len();
    let ext = vars.extend(&["x1", "x2"])?;
    let x = [Polynomial::var(&ext, n)?, Polynomial::var(&ext, n + 1)?];
    let mut entries = Vec::new();
    for (i, j, b) in p.entries() {
        entries.push((i, j, b.embed(&ext)?));
    }
    for (j, g) in generators(vars).iter().enumerate() {
        for k in 0..2 {
            let mut value = data.nu[k].apply(g)?.embed(&ext)?;
            for (l, xl) in x.iter().enumerate() {
                value += &(&data.alpha[k][l].apply(g)?.embed(&ext)? * xl);
            }
            if !value.is_zero() {
                entries.push((n + k, j, value));
            }
        }
    }
    let quad = data.quadratic_bracket(&ext)?;
    if !quad.is_zero() {
        entries.push((n + 1, n, quad));
    }
    Ok(PoissonAlgebra::new(&ext, entries)?)
}

/// Builds the double Poisson-Ore extension `R[x1, x2]` after checking
/// (a)-(e). The returned algebra has passed its own Jacobi check.
pub fn build_double_poisson_ore(
    p: &PoissonAlgebra,
    data: &DEDataPoisson,
) -> Result<PoissonAlgebra, ExtensionError> {
    let report = check_dedata(p, data)?;
    if !report.passed() {
        return Err(ExtensionError::Rejected(report.summary()));
    }
    let mut ext = build_double_poisson_ore_unchecked(p, data)?;
    if !ext.check_jacobi().passed() {
        return Err(ExtensionError::Rejected(
            "extended bracket fails the Jacobi identity".into(),
        ));
    }
    Ok(ext)
}

/// Checks `alpha({a,b}) = {alpha(a),b} + {a,alpha(b)}` and
/// `nu({a,b}) = {nu(a),b} + {a,nu(b)} + alpha(a)nu(b) - alpha(b)nu(a)` on
/// generator pairs.
pub fn check_poisson_ore(
    p: &PoissonAlgebra,
    data: &PoissonOreData,
) -> Result<ConditionReport, ExtensionError> {
    let vars = p.vars();
    for d in [&data.alpha, &data.nu] {
        if d.vars() != vars {
            return Err(PolyError::VarMismatch {
                left: vars.describe(),
                right: d.vars().describe(),
            }
            .into());
        }
    }
    ensure_base(p, vars)?;
    let gens = generators(vars);
    let n = vars.len();
    let mut cond_alpha = ConditionOutcome::Pass;
    let mut cond_nu = ConditionOutcome::Pass;
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&gens[i], &gens[j]);
            let ab = p.bracket(a, b)?;
            let (aa, ab_) = (data.alpha.apply(a)?, data.alpha.apply(b)?);
            let (na, nb) = (data.nu.apply(a)?, data.nu.apply(b)?);
            let args = || vec![vars.name(i).to_string(), vars.name(j).to_string()];
            if matches!(cond_alpha, ConditionOutcome::Pass) {
                let mut d = data.alpha.apply(&ab)?;
                d -= &p.bracket(&aa, b)?;
                d -= &p.bracket(a, &ab_)?;
                if !d.is_zero() {
                    cond_alpha = ConditionOutcome::Fail {
                        arguments: args(),
                        defect: Defect::Scalar(d),
                    };
                }
            }
            if matches!(cond_nu, ConditionOutcome::Pass) {
                let mut d = data.nu.apply(&ab)?;
                d -= &p.bracket(&na, b)?;
                d -= &p.bracket(a, &nb)?;
                d -= &(&aa * &nb);
                d += &(&ab_ * &na);
                if !d.is_zero() {
                    cond_nu = ConditionOutcome::Fail {
                        arguments: args(),
                        defect: Defect::Scalar(d),
                    };
                }
            }
        }
    }
    Ok(ConditionReport {
        conditions: vec![
            ConditionVerdict {
                condition: "alpha",
                outcome: cond_alpha,
            },
            ConditionVerdict {
                condition: "nu",
                outcome: cond_nu,
            },
        ],
    })
}

/// The candidate bracket on `R[name]` without checking the data. The
/// result carries no Jacobi verification.
pub fn build_poisson_ore_single_unchecked(
    p: &PoissonAlgebra,
    data: &PoissonOreData,
    name: &str,
) -> Result<PoissonAlgebra, ExtensionError> {
    let vars = p.vars();
    let n = vars.len();
    let ext = vars.extend(&[name])?;
    let x = Polynomial::var(&ext, n)?;
    let mut entries = Vec::new();
    for (i, j, b) in p.entries() {
        entries.push((i, j, b.embed(&ext)?));
    }
    for (j, g) in generators(vars).iter().enumerate() {
        let value = &(&data.alpha.apply(g)?.embed(&ext)? * &x) + &data.nu.apply(g)?.embed(&ext)?;
        if !value.is_zero() {
            entries.push((n, j, value));
        }
    }
    Ok(PoissonAlgebra::new(&ext, entries)?)
}

/// `R[x]` with `{x, a} = alpha(a) x + nu(a)`.
pub fn build_poisson_ore_single(
    p: &PoissonAlgebra,
    data: &PoissonOreData,
) -> Result<PoissonAlgebra, ExtensionError> {
    build_poisson_ore_single_as(p, data, "x")
}

/// As [`build_poisson_ore_single`], naming the new generator `name`.
pub fn build_poisson_ore_single_as(
    p: &PoissonAlgebra,
    data: &PoissonOreData,
    name: &str,
) -> Result<PoissonAlgebra, ExtensionError> {
    let report = check_poisson_ore(p, data)?;
    if !report.passed() {
        return Err(ExtensionError::Rejected(report.summary()));
    }
    let mut ext = build_poisson_ore_single_unchecked(p, data, name)?;
    if !ext.check_jacobi().passed() {
        return Err(ExtensionError::Rejected(
            "extended bracket fails the Jacobi identity".into(),
        ));
    }
    Ok(ext)
}

/// A double extension rewritten as two single extensions.
#[derive(Debug, Clone)]
pub struct IteratedDecomposition {
    /// Name of the variable adjoined first (`x1`, or `x2` when `alpha_12 != 0`).
    pub first_var: &'static str,
    pub second_var: &'static str,
    /// Data over `R`.
    pub first: PoissonOreData,
    /// Data over `R[first_var]`.
    pub second: PoissonOreData,
    /// `R[first_var][second_var]` as built from the two steps.
    pub algebra: PoissonAlgebra,
}

/// Splits a double extension with `alpha_12 = 0` into `R[x1; alpha_11, nu_1][x2; alpha_22', nu_2']`:
///
/// ```text
/// alpha_22'(a) = alpha_22(a)              alpha_22'(x1) = q12 x1 + w2
/// nu_2'(a)     = nu_2(a) + alpha_21(a) x1  nu_2'(x1)     = q11 x1^2 + w1 x1 + w0
/// ```
///
/// With `alpha_21 = 0` instead, `x2` is adjoined first; that order needs
/// `q11 = 0` because `{x1, x2}` must then be affine in `x1`.
pub fn decompose_iterated(
    p: &PoissonAlgebra,
    data: &DEDataPoisson,
) -> Result<IteratedDecomposition, ExtensionError> {
    let vars = p.vars();
    data.check_vars(vars)?;
    ensure_base(p, vars)?;
    let swap = if data.alpha[0][1].is_zero() {
        false
    } else if data.alpha[1][0].is_zero() {
        if !data.q11.is_zero() {
            return Err(ExtensionError::SwapNeedsZeroQ11);
        }
        true
    } else {
        return Err(ExtensionError::BothOffDiagonal);
    };
    // (first, second) as indices into x = (x1, x2).
    let (f, s) = if swap { (1, 0) } else { (0, 1) };
    let names = ["x1", "x2"];
    let n = vars.len();
    let gens = generators(vars);

    let first = PoissonOreData {
        alpha: data.alpha[f][f].clone(),
        nu: data.nu[f].clone(),
    };
    let step1 = build_poisson_ore_single_as(p, &first, names[f])?;
    let v1 = step1.vars().clone();
    let xf = Polynomial::var(&v1, n)?;

    let mut alpha_imgs = Vec::with_capacity(n + 1);
    let mut nu_imgs = Vec::with_capacity(n + 1);
    for g in &gens {
        alpha_imgs.push(data.alpha[s][s].apply(g)?.embed(&v1)?);
        let extra = &data.alpha[s][f].apply(g)?.embed(&v1)? * &xf;
        nu_imgs.push(&data.nu[s].apply(g)?.embed(&v1)? + &extra);
    }
    // {x_s, x_f} in terms of x_f, read off from the quadratic bracket.
    let w = |i: usize| data.w[i].embed(&v1);
    let q12 = Polynomial::constant(&v1, data.q12.clone());
    if swap {
        // {x1, x2} = -(q12 x1 x2 + w1 x1 + w2 x2 + w0)
        alpha_imgs.push(-(&(&q12 * &xf) + &w(0)?));
        nu_imgs.push(-(&(&w(1)? * &xf) + &w(2)?));
    } else {
        // {x2, x1} = (q12 x1 + w2) x2 + q11 x1^2 + w1 x1 + w0
        let q11 = Polynomial::constant(&v1, data.q11.clone());
        alpha_imgs.push(&(&q12 * &xf) + &w(1)?);
        nu_imgs.push(&(&(&q11 * &(&xf * &xf)) + &(&w(0)? * &xf)) + &w(2)?);
    }
    let second = PoissonOreData {
        alpha: Derivation::new(&v1, alpha_imgs)?,
        nu: Derivation::new(&v1, nu_imgs)?,
    };
    let step2 = build_poisson_ore_single_as(&step1, &second, names[s])?;

    let direct = build_double_poisson_ore_unchecked(p, data)?;
    let dv = direct.vars();
    let sv = step2.vars();
    for i in 0..dv.len() {
        for j in i + 1..dv.len() {
            let (a, b) = (dv.name(i), dv.name(j));
            let si = sv.index_of(a).expect("same names");
            let sj = sv.index_of(b).expect("same names");
            let iterated = step2.generator_bracket(si, sj).reorder(dv)?;
            if &iterated != direct.generator_bracket(i, j) {
                return Err(ExtensionError::RoundTripMismatch(a.into(), b.into()));
            }
        }
    }
    Ok(IteratedDecomposition {
        first_var: names[f],
        second_var: names[s],
        first,
        second,
        algebra: step2,
    })
}
