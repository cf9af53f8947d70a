//! Exact rational scalars and sparse multivariate commutative polynomials.
//!
//! Every [`Polynomial`] carries the [`VarTable`] it lives over. Terms are kept
//! in a `BTreeMap` keyed by [`Monomial`] under graded-lexicographic order, and
//! zero coefficients are never stored, so structural equality is ring equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, always in lowest terms.
pub type Rational = BigRational;

/// Builds the rational `num/den`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the integer rational `n`.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable tables differ: [{left}] vs [{right}]")]
    VarMismatch { left: String, right: String },
    #[error("generator index {index} out of range for {arity} variables")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("derivation needs one image per generator: expected {expected}, got {got}")]
    ImageCount { expected: usize, got: usize },
}

/// Ordered list of distinct generator names. The position of a name is its
/// index everywhere else in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarTable {
    names: Vec<String>,
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    // `d` is the differential symbol in element expressions.
    name != "d" && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VarTable {
    pub fn new<I, S>(names: I) -> Result<Arc<Self>, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for name in names {
            let name = name.into();
            if !valid_identifier(&name) {
                return Err(PolyError::InvalidName(name));
            }
            if out.contains(&name) {
                return Err(PolyError::DuplicateName(name));
            }
            out.push(name);
        }
        Ok(Arc::new(VarTable { names: out }))
    }

    pub fn empty() -> Arc<Self> {
        Arc::new(VarTable { names: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// A new table with `extra` appended after the existing names.
    pub fn extend(&self, extra: &[&str]) -> Result<Arc<Self>, PolyError> {
        VarTable::new(
            self.names
                .iter()
                .map(String::as_str)
                .chain(extra.iter().copied())
                .map(str::to_owned),
        )
    }

    /// True when `self` lists exactly the first `self.len()` names of `other`.
    pub fn is_prefix_of(&self, other: &VarTable) -> bool {
        other.names.len() >= self.names.len() && other.names[..self.names.len()] == self.names[..]
    }

    pub(crate) fn describe(&self) -> String {
        self.names.join(" ")
    }
}

/// Exponent vector aligned with a [`VarTable`]. Ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: Arc<VarTable>,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(vars: &Arc<VarTable>) -> Self {
        Polynomial {
            vars: Arc::clone(vars),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &Arc<VarTable>) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &Arc<VarTable>, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    /// The generator `z_i`.
    pub fn var(vars: &Arc<VarTable>, i: usize) -> Result<Self, PolyError> {
        if i >= vars.len() {
            return Err(PolyError::IndexOutOfRange {
                index: i,
                arity: vars.len(),
            });
        }
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(Monomial(e), Rational::one());
        Ok(p)
    }

    /// Collects terms, summing repeated monomials and dropping zeros.
    ///
    /// Panics if an exponent vector has the wrong length.
    pub fn from_terms<I>(vars: &Arc<VarTable>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector has wrong arity");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial, `None` otherwise.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn ensure_same(&self, other: &Polynomial) -> Result<(), PolyError> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(PolyError::VarMismatch {
                left: self.vars.describe(),
                right: other.vars.describe(),
            })
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.ensure_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.ensure_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.ensure_same(other)?;
        let mut out = Polynomial::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        Polynomial {
            vars: Arc::clone(&self.vars),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut exp: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(&self.vars);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to generator `i`.
    pub fn partial(&self, i: usize) -> Result<Polynomial, PolyError> {
        if i >= self.vars.len() {
            return Err(PolyError::IndexOutOfRange {
                index: i,
                arity: self.vars.len(),
            });
        }
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(Monomial(exps), c * Rational::from_integer(BigInt::from(e)));
        }
        Ok(out)
    }

    /// Reinterprets `self` over a larger table whose leading names are
    /// exactly `self.vars()`.
    pub fn embed(&self, target: &Arc<VarTable>) -> Result<Polynomial, PolyError> {
        if !self.vars.is_prefix_of(target) {
            return Err(PolyError::VarMismatch {
                left: self.vars.describe(),
                right: target.describe(),
            });
        }
        let pad = target.len() - self.vars.len();
        Ok(Polynomial {
            vars: Arc::clone(target),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.extend(std::iter::repeat_n(0, pad));
                    (Monomial(e), c.clone())
                })
                .collect(),
        })
    }

    /// Reinterprets `self` over a table holding the same names in another order.
    pub fn reorder(&self, target: &Arc<VarTable>) -> Result<Polynomial, PolyError> {
        let mismatch = || PolyError::VarMismatch {
            left: self.vars.describe(),
            right: target.describe(),
        };
        if target.len() != self.vars.len() {
            return Err(mismatch());
        }
        let perm: Vec<usize> = self
            .vars
            .names()
            .iter()
            .map(|n| target.index_of(n).ok_or_else(mismatch))
            .collect::<Result<_, _>>()?;
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &k) in m.0.iter().enumerate() {
                e[perm[i]] = k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Splits `self` over a table whose first `target.len()` names are
    /// `target`: each group of terms sharing the same trailing exponents
    /// becomes one polynomial over `target`.
    pub fn split_tail(&self, target: &Arc<VarTable>) -> Result<BTreeMap<Vec<u32>, Polynomial>, PolyError> {
        if !target.is_prefix_of(&self.vars) {
            return Err(PolyError::VarMismatch {
                left: self.vars.describe(),
                right: target.describe(),
            });
        }
        let n = target.len();
        let mut out: BTreeMap<Vec<u32>, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let head = Monomial(m.0[..n].to_vec());
            out.entry(m.0[n..].to_vec())
                .or_insert_with(|| Polynomial::zero(target))
                .add_term(head, c.clone());
        }
        Ok(out)
    }

    /// Parses an expression in the polynomial grammar.
    pub fn parse(text: &str, vars: &Arc<VarTable>) -> Result<Polynomial, crate::expr::ParseError> {
        crate::expr::parse_poly(text, vars)
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_add(rhs)
            .expect("polynomial addition across variable tables")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_sub(rhs)
            .expect("polynomial subtraction across variable tables")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_mul(rhs)
            .expect("polynomial product across variable tables")
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        self.ensure_same(rhs)
            .expect("polynomial addition across variable tables");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        self.ensure_same(rhs)
            .expect("polynomial subtraction across variable tables");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            vars: Arc::clone(&self.vars),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

pub(crate) fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_monomial(m: &Monomial, vars: &VarTable) -> String {
    m.0.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            if e == 1 {
                vars.name(i).to_string()
            } else {
                format!("{}^{}", vars.name(i), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Renders `|c| * m` without sign.
fn fmt_unsigned_term(m: &Monomial, c: &Rational, vars: &VarTable) -> String {
    let c = c.abs();
    if m.is_one() {
        fmt_rational(&c)
    } else if c.is_one() {
        fmt_monomial(m, vars)
    } else {
        format!("{}*{}", fmt_rational(&c), fmt_monomial(m, vars))
    }
}

impl fmt::Display for Polynomial {
    /// Terms in descending graded-lexicographic order, e.g. `z1^2 - 1/2*z2 + 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let body = fmt_unsigned_term(m, c, &self.vars);
            match (idx, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// A derivation of the polynomial ring, fixed by its values on generators and
/// extended by the Leibniz rule: `D(f) = sum_i (df/dz_i) * D(z_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    vars: Arc<VarTable>,
    images: Vec<Polynomial>,
}

impl Derivation {
    pub fn new(vars: &Arc<VarTable>, images: Vec<Polynomial>) -> Result<Self, PolyError> {
        if images.len() != vars.len() {
            return Err(PolyError::ImageCount {
                expected: vars.len(),
                got: images.len(),
            });
        }
        for img in &images {
            if img.vars != *vars {
                return Err(PolyError::VarMismatch {
                    left: vars.describe(),
                    right: img.vars.describe(),
                });
            }
        }
        Ok(Derivation {
            vars: Arc::clone(vars),
            images,
        })
    }

    pub fn zero(vars: &Arc<VarTable>) -> Self {
        Derivation {
            vars: Arc::clone(vars),
            images: vec![Polynomial::zero(vars); vars.len()],
        }
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn image(&self, i: usize) -> &Polynomial {
        &self.images[i]
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Polynomial::is_zero)
    }

    pub fn set_image(&mut self, i: usize, value: Polynomial) -> Result<(), PolyError> {
        if i >= self.images.len() {
            return Err(PolyError::IndexOutOfRange {
                index: i,
                arity: self.images.len(),
            });
        }
        self.images[i].ensure_same(&value)?;
        self.images[i] = value;
        Ok(())
    }

    pub fn apply(&self, f: &Polynomial) -> Result<Polynomial, PolyError> {
        if f.vars != self.vars {
            return Err(PolyError::VarMismatch {
                left: self.vars.describe(),
                right: f.vars.describe(),
            });
        }
        let mut out = Polynomial::zero(&self.vars);
        for (i, img) in self.images.iter().enumerate() {
            if img.is_zero() {
                continue;
            }
            let d = f.partial(i)?;
            if !d.is_zero() {
                out += &(&d * img);
            }
        }
        Ok(out)
    }

    /// The same derivation viewed on a larger ring whose extra generators it kills.
    pub fn embed(&self, target: &Arc<VarTable>) -> Result<Derivation, PolyError> {
        let mut images = self
            .images
            .iter()
            .map(|p| p.embed(target))
            .collect::<Result<Vec<_>, _>>()?;
        images.resize(target.len(), Polynomial::zero(target));
        Ok(Derivation {
            vars: Arc::clone(target),
            images,
        })
    }
}
