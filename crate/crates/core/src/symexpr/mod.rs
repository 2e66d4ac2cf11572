//! Exact rational-function expressions over named chart coordinates.
//!
//! Every symbolic identity in this crate is decided by subtracting two
//! [`Expr`]s and testing the numerator for zero, so no tolerance ever enters
//! the symbolic checks. Floats only appear in [`Expr::eval_f64`] and in
//! [`CompiledExpr`], which the flow integrators use.

mod parse;
mod poly;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use parse::{parse_expr, ParseError};
pub use poly::{Monomial, Poly};

pub type Rational = num_rational::BigRational;

/// Builds an exact rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Float value of an exact rational.
pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("unbound variable {0}")]
    Unbound(CoordName),
    #[error("singular evaluation")]
    SingularEvaluation,
}

/// A chart coordinate. Indices are 1-based, as in the usual index notation.
///
/// The derived ordering (kind-major, then indices) is the variable order
/// used for canonical monomial ordering.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoordName {
    /// base coordinate x^i
    BaseX(u8),
    /// fiber coordinate y^A
    FiberY(u8),
    /// coframe block pi^i_j
    FrameNN(u8, u8),
    /// coframe block pi^A_B
    FrameKK(u8, u8),
    /// coframe block pi^A_i (first index fiber, second base)
    FrameKN(u8, u8),
    /// multimomentum p^i_A (first index base, second fiber)
    MomP(u8, u8),
    /// covariant Hamiltonian coordinate p
    MomScalar,
    /// free parameter treated as an independent variable
    Param(Arc<str>),
}

impl CoordName {
    pub fn param(name: &str) -> Self {
        CoordName::Param(Arc::from(name))
    }

    /// True when every index respects base dimension `n` and fiber dimension `k`.
    pub fn fits_chart(&self, n: usize, k: usize) -> bool {
        let b = |i: &u8| (1..=n).contains(&(*i as usize));
        let f = |a: &u8| (1..=k).contains(&(*a as usize));
        match self {
            CoordName::BaseX(i) => b(i),
            CoordName::FiberY(a) => f(a),
            CoordName::FrameNN(i, j) => b(i) && b(j),
            CoordName::FrameKK(a, c) => f(a) && f(c),
            CoordName::FrameKN(a, i) => f(a) && b(i),
            CoordName::MomP(i, a) => b(i) && f(a),
            CoordName::MomScalar | CoordName::Param(_) => true,
        }
    }
}

impl fmt::Display for CoordName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoordName::BaseX(i) => write!(f, "x{i}"),
            CoordName::FiberY(a) => write!(f, "y{a}"),
            CoordName::FrameNN(i, j) => write!(f, "pi_{i}_{j}"),
            CoordName::FrameKK(a, b) => write!(f, "piA_{a}_{b}"),
            CoordName::FrameKN(a, i) => write!(f, "piA_{a}_x{i}"),
            CoordName::MomP(i, a) => write!(f, "p_{i}_A{a}"),
            CoordName::MomScalar => write!(f, "p"),
            CoordName::Param(s) => write!(f, "{s}"),
        }
    }
}

/// Rational function `num / den`, kept in reduced form by [`Expr::normalize`].
///
/// Invariants after normalization: zero is `0/1`; the denominator's leading
/// coefficient (pure lex order over [`CoordName`]) is one; no monomial factor
/// is shared; and exact divisibility between numerator and denominator has
/// been cancelled.
#[derive(Clone, Debug)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Expr::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        Expr { num: Poly::constant(r), den: Poly::one() }
    }

    pub fn from_int(v: i64) -> Self {
        Expr::from_rational(int(v))
    }

    pub fn var(c: CoordName) -> Self {
        Expr { num: Poly::var(c), den: Poly::one() }
    }

    pub fn x(i: u8) -> Self {
        Expr::var(CoordName::BaseX(i))
    }

    pub fn y(a: u8) -> Self {
        Expr::var(CoordName::FiberY(a))
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr { num: p, den: Poly::one() }
    }

    /// Builds and normalizes `num / den`.
    pub fn fraction(num: Poly, den: Poly) -> Result<Self, ExprError> {
        Expr { num, den }.normalize()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.as_constant().is_some()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    /// Canonical reduced form; see the type-level invariants.
    pub fn normalize(&self) -> Result<Expr, ExprError> {
        if self.den.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        if self.num.is_zero() {
            return Ok(Expr::zero());
        }
        let g = self.num.monomial_gcd().gcd(&self.den.monomial_gcd());
        let (mut num, mut den) = (self.num.div_monomial(&g), self.den.div_monomial(&g));
        if den.as_constant().is_none() {
            if let Some(q) = num.exact_div(&den) {
                num = q;
                den = Poly::one();
            } else if let Some(q) = den.exact_div(&num) {
                num = Poly::one();
                den = q;
            }
        }
        let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero denominator");
        if !lc.is_one() {
            let inv = Rational::one() / lc;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(Expr { num, den })
    }

    fn norm(num: Poly, den: Poly) -> Expr {
        Expr { num, den }.normalize().expect("denominator is a product of nonzero denominators")
    }

    pub fn checked_div(&self, other: &Expr) -> Result<Expr, ExprError> {
        if other.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        let (mut a, mut d) = (self.num.clone(), other.num.clone());
        let (mut b, mut c) = (self.den.clone(), other.den.clone());
        cancel_pair(&mut a, &mut d);
        cancel_pair(&mut c, &mut b);
        Ok(Expr::norm(a.mul(&c), b.mul(&d)))
    }

    pub fn pow(&self, e: u32) -> Expr {
        Expr::norm(self.num.pow(e), self.den.pow(e))
    }

    pub fn scale(&self, s: &Rational) -> Expr {
        if s.is_zero() {
            return Expr::zero();
        }
        Expr { num: self.num.scale(s), den: self.den.clone() }
    }

    /// Partial derivative with respect to `c`.
    pub fn diff(&self, c: &CoordName) -> Expr {
        let dn = self.num.diff(c);
        if let Some(k) = self.den.as_constant() {
            return Expr { num: dn.scale(&(Rational::one() / k)), den: Poly::one() };
        }
        let dd = self.den.diff(c);
        if dd.is_zero() {
            return Expr::norm(dn, self.den.clone());
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Expr::norm(num, self.den.mul(&self.den))
    }

    pub fn variables(&self) -> Vec<CoordName> {
        let mut v = self.num.variables();
        v.extend(self.den.variables());
        v.sort();
        v.dedup();
        v
    }

    pub fn depends_on(&self, c: &CoordName) -> bool {
        self.num.terms().any(|(m, _)| m.exponent(c) > 0)
            || self.den.terms().any(|(m, _)| m.exponent(c) > 0)
    }

    /// Substitutes expressions for variables; unmapped variables stay as they are.
    pub fn subs(&self, map: &BTreeMap<CoordName, Expr>) -> Expr {
        let num = subs_poly(&self.num, map);
        let den = subs_poly(&self.den, map);
        num.checked_div(&den).expect("substitution produced an identically zero denominator")
    }

    pub fn eval_rational(&self, env: &BTreeMap<CoordName, Rational>) -> Result<Rational, ExprError> {
        let n = eval_poly(&self.num, |c| env.get(c).cloned())?;
        let d = eval_poly(&self.den, |c| env.get(c).cloned())?;
        if d.is_zero() {
            return Err(ExprError::SingularEvaluation);
        }
        Ok(n / d)
    }

    pub fn eval_f64(&self, env: &BTreeMap<CoordName, f64>) -> Result<f64, ExprError> {
        let n = eval_poly_f64(&self.num, |c| env.get(c).copied())?;
        let d = eval_poly_f64(&self.den, |c| env.get(c).copied())?;
        if d.abs() < 1e-12 {
            return Err(ExprError::SingularEvaluation);
        }
        Ok(n / d)
    }
}

fn cancel_pair(num: &mut Poly, den: &mut Poly) {
    if num.is_zero() || den.as_constant().is_some() {
        return;
    }
    if let Some(q) = num.exact_div(den) {
        *num = q;
        *den = Poly::one();
    } else if let Some(q) = den.exact_div(num) {
        *num = Poly::one();
        *den = q;
    }
}

fn subs_poly(p: &Poly, map: &BTreeMap<CoordName, Expr>) -> Expr {
    let mut cache: BTreeMap<(CoordName, u32), Expr> = BTreeMap::new();
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        let mut term = Expr::from_rational(c.clone());
        let mut rest = Vec::new();
        for (v, e) in m.factors() {
            if let Some(s) = map.get(v) {
                let pw = cache.entry((v.clone(), *e)).or_insert_with(|| s.pow(*e)).clone();
                term = &term * &pw;
            } else {
                rest.push((v.clone(), *e));
            }
        }
        if !rest.is_empty() {
            let mut mono = Poly::zero();
            mono.add_term(Monomial(rest), Rational::one());
            term = &term * &Expr::from_poly(mono);
        }
        acc = &acc + &term;
    }
    acc
}

fn eval_poly<F>(p: &Poly, lookup: F) -> Result<Rational, ExprError>
where
    F: Fn(&CoordName) -> Option<Rational>,
{
    let mut acc = Rational::zero();
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (v, e) in m.factors() {
            let val = lookup(v).ok_or_else(|| ExprError::Unbound(v.clone()))?;
            t *= num_traits::pow(val, *e as usize);
        }
        acc += t;
    }
    Ok(acc)
}

fn eval_poly_f64<F>(p: &Poly, lookup: F) -> Result<f64, ExprError>
where
    F: Fn(&CoordName) -> Option<f64>,
{
    let mut acc = 0.0;
    for (m, c) in p.terms() {
        let mut t = rat_to_f64(c);
        for (v, e) in m.factors() {
            let val = lookup(v).ok_or_else(|| ExprError::Unbound(v.clone()))?;
            t *= val.powi(*e as i32);
        }
        acc += t;
    }
    Ok(acc)
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for Expr {}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Self {
        Expr::from_rational(r)
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::from_int(v)
    }
}

impl From<CoordName> for Expr {
    fn from(c: CoordName) -> Self {
        Expr::var(c)
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            return Expr::norm(self.num.add(&rhs.num), self.den.clone());
        }
        if let Some(q) = rhs.den.exact_div(&self.den) {
            return Expr::norm(self.num.mul(&q).add(&rhs.num), rhs.den.clone());
        }
        if let Some(q) = self.den.exact_div(&rhs.den) {
            return Expr::norm(self.num.add(&rhs.num.mul(&q)), self.den.clone());
        }
        Expr::norm(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.den.as_constant().is_some() && rhs.den.as_constant().is_some() {
            let k = self.den.as_constant().unwrap() * rhs.den.as_constant().unwrap();
            return Expr { num: self.num.mul(&rhs.num).scale(&(Rational::one() / k)), den: Poly::one() };
        }
        let (mut a, mut d) = (self.num.clone(), rhs.den.clone());
        let (mut c, mut b) = (rhs.num.clone(), self.den.clone());
        cancel_pair(&mut a, &mut d);
        cancel_pair(&mut c, &mut b);
        Expr::norm(a.mul(&c), b.mul(&d))
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::ops::Div for &Expr {
    type Output = Expr;
    /// Panics on an identically zero divisor; use [`Expr::checked_div`] to handle it.
    fn div(self, rhs: &Expr) -> Expr {
        self.checked_div(rhs).expect("zero denominator")
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        &self / &rhs
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| &a + &b)
    }
}

fn fmt_poly(p: &Poly, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    // highest terms first
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|a, b| b.0.lex_cmp(a.0));
    for (idx, (m, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if idx == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { " - " } else { " + " })?;
        }
        let mut parts = Vec::new();
        if !abs.is_one() || m.is_one() {
            parts.push(abs.to_string());
        }
        for (v, e) in m.factors() {
            if *e == 1 {
                parts.push(v.to_string());
            } else {
                parts.push(format!("{v}^{e}"));
            }
        }
        write!(f, "{}", parts.join("*"))?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.as_constant().is_some_and(|c| c.is_one()) {
            return fmt_poly(&self.num, f);
        }
        write!(f, "(")?;
        fmt_poly(&self.num, f)?;
        write!(f, ")/(")?;
        fmt_poly(&self.den, f)?;
        write!(f, ")")
    }
}

/// Float evaluator over a fixed coordinate layout, for integrating flows.
#[derive(Clone, Debug)]
pub struct CompiledExpr {
    num: Vec<(f64, Vec<(usize, i32)>)>,
    den: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledExpr {
    pub fn new(e: &Expr, layout: &[CoordName]) -> Result<Self, ExprError> {
        let compile = |p: &Poly| -> Result<Vec<(f64, Vec<(usize, i32)>)>, ExprError> {
            p.terms()
                .map(|(m, c)| {
                    let idx = m
                        .factors()
                        .iter()
                        .map(|(v, e)| {
                            layout
                                .iter()
                                .position(|l| l == v)
                                .map(|i| (i, *e as i32))
                                .ok_or_else(|| ExprError::Unbound(v.clone()))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok((rat_to_f64(c), idx))
                })
                .collect()
        };
        Ok(CompiledExpr { num: compile(&e.num)?, den: compile(&e.den)? })
    }

    pub fn eval(&self, state: &[f64]) -> Result<f64, ExprError> {
        let ev = |terms: &[(f64, Vec<(usize, i32)>)]| {
            terms
                .iter()
                .map(|(c, fs)| fs.iter().fold(*c, |acc, (i, e)| acc * state[*i].powi(*e)))
                .sum::<f64>()
        };
        let d = ev(&self.den);
        if d.abs() < 1e-12 {
            return Err(ExprError::SingularEvaluation);
        }
        Ok(ev(&self.num) / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi(i: u8, j: u8) -> Expr {
        Expr::var(CoordName::FrameNN(i, j))
    }

    #[test]
    fn commutativity_cancels_to_unique_zero() {
        let e = &(&Expr::x(1) * &Expr::x(2)) - &(&Expr::x(2) * &Expr::x(1));
        assert!(e.is_zero());
        assert_eq!(e.numerator(), &Poly::zero());
        assert_eq!(e.denominator(), &Poly::one());
    }

    #[test]
    fn self_quotient_of_determinant_is_one() {
        let det = &(&pi(1, 1) * &pi(2, 2)) - &(&pi(1, 2) * &pi(2, 1));
        let q = &det / &det;
        assert_eq!(q.as_constant(), Some(int(1)));
    }

    #[test]
    fn quotient_by_linear_factor_reduces_to_polynomial() {
        let x = Expr::x(1);
        let num = &(&x * &x) - &Expr::one();
        let den = &x - &Expr::one();
        let q = &num / &den;
        assert!(q.is_polynomial());
        assert_eq!(q.numerator(), (&x + &Expr::one()).numerator());
    }

    #[test]
    fn zero_denominator_is_an_error() {
        let r = Expr::fraction(Poly::one(), Poly::zero());
        assert_eq!(r.unwrap_err(), ExprError::ZeroDenominator);
        assert_eq!(Expr::one().checked_div(&Expr::zero()).unwrap_err(), ExprError::ZeroDenominator);
    }

    #[test]
    fn derivative_examples() {
        let xy = &Expr::x(1) * &Expr::y(1);
        assert_eq!(xy.diff(&CoordName::BaseX(1)), Expr::y(1));
        assert!(Expr::x(1).diff(&CoordName::FiberY(1)).is_zero());
        let inv = &Expr::one() / &Expr::x(1);
        let d = inv.diff(&CoordName::BaseX(1));
        let expected = -(&Expr::one() / &Expr::x(1).pow(2));
        assert_eq!(d, expected);
        // central finite difference at x = 2
        let f = |v: f64| 1.0 / v;
        let h = 1e-5;
        let fd = (f(2.0 + h) - f(2.0 - h)) / (2.0 * h);
        let env = BTreeMap::from([(CoordName::BaseX(1), 2.0)]);
        assert!((d.eval_f64(&env).unwrap() - fd).abs() < 1e-8);
    }

    #[test]
    fn evaluation_examples() {
        let e = &Expr::x(1) + &Expr::y(1);
        let env = BTreeMap::from([(CoordName::BaseX(1), int(1)), (CoordName::FiberY(1), int(2))]);
        assert_eq!(e.eval_rational(&env).unwrap(), int(3));
        let det = &(&pi(1, 1) * &pi(2, 2)) - &(&pi(1, 2) * &pi(2, 1));
        let id = BTreeMap::from([
            (CoordName::FrameNN(1, 1), int(1)),
            (CoordName::FrameNN(1, 2), int(0)),
            (CoordName::FrameNN(2, 1), int(0)),
            (CoordName::FrameNN(2, 2), int(1)),
        ]);
        assert_eq!(det.eval_rational(&id).unwrap(), int(1));
    }

    #[test]
    fn evaluation_errors() {
        let e = &Expr::one() / &Expr::x(1);
        let env = BTreeMap::from([(CoordName::BaseX(1), int(0))]);
        assert_eq!(e.eval_rational(&env).unwrap_err(), ExprError::SingularEvaluation);
        let fenv = BTreeMap::from([(CoordName::BaseX(1), 1e-13)]);
        assert_eq!(e.eval_f64(&fenv).unwrap_err(), ExprError::SingularEvaluation);
        assert_eq!(
            Expr::y(1).eval_rational(&BTreeMap::new()).unwrap_err(),
            ExprError::Unbound(CoordName::FiberY(1))
        );
    }

    #[test]
    fn substitution_composes() {
        let e = &Expr::x(1).pow(2) + &Expr::y(1);
        let map = BTreeMap::from([(CoordName::BaseX(1), &Expr::y(1) + &Expr::one())]);
        let s = e.subs(&map);
        let expected = &(&Expr::y(1).pow(2) + &(&Expr::y(1) * &Expr::from_int(3))) + &Expr::one();
        assert_eq!(s, expected);
    }

    #[test]
    fn compiled_matches_tree_evaluation() {
        let e = &(&Expr::x(1).pow(3) - &Expr::y(2)) / &(&Expr::x(1) + &Expr::from_int(3));
        let layout = vec![CoordName::BaseX(1), CoordName::FiberY(2)];
        let c = CompiledExpr::new(&e, &layout).unwrap();
        let env = BTreeMap::from([(CoordName::BaseX(1), 0.5), (CoordName::FiberY(2), -1.25)]);
        let a = c.eval(&[0.5, -1.25]).unwrap();
        assert!((a - e.eval_f64(&env).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn display_round_trips_through_parser() {
        let e = &(&Expr::var(CoordName::FrameKN(2, 1)) * &Expr::var(CoordName::MomP(1, 2)))
            - &(&Expr::var(CoordName::MomScalar) / &Expr::from_int(3));
        let text = e.to_string();
        let back = parse_expr(&text, None).unwrap();
        assert_eq!(back, e);
    }
}
