//! Sparse coordinate vector fields and scalar differential forms.
//!
//! A form is stored as a map from strictly increasing lists of coordinate
//! differentials to coefficients. The interior product contracts in the
//! first slot: `(v ⨼ ω)(w, ...) = ω(v, w, ...)`. Nested contractions are
//! written right-to-left, so `u ⨼ v ⨼ ω` means `u ⨼ (v ⨼ ω)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::symexpr::{CoordName, Expr, ExprError, Rational};

/// Coordinate vector field with symbolic components; absent entries are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VectorField {
    comps: BTreeMap<CoordName, Expr>,
}

impl VectorField {
    pub fn zero() -> Self {
        VectorField::default()
    }

    pub fn coordinate(c: CoordName) -> Self {
        let mut v = VectorField::zero();
        v.set(c, Expr::one());
        v
    }

    pub fn from_components(comps: impl IntoIterator<Item = (CoordName, Expr)>) -> Self {
        let mut v = VectorField::zero();
        for (c, e) in comps {
            v.add_to(c, &e);
        }
        v
    }

    pub fn set(&mut self, c: CoordName, e: Expr) {
        if e.is_zero() {
            self.comps.remove(&c);
        } else {
            self.comps.insert(c, e);
        }
    }

    pub fn add_to(&mut self, c: CoordName, e: &Expr) {
        let v = self.get(&c) + e;
        self.set(c, v);
    }

    pub fn get(&self, c: &CoordName) -> Expr {
        self.comps.get(c).cloned().unwrap_or_default()
    }

    pub fn components(&self) -> impl Iterator<Item = (&CoordName, &Expr)> {
        self.comps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Directional derivative `v(f)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        self.comps
            .iter()
            .filter(|(c, _)| f.depends_on(c))
            .map(|(c, e)| e * &f.diff(c))
            .sum()
    }

    /// Coordinate Lie bracket `[v, w]^m = v(w^m) - w(v^m)`.
    pub fn bracket(&self, w: &VectorField) -> VectorField {
        let mut keys: Vec<&CoordName> = self.comps.keys().chain(w.comps.keys()).collect();
        keys.sort();
        keys.dedup();
        VectorField::from_components(
            keys.into_iter()
                .map(|c| (c.clone(), &self.apply(&w.get(c)) - &w.apply(&self.get(c)))),
        )
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        let mut out = self.clone();
        for (c, e) in &o.comps {
            out.add_to(c.clone(), e);
        }
        out
    }

    pub fn sub(&self, o: &VectorField) -> VectorField {
        self.add(&o.scale_expr(&Expr::from_int(-1)))
    }

    pub fn scale_expr(&self, s: &Expr) -> VectorField {
        VectorField::from_components(self.comps.iter().map(|(c, e)| (c.clone(), e * s)))
    }

    /// Keeps only the components accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(&CoordName) -> bool) -> VectorField {
        VectorField { comps: self.comps.iter().filter(|(c, _)| keep(c)).map(|(c, e)| (c.clone(), e.clone())).collect() }
    }

    pub fn subs(&self, map: &BTreeMap<CoordName, Expr>) -> VectorField {
        VectorField::from_components(self.comps.iter().map(|(c, e)| (c.clone(), e.subs(map))))
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.comps.iter().map(|(c, e)| format!("({e}) d/d{c}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Sign of the permutation sorting `idx`, and the sorted list; `None` on a repeated entry.
pub fn sort_with_sign<T: Ord + Clone>(idx: &[T]) -> Option<(i32, Vec<T>)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    // insertion sort, counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

/// Scalar differential form of fixed degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    degree: usize,
    terms: BTreeMap<Vec<CoordName>, Expr>,
}

impl Form {
    pub fn zero(degree: usize) -> Self {
        Form { degree, terms: BTreeMap::new() }
    }

    pub fn scalar(f: Expr) -> Self {
        let mut out = Form::zero(0);
        out.add_term(Vec::new(), f);
        out
    }

    /// The coordinate one-form `dc`.
    pub fn d_coord(c: CoordName) -> Self {
        let mut out = Form::zero(1);
        out.add_term(vec![c], Expr::one());
        out
    }

    /// `coef * dc_1 ∧ ... ∧ dc_p`, in any order.
    pub fn monomial(coef: Expr, idx: &[CoordName]) -> Self {
        let mut out = Form::zero(idx.len());
        out.add_term(idx.to_vec(), coef);
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<CoordName>, &Expr)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the sorted basis element `idx`.
    pub fn coefficient(&self, idx: &[CoordName]) -> Expr {
        match sort_with_sign(idx) {
            Some((s, sorted)) => {
                let c = self.terms.get(&sorted).cloned().unwrap_or_default();
                if s < 0 {
                    -c
                } else {
                    c
                }
            }
            None => Expr::zero(),
        }
    }

    /// Adds `coef * d idx` where `idx` may be unsorted.
    pub fn add_term(&mut self, idx: Vec<CoordName>, coef: Expr) {
        assert_eq!(idx.len(), self.degree, "form degree mismatch");
        if coef.is_zero() {
            return;
        }
        let Some((sign, sorted)) = sort_with_sign(&idx) else {
            return;
        };
        let coef = if sign < 0 { -coef } else { coef };
        let v = match self.terms.remove(&sorted) {
            Some(old) => &old + &coef,
            None => coef,
        };
        if !v.is_zero() {
            self.terms.insert(sorted, v);
        }
    }

    pub fn add(&self, o: &Form) -> Form {
        assert_eq!(self.degree, o.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (i, c) in &o.terms {
            out.add_term(i.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Form {
        Form { degree: self.degree, terms: self.terms.iter().map(|(i, c)| (i.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Form) -> Form {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Expr) -> Form {
        let mut out = Form::zero(self.degree);
        for (i, c) in &self.terms {
            out.add_term(i.clone(), c * s);
        }
        out
    }

    pub fn scale_rational(&self, s: &Rational) -> Form {
        self.scale(&Expr::from_rational(s.clone()))
    }

    pub fn wedge(&self, o: &Form) -> Form {
        let mut out = Form::zero(self.degree + o.degree);
        for (i, a) in &self.terms {
            for (j, b) in &o.terms {
                if i.iter().any(|c| j.contains(c)) {
                    continue;
                }
                let mut idx = i.clone();
                idx.extend(j.iter().cloned());
                out.add_term(idx, a * b);
            }
        }
        out
    }

    /// Exterior derivative in coordinates.
    pub fn d(&self) -> Form {
        let mut out = Form::zero(self.degree + 1);
        for (idx, f) in &self.terms {
            for v in f.variables() {
                if idx.contains(&v) {
                    continue;
                }
                let mut full = vec![v.clone()];
                full.extend(idx.iter().cloned());
                out.add_term(full, f.diff(&v));
            }
        }
        out
    }

    /// Interior product `v ⨼ self`, contracting the first slot.
    pub fn interior(&self, v: &VectorField) -> Form {
        assert!(self.degree >= 1, "interior product of a 0-form");
        let mut out = Form::zero(self.degree - 1);
        for (idx, f) in &self.terms {
            for (r, c) in idx.iter().enumerate() {
                let vc = v.get(c);
                if vc.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(r);
                let coef = &vc * f;
                out.add_term(rest, if r % 2 == 0 { coef } else { -coef });
            }
        }
        out
    }

    /// Pullback along a map given by component expressions; coordinates absent
    /// from `map` are carried over unchanged.
    pub fn pullback(&self, map: &BTreeMap<CoordName, Expr>) -> Form {
        let mut out = Form::zero(self.degree);
        for (idx, f) in &self.terms {
            let mut acc = Form::scalar(f.subs(map));
            for c in idx {
                let one_form = match map.get(c) {
                    Some(e) => {
                        let mut df = Form::zero(1);
                        for v in e.variables() {
                            df.add_term(vec![v.clone()], e.diff(&v));
                        }
                        df
                    }
                    None => Form::d_coord(c.clone()),
                };
                acc = acc.wedge(&one_form);
            }
            out = out.add(&acc);
        }
        out
    }

    pub fn subs(&self, map: &BTreeMap<CoordName, Expr>) -> Form {
        let mut out = Form::zero(self.degree);
        for (idx, f) in &self.terms {
            out.add_term(idx.clone(), f.subs(map));
        }
        out
    }

    /// Coefficients evaluated at an exact point; zero entries are dropped.
    pub fn eval_coefficients(&self, env: &BTreeMap<CoordName, Rational>) -> Result<BTreeMap<Vec<CoordName>, Rational>, ExprError> {
        let mut out = BTreeMap::new();
        for (idx, c) in &self.terms {
            let v = c.eval_rational(env)?;
            if !v.is_zero() {
                out.insert(idx.clone(), v);
            }
        }
        Ok(out)
    }

    /// Value of a 0-form.
    pub fn as_scalar(&self) -> Expr {
        assert_eq!(self.degree, 0, "not a 0-form");
        self.terms.get(&Vec::new()).cloned().unwrap_or_default()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(idx, c)| {
                if idx.is_empty() {
                    format!("({c})")
                } else {
                    let d: Vec<String> = idx.iter().map(|v| format!("d{v}")).collect();
                    format!("({c}) {}", d.join("^"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CoordName::*;

    #[test]
    fn sorting_sign() {
        assert_eq!(sort_with_sign(&[2, 1, 3]), Some((-1, vec![1, 2, 3])));
        assert_eq!(sort_with_sign(&[3, 1, 2]), Some((1, vec![1, 2, 3])));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }

    #[test]
    fn d_squared_vanishes_on_a_generic_one_form() {
        let w = Form::monomial(&Expr::x(1).pow(2) * &Expr::y(1), &[FiberY(2)])
            .add(&Form::monomial(&Expr::x(2) * &Expr::y(2), &[BaseX(1)]));
        assert!(w.d().d().is_zero());
    }

    #[test]
    fn interior_of_volume_form() {
        let vol = Form::monomial(Expr::one(), &[BaseX(1), BaseX(2)]);
        let c = vol.interior(&VectorField::coordinate(BaseX(1)));
        assert_eq!(c, Form::d_coord(BaseX(2)));
        let c2 = vol.interior(&VectorField::coordinate(BaseX(2)));
        assert_eq!(c2, Form::d_coord(BaseX(1)).neg());
    }

    #[test]
    fn double_contraction_with_same_field_vanishes() {
        let w = Form::monomial(Expr::y(1), &[BaseX(1), BaseX(2), FiberY(1)]);
        let v = VectorField::from_components([(BaseX(1), Expr::x(2)), (FiberY(1), Expr::one()), (BaseX(2), Expr::y(1))]);
        assert!(w.interior(&v).interior(&v).is_zero());
    }

    #[test]
    fn bracket_examples() {
        let dx = VectorField::coordinate(BaseX(1));
        assert!(dx.bracket(&dx).is_zero());
        let xdx = VectorField::from_components([(BaseX(1), Expr::x(1))]);
        assert_eq!(xdx.bracket(&dx), dx.scale_expr(&Expr::from_int(-1)));
    }

    #[test]
    fn pullback_of_dx_under_scaling() {
        let map = BTreeMap::from([(BaseX(1), &Expr::from_int(3) * &Expr::x(1))]);
        let p = Form::d_coord(BaseX(1)).pullback(&map);
        assert_eq!(p, Form::monomial(Expr::from_int(3), &[BaseX(1)]));
    }
}
