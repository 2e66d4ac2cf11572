use std::collections::BTreeMap;

use crate::forms::{sort_with_sign, Form, VectorField};
use crate::symexpr::{CoordName, Expr};
use crate::{Error, Result};

/// A differential form with values in `Λ^m R^(n+k)`, keyed by strictly
/// increasing value multi-indices (combined indices `0..n+k`).
///
/// The product is `α ∧ β = (α^I ∧ β^J) R_I ∧ R_J`, with value indices
/// re-sorted and the permutation sign absorbed into the coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct VVForm {
    dim: usize,
    degree: usize,
    vdeg: usize,
    comps: BTreeMap<Vec<usize>, Form>,
}

impl VVForm {
    pub fn zero(dim: usize, degree: usize, vdeg: usize) -> Self {
        VVForm { dim, degree, vdeg, comps: BTreeMap::new() }
    }

    /// The constant `1` in `Λ^0`.
    pub fn unit(dim: usize) -> Self {
        let mut out = VVForm::zero(dim, 0, 0);
        out.add_component(Vec::new(), Form::scalar(Expr::one()));
        out
    }

    /// `sum_mu w[mu] R_mu`.
    pub fn from_vector(dim: usize, w: Vec<Form>) -> Self {
        assert_eq!(w.len(), dim, "one component per value index");
        let degree = w.first().map_or(0, Form::degree);
        let mut out = VVForm::zero(dim, degree, 1);
        for (mu, f) in w.into_iter().enumerate() {
            out.add_component(vec![mu], f);
        }
        out
    }

    /// Vector of functions, as a value-degree-one 0-form.
    pub fn from_functions(f: &[Expr]) -> Self {
        VVForm::from_vector(f.len(), f.iter().map(|e| Form::scalar(e.clone())).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn value_degree(&self) -> usize {
        self.vdeg
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Form)> {
        self.comps.iter()
    }

    /// Component along the sorted value index `idx`.
    pub fn component(&self, idx: &[usize]) -> Form {
        self.comps.get(idx).cloned().unwrap_or_else(|| Form::zero(self.degree))
    }

    /// Scalar value of a 0-form component.
    pub fn function(&self, idx: &[usize]) -> Expr {
        self.component(idx).as_scalar()
    }

    pub fn add_component(&mut self, idx: Vec<usize>, f: Form) {
        assert_eq!(idx.len(), self.vdeg, "value degree mismatch");
        assert_eq!(f.degree(), self.degree, "form degree mismatch");
        let Some((sign, sorted)) = sort_with_sign(&idx) else {
            return;
        };
        let f = if sign < 0 { f.neg() } else { f };
        let v = match self.comps.remove(&sorted) {
            Some(old) => old.add(&f),
            None => f,
        };
        if !v.is_zero() {
            self.comps.insert(sorted, v);
        }
    }

    fn map(&self, degree: usize, f: impl Fn(&Form) -> Form) -> VVForm {
        let mut out = VVForm::zero(self.dim, degree, self.vdeg);
        for (i, c) in &self.comps {
            out.add_component(i.clone(), f(c));
        }
        out
    }

    pub fn add(&self, o: &VVForm) -> VVForm {
        assert_eq!((self.degree, self.vdeg), (o.degree, o.vdeg), "adding mismatched vector-valued forms");
        let mut out = self.clone();
        for (i, c) in &o.comps {
            out.add_component(i.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> VVForm {
        self.map(self.degree, Form::neg)
    }

    pub fn sub(&self, o: &VVForm) -> VVForm {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Expr) -> VVForm {
        self.map(self.degree, |f| f.scale(s))
    }

    pub fn d(&self) -> VVForm {
        self.map(self.degree + 1, Form::d)
    }

    pub fn interior(&self, v: &VectorField) -> VVForm {
        assert!(self.degree >= 1, "interior product of a 0-form");
        self.map(self.degree - 1, |f| f.interior(v))
    }

    pub fn subs(&self, map: &BTreeMap<CoordName, Expr>) -> VVForm {
        self.map(self.degree, |f| f.subs(map))
    }

    pub fn wedge(&self, o: &VVForm) -> Result<VVForm> {
        let vdeg = self.vdeg + o.vdeg;
        if vdeg > self.dim {
            return Err(Error::ValueDegreeOverflow(vdeg, self.dim));
        }
        let mut out = VVForm::zero(self.dim, self.degree + o.degree, vdeg);
        for (i, a) in &self.comps {
            for (j, b) in &o.comps {
                if i.iter().any(|m| j.contains(m)) {
                    continue;
                }
                let mut idx = i.clone();
                idx.extend(j.iter().copied());
                out.add_component(idx, a.wedge(b));
            }
        }
        Ok(out)
    }

    /// `⟨self, V⟩ = sum_I self^I V_I` over sorted `I`.
    pub fn pair(&self, v: &BTreeMap<Vec<usize>, Expr>) -> Form {
        let mut out = Form::zero(self.degree);
        for (i, c) in &self.comps {
            if let Some(vi) = v.get(i) {
                out = out.add(&c.scale(vi));
            }
        }
        out
    }
}

/// `Λ^m ω = ω ∧ ... ∧ ω` (`m` factors); `m = 0` gives the unit.
pub fn wedge_power(w: &VVForm, m: usize) -> Result<VVForm> {
    if w.vdeg * m > w.dim {
        return Err(Error::ValueDegreeOverflow(w.vdeg * m, w.dim));
    }
    let mut acc = VVForm::unit(w.dim);
    for _ in 0..m {
        acc = acc.wedge(w)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use CoordName::*;

    #[test]
    fn value_indices_anticommute() {
        let a = VVForm::from_functions(&[Expr::x(1), Expr::zero()]);
        let b = VVForm::from_functions(&[Expr::zero(), Expr::y(1)]);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        assert_eq!(ab, ba.neg());
        assert_eq!(ab.function(&[0, 1]), &Expr::x(1) * &Expr::y(1));
        assert!(ab.wedge(&a).is_err());
    }

    #[test]
    fn first_power_is_identity_and_zeroth_is_unit() {
        let w = VVForm::from_vector(2, vec![Form::d_coord(BaseX(1)), Form::d_coord(FiberY(1))]);
        assert_eq!(wedge_power(&w, 1).unwrap(), w);
        assert_eq!(wedge_power(&w, 0).unwrap(), VVForm::unit(2));
        assert!(wedge_power(&w, 3).is_err());
    }
}
