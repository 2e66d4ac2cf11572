//! The multiphase space `Z` with canonical form `Theta`, lifted generators and
//! momentum observables.
//!
//! Conventions: `d^(n-1)x_i = d_i ⨼ d^n x` and `d^(n-2)x_ij = d_j ⨼ d_i ⨼ d^n x`.
//! The Poisson bracket of momentum observables is `-xi_Z ⨼ (zeta_Z ⨼ dTheta)`.

use std::collections::BTreeMap;

use crate::forms::{Form, VectorField};
use crate::geobundle::{lie_bracket, require_projectable, BundleChart, VectorFieldY};
use crate::linalg::Mat;
use crate::symexpr::{CoordName, Expr, Rational};
use crate::Result;

/// Which canonical form to build. The flipped variant negates the `p^i_A`
/// terms and exists so that identity checks can be shown to fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ThetaVariant {
    #[default]
    Canonical,
    FlippedMomentumSign,
}

/// `d^n x`.
pub fn volume(chart: &BundleChart) -> Form {
    Form::monomial(Expr::one(), &chart.base_coords())
}

/// `d^(n-1) x_i` for 1-based `i`.
pub fn volume_i(chart: &BundleChart, i: usize) -> Form {
    volume(chart).interior(&VectorField::coordinate(CoordName::BaseX(i as u8)))
}

/// `d^(n-2) x_ij` for 1-based `i, j`; requires `n >= 2`.
pub fn volume_ij(chart: &BundleChart, i: usize, j: usize) -> Form {
    volume_i(chart, i).interior(&VectorField::coordinate(CoordName::BaseX(j as u8)))
}

pub fn theta_z(chart: &BundleChart, variant: ThetaVariant) -> Form {
    let sign = match variant {
        ThetaVariant::Canonical => Expr::one(),
        ThetaVariant::FlippedMomentumSign => Expr::from_int(-1),
    };
    let mut theta = volume(chart).scale(&Expr::var(CoordName::MomScalar));
    for i in 1..=chart.n {
        let vi = volume_i(chart, i);
        for a in 1..=chart.k {
            let coef = &sign * &Expr::var(CoordName::MomP(i as u8, a as u8));
            let term = Form::d_coord(CoordName::FiberY(a as u8)).wedge(&vi).scale(&coef);
            theta = theta.add(&term);
        }
    }
    theta
}

pub fn exterior_derivative(w: &Form) -> Form {
    w.d()
}

/// `v ⨼ w`; a 0-form contracts to the zero form of degree 0.
pub fn interior_product(v: &VectorField, w: &Form) -> Form {
    if w.degree() == 0 {
        return Form::zero(0);
    }
    w.interior(v)
}

/// The multiphase space of a chart with its canonical form and `dTheta`.
#[derive(Clone, Debug)]
pub struct MultiphaseSpace {
    pub chart: BundleChart,
    pub theta: Form,
    pub dtheta: Form,
}

impl MultiphaseSpace {
    pub fn new(chart: BundleChart) -> Self {
        Self::with_variant(chart, ThetaVariant::Canonical)
    }

    pub fn with_variant(chart: BundleChart, variant: ThetaVariant) -> Self {
        let theta = theta_z(&chart, variant);
        let dtheta = theta.d();
        MultiphaseSpace { chart, theta, dtheta }
    }

    /// Canonical lift `xi_Z` of a projectable field, in the closed form of the
    /// momentum-space components.
    pub fn lift(&self, xi: &VectorFieldY) -> Result<VectorField> {
        let c = &self.chart;
        require_projectable(c, xi)?;
        let x = |i: usize| CoordName::BaseX(i as u8);
        let y = |a: usize| CoordName::FiberY(a as u8);
        let pp = |i: usize, a: usize| Expr::var(CoordName::MomP(i as u8, a as u8));
        let fx = |i: usize| xi.get(&x(i));
        let fy = |a: usize| xi.get(&y(a));
        let mut out = xi.clone();
        let div: Expr = (1..=c.n).map(|j| fx(j).diff(&x(j))).sum();
        for i in 1..=c.n {
            for a in 1..=c.k {
                let mut comp = -(&pp(i, a) * &div);
                for j in 1..=c.n {
                    comp = &comp + &(&pp(j, a) * &fx(i).diff(&x(j)));
                }
                for b in 1..=c.k {
                    comp = &comp - &(&pp(i, b) * &fy(b).diff(&y(a)));
                }
                out.set(CoordName::MomP(i as u8, a as u8), comp);
            }
        }
        let mut pcomp = &Expr::var(CoordName::MomScalar) * &div;
        for i in 1..=c.n {
            for a in 1..=c.k {
                pcomp = &pcomp + &(&pp(i, a) * &fy(a).diff(&x(i)));
            }
        }
        out.set(CoordName::MomScalar, -pcomp);
        Ok(out)
    }

    /// `J_Z(xi) = xi_Z ⨼ Theta`.
    pub fn momentum(&self, xi: &VectorFieldY) -> Result<Form> {
        Ok(interior_product(&self.lift(xi)?, &self.theta))
    }

    /// The coordinate expression
    /// `(p^i_A xi^A + p xi^i) d^(n-1)x_i - p^i_A xi^j dy^A ∧ d^(n-2)x_ij`.
    pub fn momentum_local(&self, xi: &VectorFieldY) -> Result<Form> {
        let c = &self.chart;
        require_projectable(c, xi)?;
        let p = Expr::var(CoordName::MomScalar);
        let pp = |i: usize, a: usize| Expr::var(CoordName::MomP(i as u8, a as u8));
        let mut out = Form::zero(c.n - 1);
        for i in 1..=c.n {
            let mut coef = &p * &xi.get(&CoordName::BaseX(i as u8));
            for a in 1..=c.k {
                coef = &coef + &(&pp(i, a) * &xi.get(&CoordName::FiberY(a as u8)));
            }
            out = out.add(&volume_i(c, i).scale(&coef));
            if c.n >= 2 {
                for j in 1..=c.n {
                    let xj = xi.get(&CoordName::BaseX(j as u8));
                    if i == j || xj.is_zero() {
                        continue;
                    }
                    for a in 1..=c.k {
                        let t = Form::d_coord(CoordName::FiberY(a as u8)).wedge(&volume_ij(c, i, j));
                        out = out.sub(&t.scale(&(&pp(i, a) * &xj)));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `{J(xi), J(zeta)} = -xi_Z ⨼ (zeta_Z ⨼ dTheta)`.
    pub fn poisson(&self, xi: &VectorFieldY, zeta: &VectorFieldY) -> Result<Form> {
        let (a, b) = (self.lift(xi)?, self.lift(zeta)?);
        Ok(self.dtheta.interior(&b).interior(&a).neg())
    }

    /// `{J(xi), J(zeta)} - J([xi, zeta])`.
    pub fn bracket_defect(&self, xi: &VectorFieldY, zeta: &VectorFieldY) -> Result<Form> {
        let br = lie_bracket(&self.chart, xi, zeta)?;
        Ok(self.poisson(xi, zeta)?.sub(&self.momentum(&br)?))
    }

    /// The exact term `-d(xi_Z ⨼ zeta_Z ⨼ Theta)` predicted for the defect.
    pub fn exact_term(&self, xi: &VectorFieldY, zeta: &VectorFieldY) -> Result<Form> {
        let (a, b) = (self.lift(xi)?, self.lift(zeta)?);
        if self.theta.degree() < 2 {
            return Ok(Form::zero(self.chart.n - 1));
        }
        Ok(self.theta.interior(&b).interior(&a).d().neg())
    }

    /// Residual `dJ(xi) + xi_Z ⨼ dTheta` of the defining equation.
    pub fn hamiltonian_residual(&self, xi: &VectorFieldY) -> Result<Form> {
        let j = self.momentum(xi)?;
        Ok(j.d().add(&self.dtheta.interior(&self.lift(xi)?)))
    }

    /// Rank of `v -> v ⨼ dTheta` on coordinate fields at a rational point.
    pub fn dtheta_rank_at(&self, pt: &BTreeMap<CoordName, Rational>) -> Result<usize> {
        let coords = self.chart.z_coords();
        let contractions: Vec<Form> =
            coords.iter().map(|c| self.dtheta.interior(&VectorField::coordinate(c.clone()))).collect();
        let mut basis: Vec<Vec<CoordName>> = contractions.iter().flat_map(|f| f.terms().map(|(i, _)| i.clone())).collect();
        basis.sort();
        basis.dedup();
        let mut rows = Vec::with_capacity(coords.len());
        for f in &contractions {
            let row = basis.iter().map(|b| f.coefficient(b).eval_rational(pt)).collect::<std::result::Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        if basis.is_empty() {
            return Ok(0);
        }
        Ok(Mat::from_rows(rows).rank())
    }
}
