//! The vertically adapted frame bundle `L_V Y`.
//!
//! Coframe coordinates form the block lower-triangular matrix
//! `P = [[pi^i_j, 0], [pi^A_j, pi^A_B]]`, and the soldering form is
//! `θ^mu = P^mu_nu dY^nu`. The lift of a projectable `xi` is the Hamiltonian
//! field of its tensorial function `P xi`.

mod assoc;
mod group;
mod vvform;

pub use assoc::*;
pub use group::*;
pub use vvform::*;

use std::collections::BTreeMap;

use crate::forms::{Form, VectorField};
use crate::geobundle::{components, lie_bracket, require_projectable, BundleChart, VectorFieldY};
use crate::symexpr::{CoordName, Expr, Rational};
use crate::{Error, Result};

/// The pulled-back soldering form `i*θ`.
pub fn soldering_form(chart: &BundleChart) -> VVForm {
    let p = chart.frame_matrix();
    let d = chart.dim();
    let comps = (0..d)
        .map(|mu| {
            let mut f = Form::zero(1);
            for nu in 0..d {
                f.add_term(vec![chart.ycoord(nu)], p[(mu, nu)].clone());
            }
            f
        })
        .collect();
    VVForm::from_vector(d, comps)
}

/// Degree-one tensorial observable, stored as its vector field on `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct T1Observable {
    pub chart: BundleChart,
    pub field: VectorFieldY,
}

impl T1Observable {
    /// Fails with "not in T¹_V" when a base component depends on the fiber.
    pub fn new(chart: BundleChart, field: VectorFieldY) -> Result<Self> {
        chart.check_y_field(&field)?;
        for i in 0..chart.n {
            let fi = field.get(&chart.ycoord(i));
            if chart.fiber_coords().iter().any(|y| !fi.diff(y).is_zero()) {
                return Err(Error::NotInT1(i + 1));
            }
        }
        Ok(T1Observable { chart, field })
    }

    /// The function `f^mu = P^mu_nu xi^nu` on `L_V Y`.
    pub fn values(&self) -> Vec<Expr> {
        self.chart.frame_matrix().mul_vec(&components(&self.chart, &self.field))
    }

    pub fn as_vvform(&self) -> VVForm {
        VVForm::from_functions(&self.values())
    }
}

/// Hamiltonian field of a T¹ observable: `Y^nu` components `xi^nu` and
/// `P^mu_lambda` components `-P^mu_nu d_lambda xi^nu`.
pub fn hamiltonian_solve_t1(f: &T1Observable) -> Result<VectorField> {
    let c = &f.chart;
    let xi = components(c, &f.field);
    let p = c.frame_matrix();
    let d = c.dim();
    let mut out = VectorField::zero();
    for (nu, e) in xi.iter().enumerate() {
        out.set(c.ycoord(nu), e.clone());
    }
    for mu in 0..d {
        for lam in 0..d {
            let Some(name) = c.frame_coord(mu, lam) else { continue };
            let y = c.ycoord(lam);
            let comp: Expr = (0..d).map(|nu| &p[(mu, nu)] * &xi[nu].diff(&y)).sum();
            out.set(name, -comp);
        }
    }
    Ok(out)
}

/// Canonical lift `xi_LVY`.
pub fn lift_to_lvy(chart: &BundleChart, xi: &VectorFieldY) -> Result<VectorField> {
    require_projectable(chart, xi)?;
    hamiltonian_solve_t1(&T1Observable::new(*chart, xi.clone())?)
}

/// `J(xi) = xi_LVY ⨼ i*θ`, as a vector of functions.
pub fn momentum_observable_lvy(chart: &BundleChart, xi: &VectorFieldY) -> Result<Vec<Expr>> {
    let lift = lift_to_lvy(chart, xi)?;
    let th = soldering_form(chart).interior(&lift);
    Ok((0..chart.dim()).map(|mu| th.function(&[mu])).collect())
}

/// Components `dJ^mu + X ⨼ dθ^mu` of the defining equation; all zero for a
/// Hamiltonian pair.
pub fn hamiltonian_residual_lvy(f: &T1Observable, x: &VectorField) -> Vec<Form> {
    let dth = soldering_form(&f.chart).d();
    f.values()
        .iter()
        .enumerate()
        .map(|(mu, v)| Form::scalar(v.clone()).d().add(&dth.component(&[mu]).interior(x)))
        .collect()
}

/// `{J(xi), J(zeta)}^mu = -xi_LVY ⨼ (zeta_LVY ⨼ dθ^mu)`.
pub fn poisson_lvy(chart: &BundleChart, xi: &VectorFieldY, zeta: &VectorFieldY) -> Result<Vec<Expr>> {
    let (a, b) = (lift_to_lvy(chart, xi)?, lift_to_lvy(chart, zeta)?);
    let w = soldering_form(chart).d().interior(&b).interior(&a).neg();
    Ok((0..chart.dim()).map(|mu| w.function(&[mu])).collect())
}

/// `{J(xi), J(zeta)} - J([xi, zeta])`, zero by closure.
pub fn bracket_defect_lvy(chart: &BundleChart, xi: &VectorFieldY, zeta: &VectorFieldY) -> Result<Vec<Expr>> {
    let br = lie_bracket(chart, xi, zeta)?;
    let lhs = poisson_lvy(chart, xi, zeta)?;
    let rhs = momentum_observable_lvy(chart, &br)?;
    Ok(lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect())
}

/// Evaluates `J(xi)` at `act(w, g)` and `g^-1 J(xi)(w)`; true when equal.
pub fn tensoriality_check(xi: &VectorFieldY, w: &FramePoint<Rational>, g: &GAElement<Rational>) -> Result<bool> {
    let j = momentum_observable_lvy(&w.chart, xi)?;
    let eval = |pt: &FramePoint<Rational>| -> Result<Vec<Rational>> {
        let env = pt.env();
        Ok(j.iter().map(|e| e.eval_rational(&env)).collect::<std::result::Result<_, _>>()?)
    };
    let moved = eval(&ga_act_frame(w, g)?)?;
    let expected = g.inverse()?.matrix().mul_vec(&eval(w)?);
    Ok(moved == expected)
}

/// Coordinate map of the lift of the linear automorphism `Y -> M Y` for a
/// block lower-triangular `M`: `Y -> M Y`, `P -> P M^-1`.
pub fn linear_automorphism_lift(chart: &BundleChart, m: &GAElement<Rational>) -> Result<BTreeMap<CoordName, Expr>> {
    let mm = m.matrix().map(|r| Expr::from_rational(r.clone()));
    let mi = m.inverse()?.matrix().map(|r| Expr::from_rational(r.clone()));
    let d = chart.dim();
    let y: Vec<Expr> = (0..d).map(|mu| Expr::var(chart.ycoord(mu))).collect();
    let mut map = BTreeMap::new();
    for (mu, e) in mm.mul_vec(&y).into_iter().enumerate() {
        map.insert(chart.ycoord(mu), e);
    }
    let pm = chart.frame_matrix().mul(&mi);
    for mu in 0..d {
        for nu in 0..d {
            if let Some(name) = chart.frame_coord(mu, nu) {
                map.insert(name, pm[(mu, nu)].clone());
            }
        }
    }
    Ok(map)
}

/// True when the soldering form is invariant under the lifted automorphism.
pub fn soldering_invariance_check(chart: &BundleChart, m: &GAElement<Rational>) -> Result<bool> {
    let map = linear_automorphism_lift(chart, m)?;
    let th = soldering_form(chart);
    Ok((0..chart.dim()).all(|mu| th.component(&[mu]).pullback(&map) == th.component(&[mu])))
}

#[cfg(test)]
mod tests {
    use crate::linalg::Mat;
    use super::*;
    use crate::random::Sampler;
    use crate::symexpr::parse_expr;
    use CoordName::*;

    fn vf(pairs: &[(CoordName, &str)]) -> VectorFieldY {
        VectorField::from_components(pairs.iter().map(|(c, s)| (c.clone(), parse_expr(s, None).unwrap())))
    }

    #[test]
    fn soldering_form_coefficients() {
        let c = BundleChart::new(1, 1).unwrap();
        let th = soldering_form(&c);
        assert_eq!(th.component(&[0]), Form::monomial(Expr::var(FrameNN(1, 1)), &[BaseX(1)]));
        let expected = Form::monomial(Expr::var(FrameKN(1, 1)), &[BaseX(1)])
            .add(&Form::monomial(Expr::var(FrameKK(1, 1)), &[FiberY(1)]));
        assert_eq!(th.component(&[1]), expected);
        // no dπ terms: contraction with a frame direction vanishes
        assert!(th.interior(&VectorField::coordinate(FrameKK(1, 1))).is_zero());
    }

    #[test]
    fn dtheta_matches_structure_form() {
        let c = BundleChart::new(2, 2).unwrap();
        let dth = soldering_form(&c).d();
        let p = c.frame_matrix();
        for mu in 0..4 {
            let mut oracle = Form::zero(2);
            for nu in 0..4 {
                if let Some(name) = c.frame_coord(mu, nu) {
                    oracle = oracle.add(&Form::d_coord(name).wedge(&Form::d_coord(c.ycoord(nu))));
                } else {
                    assert!(p[(mu, nu)].is_zero());
                }
            }
            assert_eq!(dth.component(&[mu]), oracle);
        }
    }

    #[test]
    fn hamiltonian_field_examples() {
        let c = BundleChart::new(2, 2).unwrap();
        let dx = vf(&[(BaseX(1), "1")]);
        assert_eq!(lift_to_lvy(&c, &dx).unwrap(), dx);
        assert!(matches!(T1Observable::new(c, vf(&[(BaseX(2), "y1")])), Err(Error::NotInT1(2))));
        let rot = vf(&[(BaseX(1), "x2"), (BaseX(2), "-x1"), (FiberY(1), "y2"), (FiberY(2), "-y1")]);
        let f = T1Observable::new(c, rot).unwrap();
        let x = hamiltonian_solve_t1(&f).unwrap();
        assert_eq!(x.get(&FrameNN(1, 1)), Expr::var(FrameNN(1, 2)));
        assert_eq!(x.get(&FrameKK(2, 1)), Expr::var(FrameKK(2, 2)));
        assert!(hamiltonian_residual_lvy(&f, &x).iter().all(Form::is_zero));
    }

    #[test]
    fn momentum_examples() {
        let c = BundleChart::new(2, 2).unwrap();
        assert!(momentum_observable_lvy(&c, &VectorField::zero()).unwrap().iter().all(Expr::is_zero));
        let rot = vf(&[(BaseX(1), "x2"), (BaseX(2), "-x1"), (FiberY(1), "y2"), (FiberY(2), "-y1")]);
        let j = momentum_observable_lvy(&c, &rot).unwrap();
        assert_eq!(j[0], parse_expr("x2*pi_1_1 - x1*pi_1_2", None).unwrap());
        assert_eq!(j[2], parse_expr("x2*piA_1_x1 - x1*piA_1_x2 + y2*piA_1_1 - y1*piA_1_2", None).unwrap());
    }

    #[test]
    fn poisson_examples() {
        let c = BundleChart::new(1, 1).unwrap();
        let (dx, xdx) = (vf(&[(BaseX(1), "1")]), vf(&[(BaseX(1), "x1")]));
        assert!(poisson_lvy(&c, &xdx, &xdx).unwrap().iter().all(Expr::is_zero));
        assert_eq!(poisson_lvy(&c, &dx, &xdx).unwrap(), momentum_observable_lvy(&c, &dx).unwrap());
    }

    #[test]
    fn lift_is_functorial() {
        let c = BundleChart::new(2, 1).unwrap();
        let mut s = Sampler::new(11);
        for _ in 0..5 {
            let (a, b) = (s.projectable_field(&c, 2), s.projectable_field(&c, 2));
            let lhs = lift_to_lvy(&c, &a.bracket(&b)).unwrap();
            let rhs = lift_to_lvy(&c, &a).unwrap().bracket(&lift_to_lvy(&c, &b).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn tensoriality() {
        let c = BundleChart::new(2, 2).unwrap();
        let mut s = Sampler::new(12);
        let w = s.frame_point(&c);
        assert!(tensoriality_check(&vf(&[(BaseX(1), "1")]), &w, &GAElement::identity(&c)).unwrap());
        let g = GAElement::new(s.invertible_matrix(2), Mat::identity(2), Mat::zeros(2, 2)).unwrap();
        assert!(tensoriality_check(&vf(&[(BaseX(1), "1")]), &w, &g).unwrap());
        for _ in 0..5 {
            let xi = s.projectable_field(&c, 2);
            assert!(tensoriality_check(&xi, &s.frame_point(&c), &s.ga_element(&c)).unwrap());
        }
    }

    #[test]
    fn soldering_form_invariance() {
        let c = BundleChart::new(2, 2).unwrap();
        let mut s = Sampler::new(13);
        for _ in 0..3 {
            assert!(soldering_invariance_check(&c, &s.ga_element(&c)).unwrap());
        }
    }
}
