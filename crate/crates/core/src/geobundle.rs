//! The configuration bundle `Y = R^n x R^k -> X = R^n` in adapted coordinates.
//!
//! Combined indices `mu` run over `0..n+k`: `mu < n` is the base coordinate
//! `x^(mu+1)` and `mu >= n` the fiber coordinate `y^(mu-n+1)`.

use std::collections::BTreeMap;

use crate::flows::{integrate_rk4, FieldSpec};
use crate::forms::VectorField;
use crate::linalg::Mat;
use crate::symexpr::{CoordName, Expr};
use crate::{Error, Result};

/// A projectable-or-not vector field on `Y`; the same sparse representation
/// is used on `Z` and `L_V Y`.
pub type VectorFieldY = VectorField;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BundleChart {
    pub n: usize,
    pub k: usize,
}

impl BundleChart {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 || n + k > 12 {
            return Err(Error::ChartMismatch(format!("unsupported dimensions n={n}, k={k}")));
        }
        Ok(BundleChart { n, k })
    }

    pub fn dim(&self) -> usize {
        self.n + self.k
    }

    /// Coordinate `Y^mu`.
    pub fn ycoord(&self, mu: usize) -> CoordName {
        if mu < self.n {
            CoordName::BaseX(mu as u8 + 1)
        } else {
            CoordName::FiberY((mu - self.n) as u8 + 1)
        }
    }

    pub fn is_base(&self, mu: usize) -> bool {
        mu < self.n
    }

    pub fn base_coords(&self) -> Vec<CoordName> {
        (0..self.n).map(|m| self.ycoord(m)).collect()
    }

    pub fn fiber_coords(&self) -> Vec<CoordName> {
        (self.n..self.dim()).map(|m| self.ycoord(m)).collect()
    }

    pub fn y_coords(&self) -> Vec<CoordName> {
        (0..self.dim()).map(|m| self.ycoord(m)).collect()
    }

    /// Momentum coordinates `p^i_A` then `p`.
    pub fn momentum_coords(&self) -> Vec<CoordName> {
        let mut out = Vec::with_capacity(self.n * self.k + 1);
        for i in 1..=self.n {
            for a in 1..=self.k {
                out.push(CoordName::MomP(i as u8, a as u8));
            }
        }
        out.push(CoordName::MomScalar);
        out
    }

    pub fn z_coords(&self) -> Vec<CoordName> {
        let mut out = self.y_coords();
        out.extend(self.momentum_coords());
        out
    }

    /// Coframe coordinate `P^mu_nu`, or `None` for the structurally zero
    /// block `pi^i_A`.
    pub fn frame_coord(&self, mu: usize, nu: usize) -> Option<CoordName> {
        let (n, b) = (self.n, |m: usize| m < self.n);
        match (b(mu), b(nu)) {
            (true, true) => Some(CoordName::FrameNN(mu as u8 + 1, nu as u8 + 1)),
            (true, false) => None,
            (false, true) => Some(CoordName::FrameKN((mu - n) as u8 + 1, nu as u8 + 1)),
            (false, false) => Some(CoordName::FrameKK((mu - n) as u8 + 1, (nu - n) as u8 + 1)),
        }
    }

    pub fn frame_coords(&self) -> Vec<CoordName> {
        let d = self.dim();
        (0..d).flat_map(|mu| (0..d).filter_map(move |nu| self.frame_coord(mu, nu))).collect()
    }

    pub fn lvy_coords(&self) -> Vec<CoordName> {
        let mut out = self.y_coords();
        out.extend(self.frame_coords());
        out
    }

    /// The symbolic coframe matrix `P` on `L_V Y`.
    pub fn frame_matrix(&self) -> Mat<Expr> {
        let d = self.dim();
        Mat::from_fn(d, d, |mu, nu| self.frame_coord(mu, nu).map(Expr::var).unwrap_or_default())
    }

    /// Checks that all coordinates of `v` live on `Y` of this chart.
    pub fn check_y_field(&self, v: &VectorFieldY) -> Result<()> {
        let ys = self.y_coords();
        for (c, e) in v.components() {
            if !ys.contains(c) {
                return Err(Error::ChartMismatch(format!("component along {c}")));
            }
            if let Some(bad) = e.variables().into_iter().find(|u| !ys.contains(u) && !matches!(u, CoordName::Param(_))) {
                return Err(Error::ChartMismatch(format!("coefficient depends on {bad}")));
            }
        }
        Ok(())
    }
}

/// Field components `xi^mu` in combined-index order.
pub fn components(chart: &BundleChart, v: &VectorFieldY) -> Vec<Expr> {
    (0..chart.dim()).map(|mu| v.get(&chart.ycoord(mu))).collect()
}

pub fn from_components(chart: &BundleChart, comps: &[Expr]) -> VectorFieldY {
    VectorField::from_components(comps.iter().enumerate().map(|(mu, e)| (chart.ycoord(mu), e.clone())))
}

pub fn lie_bracket(chart: &BundleChart, v: &VectorFieldY, w: &VectorFieldY) -> Result<VectorFieldY> {
    chart.check_y_field(v)?;
    chart.check_y_field(w)?;
    Ok(v.bracket(w))
}

pub fn is_projectable(chart: &BundleChart, v: &VectorFieldY) -> bool {
    chart
        .base_coords()
        .iter()
        .all(|x| chart.fiber_coords().iter().all(|y| v.get(x).diff(y).is_zero()))
}

pub fn require_projectable(chart: &BundleChart, v: &VectorFieldY) -> Result<()> {
    chart.check_y_field(v)?;
    if is_projectable(chart, v) {
        Ok(())
    } else {
        Err(Error::NotProjectable)
    }
}

/// The base field `v_` with `v_ o pi = pi_* o v`.
pub fn base_pushforward(chart: &BundleChart, v: &VectorFieldY) -> Result<VectorFieldY> {
    require_projectable(chart, v)?;
    let base = chart.base_coords();
    Ok(v.restrict(|c| base.contains(c)))
}

/// Integrates the flow of `v` on `Y` and of its base field on `X` from `pt`
/// and returns the largest base-coordinate discrepancy over all samples.
pub fn flow_commute_check(chart: &BundleChart, v: &VectorFieldY, pt: &[f64], t_max: f64, dt: f64) -> Result<f64> {
    let base = base_pushforward(chart, v)?;
    let ys = chart.y_coords();
    let xs = chart.base_coords();
    let up = integrate_rk4(&FieldSpec::new(v, &ys)?, pt, t_max, dt, None)?;
    let down = integrate_rk4(&FieldSpec::new(&base, &xs)?, &pt[..chart.n], t_max, dt, None)?;
    let mut worst: f64 = 0.0;
    for (a, b) in up.states.iter().zip(&down.states) {
        for i in 0..chart.n {
            worst = worst.max((a[i] - b[i]).abs());
        }
    }
    Ok(worst)
}

/// True when the map `Y -> Y` (components given for every `Y^mu`) sends
/// vertical vectors to vertical vectors.
pub fn verticality_preservation_check(chart: &BundleChart, map: &BTreeMap<CoordName, Expr>) -> Result<bool> {
    let ys = chart.y_coords();
    let comp = |c: &CoordName| map.get(c).cloned().unwrap_or_else(|| Expr::var(c.clone()));
    let jac = Mat::from_fn(ys.len(), ys.len(), |r, c| comp(&ys[r]).diff(&ys[c]));
    if jac.det().is_zero() {
        return Err(Error::Singular("jacobian of the map"));
    }
    Ok((0..chart.n).all(|i| (chart.n..chart.dim()).all(|a| jac[(i, a)].is_zero())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;
    use CoordName::*;

    fn vf(pairs: &[(CoordName, &str)]) -> VectorFieldY {
        VectorField::from_components(pairs.iter().map(|(c, s)| (c.clone(), parse_expr(s, None).unwrap())))
    }

    #[test]
    fn chart_inventories() {
        let c = BundleChart::new(2, 3).unwrap();
        assert_eq!(c.frame_coords().len(), 4 + 9 + 6);
        assert_eq!(c.momentum_coords().len(), 7);
        assert_eq!(c.ycoord(2), FiberY(1));
        assert_eq!(c.frame_coord(0, 3), None);
        assert!(BundleChart::new(0, 1).is_err());
    }

    #[test]
    fn bracket_examples() {
        let c = BundleChart::new(1, 1).unwrap();
        let dx = vf(&[(BaseX(1), "1")]);
        let xdx = vf(&[(BaseX(1), "x1")]);
        assert!(lie_bracket(&c, &dx, &dx).unwrap().is_zero());
        assert_eq!(lie_bracket(&c, &xdx, &dx).unwrap(), vf(&[(BaseX(1), "-1")]));
        let alien = vf(&[(BaseX(1), "p")]);
        assert!(lie_bracket(&c, &alien, &dx).is_err());
    }

    #[test]
    fn projectability() {
        let c = BundleChart::new(2, 2).unwrap();
        assert!(is_projectable(&c, &vf(&[(BaseX(1), "1")])));
        assert!(!is_projectable(&c, &vf(&[(BaseX(1), "y1")])));
        let rot = vf(&[(BaseX(1), "x2"), (BaseX(2), "-x1"), (FiberY(1), "y2"), (FiberY(2), "-y1")]);
        assert!(is_projectable(&c, &rot));
        assert_eq!(base_pushforward(&c, &rot).unwrap(), vf(&[(BaseX(1), "x2"), (BaseX(2), "-x1")]));
        assert!(base_pushforward(&c, &vf(&[(FiberY(2), "x1*y1")])).unwrap().is_zero());
        assert!(matches!(base_pushforward(&c, &vf(&[(BaseX(1), "y1")])), Err(Error::NotProjectable)));
    }

    #[test]
    fn flow_commutation() {
        let c = BundleChart::new(1, 1).unwrap();
        let d = flow_commute_check(&c, &vf(&[(BaseX(1), "1")]), &[0.3, -0.2], 1.0, 1e-2).unwrap();
        assert_eq!(d, 0.0);
        let d = flow_commute_check(&c, &vf(&[(BaseX(1), "x1"), (FiberY(1), "y1")]), &[1.0, 1.0], 1.0, 1e-3).unwrap();
        assert!(d <= 1e-9);
    }

    #[test]
    fn verticality() {
        let c = BundleChart::new(1, 1).unwrap();
        assert!(verticality_preservation_check(&c, &BTreeMap::new()).unwrap());
        let swap = BTreeMap::from([(BaseX(1), Expr::y(1)), (FiberY(1), Expr::x(1))]);
        assert!(!verticality_preservation_check(&c, &swap).unwrap());
        let fibered = BTreeMap::from([(FiberY(1), parse_expr("2*y1 + x1^2", None).unwrap())]);
        assert!(verticality_preservation_check(&c, &fibered).unwrap());
        let collapse = BTreeMap::from([(FiberY(1), Expr::x(1))]);
        assert!(verticality_preservation_check(&c, &collapse).is_err());
    }
}
