use std::collections::BTreeMap;

use crate::forms::Form;
use crate::geobundle::{BundleChart, VectorFieldY};
use crate::linalg::{Mat, Scalar};
use crate::multiphase::MultiphaseSpace;
use crate::symexpr::{CoordName, Expr, Rational};
use crate::{Error, Result};

use super::{ga_act_fiber, ga_act_frame, lift_to_lvy, momentum_observable_lvy, soldering_form, wedge_power, FramePoint, GAElement, VVForm};

/// A point of `Z`: `Y^mu`, the multimomenta `p^i_A` (an `n x k` matrix) and `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZPoint<T> {
    pub y: Vec<T>,
    pub pm: Mat<T>,
    pub p: T,
}

/// Momenta of `φ_(B,λ)(w)`, with `det(π) π^-1` written as the adjugate:
/// `p^j_B = B^i_A π^A_B adj(π)^j_i`, `p = B^i_A π^A_k adj(π)^k_i + det(π) λ`.
pub fn phi_momenta<T: Scalar>(nn: &Mat<T>, kk: &Mat<T>, kn: &Mat<T>, b: &Mat<T>, lambda: &T) -> (Mat<T>, T) {
    let adj = nn.adjugate();
    // adj * B is n x k with entries adj^j_i B^i_A
    let ab = adj.mul(b);
    let pm = ab.mul(kk);
    let p = ab.mul(kn).trace().add(&nn.det().mul(lambda));
    (pm, p)
}

/// `ρ̂[w, (B, λ)]` in `Z` coordinates.
pub fn rho_hat(w: &FramePoint<Rational>, b: &Mat<Rational>, lambda: &Rational) -> Result<ZPoint<Rational>> {
    if w.nn.det() == <Rational as Scalar>::zero() {
        return Err(Error::Singular("pi^i_j"));
    }
    let (pm, p) = phi_momenta(&w.nn, &w.kk, &w.kn, b, lambda);
    Ok(ZPoint { y: w.y.clone(), pm, p })
}

fn to_expr(m: &Mat<Rational>) -> Mat<Expr> {
    m.map(|r| Expr::from_rational(r.clone()))
}

/// Symbolic map `φ_(B,λ)`: `Z` momentum coordinates as functions on `L_V Y`
/// (the `Y` coordinates are unchanged and omitted).
pub fn phi_map(chart: &BundleChart, b: &Mat<Rational>, lambda: &Rational) -> BTreeMap<CoordName, Expr> {
    let p = chart.frame_matrix();
    let (n, k) = (chart.n, chart.k);
    let (pm, ps) = phi_momenta(
        &p.block(0, 0, n, n),
        &p.block(n, n, k, k),
        &p.block(n, 0, k, n),
        &to_expr(b),
        &Expr::from_rational(lambda.clone()),
    );
    let mut out = BTreeMap::new();
    for j in 0..n {
        for a in 0..k {
            out.insert(CoordName::MomP(j as u8 + 1, a as u8 + 1), pm[(j, a)].clone());
        }
    }
    out.insert(CoordName::MomScalar, ps);
    out
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Components `V_I` of `V(B, λ)` on sorted value multi-indices of length `n`:
/// `V_(1..n) = λ/n!`, one fiber index `A` with base complement `j` gives
/// `(−1)^(n−1) (−1)^j B^j_A / n!`, two or more fiber indices give zero.
pub fn v_map(chart: &BundleChart, b: &Mat<Rational>, lambda: &Rational) -> BTreeMap<Vec<usize>, Expr> {
    let (n, k) = (chart.n, chart.k);
    let nf = Rational::from_integer(factorial(n).into());
    let mut out = BTreeMap::new();
    let base: Vec<usize> = (0..n).collect();
    out.insert(base.clone(), Expr::from_rational(lambda / &nf));
    for j in 0..n {
        let mut idx: Vec<usize> = base.iter().copied().filter(|m| *m != j).collect();
        let sign = if (n - 1 + j) % 2 == 0 { 1 } else { -1 };
        for a in 0..k {
            let v = &b[(j, a)] * Rational::from_integer(sign.into()) / &nf;
            idx.push(n + a);
            if v != <Rational as Scalar>::zero() {
                out.insert(idx.clone(), Expr::from_rational(v));
            }
            idx.pop();
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn same_at(lhs: &Form, rhs: &Form, env: &BTreeMap<CoordName, Rational>) -> Result<bool> {
    Ok(lhs.eval_coefficients(env)? == rhs.eval_coefficients(env)?)
}

/// `⟨Λ^n θ, V(B,λ)⟩` against `φ*Θ`, compared exactly at `w`.
pub fn pairing_check(w: &FramePoint<Rational>, b: &Mat<Rational>, lambda: &Rational) -> Result<bool> {
    let (lhs, rhs) = pairing_sides(&w.chart, b, lambda)?;
    same_at(&lhs, &rhs, &w.env())
}

/// Both sides of the pairing identity as symbolic forms on `L_V Y`.
pub fn pairing_sides(chart: &BundleChart, b: &Mat<Rational>, lambda: &Rational) -> Result<(Form, Form)> {
    let lhs = wedge_power(&soldering_form(chart), chart.n)?.pair(&v_map(chart, b, lambda));
    let rhs = MultiphaseSpace::new(*chart).theta.pullback(&phi_map(chart, b, lambda));
    Ok((lhs, rhs))
}

/// `φ*(J_Z(ξ))` against `⟨J_LVY(ξ) ∧ Λ^(n−1) θ, n V(B,λ)⟩`, compared exactly at `w`.
pub fn pullback_check(xi: &VectorFieldY, w: &FramePoint<Rational>, b: &Mat<Rational>, lambda: &Rational) -> Result<bool> {
    let (lhs, rhs) = pullback_sides(&w.chart, xi, b, lambda)?;
    same_at(&lhs, &rhs, &w.env())
}

pub fn pullback_sides(chart: &BundleChart, xi: &VectorFieldY, b: &Mat<Rational>, lambda: &Rational) -> Result<(Form, Form)> {
    let z = MultiphaseSpace::new(*chart);
    let lhs = z.momentum(xi)?.pullback(&phi_map(chart, b, lambda));
    let j = VVForm::from_functions(&momentum_observable_lvy(chart, xi)?);
    let nv: BTreeMap<Vec<usize>, Expr> =
        v_map(chart, b, lambda).into_iter().map(|(k, v)| (k, v.scale(&Rational::from_integer((chart.n as i64).into())))).collect();
    let rhs = j.wedge(&wedge_power(&soldering_form(chart), chart.n - 1)?)?.pair(&nv);
    Ok((lhs, rhs))
}

/// `φ_* ξ_LVY = ξ_Z ∘ φ`, component by component, exactly at `w`.
pub fn phi_pushforward_check(xi: &VectorFieldY, w: &FramePoint<Rational>, b: &Mat<Rational>, lambda: &Rational) -> Result<bool> {
    let chart = w.chart;
    if w.nn.det() == <Rational as Scalar>::zero() {
        return Err(Error::Singular("pi^i_j"));
    }
    let phi = phi_map(&chart, b, lambda);
    let xl = lift_to_lvy(&chart, xi)?;
    let xz = MultiphaseSpace::new(chart).lift(xi)?;
    let env = w.env();
    for c in chart.z_coords() {
        let comp = phi.get(&c).cloned().unwrap_or_else(|| Expr::var(c.clone()));
        let pushed = xl.apply(&comp);
        let target = xz.get(&c).subs(&phi);
        if pushed.eval_rational(&env)? != target.eval_rational(&env)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `{f∧Λ^mθ, g∧Λ^mθ} − {f,g}∧Λ^mθ − m d(f∧g∧Λ^(m−1)θ)` with the bracket
/// `−ξ ⨼ (ζ ⨼ (dθ ∧ Λ^mθ))`.
pub fn bracket_wedge_residual(chart: &BundleChart, xi: &VectorFieldY, zeta: &VectorFieldY, m: usize) -> Result<VVForm> {
    let th = soldering_form(chart);
    let dth = th.d();
    let (a, b) = (lift_to_lvy(chart, xi)?, lift_to_lvy(chart, zeta)?);
    let pm = wedge_power(&th, m)?;
    let lhs = dth.wedge(&pm)?.interior(&b).interior(&a).neg();
    let fg = VVForm::from_functions(&super::poisson_lvy(chart, xi, zeta)?);
    let mut rhs = fg.wedge(&pm)?;
    if m >= 1 {
        let f = VVForm::from_functions(&momentum_observable_lvy(chart, xi)?);
        let g = VVForm::from_functions(&momentum_observable_lvy(chart, zeta)?);
        let exact = f.wedge(&g)?.wedge(&wedge_power(&th, m - 1)?)?.d();
        rhs = rhs.add(&exact.scale(&Expr::from_int(m as i64)));
    }
    Ok(lhs.sub(&rhs))
}

pub fn bracket_wedge_rep_check(chart: &BundleChart, xi: &VectorFieldY, zeta: &VectorFieldY, m: usize) -> Result<bool> {
    Ok(bracket_wedge_residual(chart, xi, zeta, m)?.is_zero())
}

/// `ρ̂(w·g, g^-1·(B,λ)) = ρ̂(w, (B,λ))`.
pub fn orbit_invariance_check(w: &FramePoint<Rational>, b: &Mat<Rational>, lambda: &Rational, g: &GAElement<Rational>) -> Result<bool> {
    let (b2, l2) = ga_act_fiber(&g.inverse()?, b, lambda)?;
    Ok(rho_hat(&ga_act_frame(w, g)?, &b2, &l2)? == rho_hat(w, b, lambda)?)
}

/// `rank(N B K^-1) = rank(B)`.
pub fn rank_invariance_check(b: &Mat<Rational>, g: &GAElement<Rational>) -> Result<bool> {
    let ki = g.k.inverse().ok_or(Error::Singular("K"))?;
    Ok(g.n.mul(b).mul(&ki).rank() == b.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::VectorField;
    use crate::random::Sampler;
    use crate::symexpr::{int, parse_expr, rat};

    fn vf(pairs: &[(CoordName, &str)]) -> VectorFieldY {
        VectorField::from_components(pairs.iter().map(|(c, s)| (c.clone(), parse_expr(s, None).unwrap())))
    }

    #[test]
    fn rho_hat_at_identity_frame() {
        let c = BundleChart::new(2, 2).unwrap();
        let w = FramePoint::identity_at(c, vec![int(1); 4]);
        let z = rho_hat(&w, &Mat::zeros(2, 2), &int(1)).unwrap();
        assert_eq!(z.p, int(1));
        assert_eq!(z.pm, Mat::zeros(2, 2));
    }

    #[test]
    fn rho_hat_in_one_dimension() {
        let c = BundleChart::new(1, 1).unwrap();
        let w = FramePoint::new(c, vec![int(0), int(0)], Mat::from_rows(vec![vec![int(3)]]), Mat::from_rows(vec![vec![int(5)]]), Mat::from_rows(vec![vec![int(7)]])).unwrap();
        let b = Mat::from_rows(vec![vec![rat(1, 2)]]);
        let z = rho_hat(&w, &b, &int(2)).unwrap();
        // p^1_1 = B π^A_B, p = B π^A_1 + λ π
        assert_eq!(z.pm[(0, 0)], rat(5, 2));
        assert_eq!(z.p, rat(7, 2) + int(6));
    }

    #[test]
    fn v_components() {
        let c = BundleChart::new(2, 2).unwrap();
        let v = v_map(&c, &Mat::zeros(2, 2), &int(1));
        assert_eq!(v.len(), 1);
        assert_eq!(v[&vec![0, 1]], Expr::from_rational(rat(1, 2)));
        let c1 = BundleChart::new(1, 2).unwrap();
        let b = Mat::from_rows(vec![vec![int(4), int(-3)]]);
        let v = v_map(&c1, &b, &int(5));
        assert_eq!(v[&vec![0]], Expr::from_int(5));
        assert_eq!(v[&vec![1]], Expr::from_int(4));
        assert_eq!(v[&vec![2]], Expr::from_int(-3));
    }

    #[test]
    fn pairing_identity_low_dimension_symbolic() {
        let c = BundleChart::new(1, 1).unwrap();
        let (l, r) = pairing_sides(&c, &Mat::from_rows(vec![vec![rat(2, 3)]]), &rat(-1, 2)).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn pairing_and_pullback_identities() {
        let mut s = Sampler::new(21);
        for (n, k) in [(1, 1), (2, 2), (2, 1)] {
            let c = BundleChart::new(n, k).unwrap();
            for _ in 0..3 {
                let w = s.frame_point(&c);
                let b = s.rational_matrix(n, k);
                let l = s.rational();
                assert!(pairing_check(&w, &b, &l).unwrap());
                let xi = s.projectable_field(&c, 2);
                assert!(pullback_check(&xi, &w, &b, &l).unwrap(), "n={n} k={k} xi={xi}");
            }
        }
    }

    #[test]
    fn pushforward_intertwines_lifts() {
        let c = BundleChart::new(2, 2).unwrap();
        let mut s = Sampler::new(22);
        let rot = vf(&[(CoordName::BaseX(1), "x2"), (CoordName::BaseX(2), "-x1"), (CoordName::FiberY(1), "y2"), (CoordName::FiberY(2), "-y1")]);
        for xi in [vf(&[(CoordName::BaseX(1), "1")]), rot, s.projectable_field(&c, 2)] {
            let w = s.frame_point(&c);
            assert!(phi_pushforward_check(&xi, &w, &s.rational_matrix(2, 2), &s.rational()).unwrap());
        }
    }

    #[test]
    fn wedge_representation_bracket() {
        let c = BundleChart::new(2, 2).unwrap();
        let (dx, dy) = (vf(&[(CoordName::BaseX(1), "1")]), vf(&[(CoordName::FiberY(1), "1")]));
        for m in 0..=2 {
            assert!(bracket_wedge_rep_check(&c, &dx, &dy, m).unwrap(), "m={m}");
        }
        let mut s = Sampler::new(23);
        let (a, b) = (s.projectable_field(&c, 2), s.projectable_field(&c, 2));
        assert!(bracket_wedge_rep_check(&c, &a, &b, 1).unwrap());
    }

    #[test]
    fn orbit_and_rank_invariance() {
        let mut s = Sampler::new(24);
        for (n, k) in [(1, 1), (2, 2), (1, 3)] {
            let c = BundleChart::new(n, k).unwrap();
            for _ in 0..5 {
                let (w, g) = (s.frame_point(&c), s.ga_element(&c));
                let (b, l) = (s.rational_matrix(n, k), s.rational());
                assert!(orbit_invariance_check(&w, &b, &l, &g).unwrap());
                assert!(rank_invariance_check(&b, &g).unwrap());
            }
        }
    }

    #[test]
    fn rho_hat_is_injective_in_the_fiber() {
        let c = BundleChart::new(2, 2).unwrap();
        let mut s = Sampler::new(25);
        let w = s.frame_point(&c);
        let (b1, l1) = (s.rational_matrix(2, 2), s.rational());
        let b2 = b1.add(&Mat::from_fn(2, 2, |r, cc| if r == 0 && cc == 1 { int(1) } else { int(0) }));
        assert_ne!(rho_hat(&w, &b1, &l1).unwrap(), rho_hat(&w, &b2, &l1).unwrap());
        assert_ne!(rho_hat(&w, &b1, &l1).unwrap(), rho_hat(&w, &b1, &(&l1 + int(1))).unwrap());
    }
}
