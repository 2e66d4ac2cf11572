use std::collections::BTreeMap;

use crate::geobundle::BundleChart;
use crate::linalg::{Mat, Scalar};
use crate::symexpr::{CoordName, Rational};
use crate::{Error, Result};

/// A point of `L_V Y`: base and fiber coordinates plus the coframe blocks
/// `pi^i_j = e^i(d/dx^j)`, `pi^A_B = eps^A(d/dy^B)`, `pi^A_j = eps^A(d/dx^j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FramePoint<T> {
    pub chart: BundleChart,
    /// `Y^mu` in combined-index order.
    pub y: Vec<T>,
    pub nn: Mat<T>,
    pub kk: Mat<T>,
    pub kn: Mat<T>,
}

impl<T: Scalar> FramePoint<T> {
    pub fn new(chart: BundleChart, y: Vec<T>, nn: Mat<T>, kk: Mat<T>, kn: Mat<T>) -> Result<Self> {
        let (n, k) = (chart.n, chart.k);
        if y.len() != n + k || nn.rows() != n || nn.cols() != n || kk.rows() != k || kk.cols() != k || kn.rows() != k || kn.cols() != n {
            return Err(Error::ChartMismatch("frame point block shapes".into()));
        }
        if nn.det().is_zero() {
            return Err(Error::Singular("pi^i_j"));
        }
        if kk.det().is_zero() {
            return Err(Error::Singular("pi^A_B"));
        }
        Ok(FramePoint { chart, y, nn, kk, kn })
    }

    /// Frame with identity blocks at `y`.
    pub fn identity_at(chart: BundleChart, y: Vec<T>) -> Self {
        FramePoint { chart, y, nn: Mat::identity(chart.n), kk: Mat::identity(chart.k), kn: Mat::zeros(chart.k, chart.n) }
    }

    /// The full `(n+k) x (n+k)` coframe matrix `P`.
    pub fn full(&self) -> Mat<T> {
        let (n, k) = (self.chart.n, self.chart.k);
        let mut p = Mat::zeros(n + k, n + k);
        p.set_block(0, 0, &self.nn);
        p.set_block(n, 0, &self.kn);
        p.set_block(n, n, &self.kk);
        p
    }

    pub fn from_full(chart: BundleChart, y: Vec<T>, p: &Mat<T>) -> Result<Self> {
        let (n, k) = (chart.n, chart.k);
        if !all_zero(&p.block(0, n, n, k)) {
            return Err(Error::ChartMismatch("coframe is not vertically adapted".into()));
        }
        FramePoint::new(chart, y, p.block(0, 0, n, n), p.block(n, n, k, k), p.block(n, 0, k, n))
    }

    /// Coordinate bindings in chart order (`Y^mu`, then the frame blocks).
    pub fn bindings(&self) -> Vec<(CoordName, T)> {
        let c = &self.chart;
        let mut out: Vec<(CoordName, T)> = (0..c.dim()).map(|mu| (c.ycoord(mu), self.y[mu].clone())).collect();
        let p = self.full();
        for mu in 0..c.dim() {
            for nu in 0..c.dim() {
                if let Some(name) = c.frame_coord(mu, nu) {
                    out.push((name, p[(mu, nu)].clone()));
                }
            }
        }
        out
    }

    pub fn env(&self) -> BTreeMap<CoordName, T> {
        self.bindings().into_iter().collect()
    }

    /// Values in the order of [`BundleChart::lvy_coords`].
    pub fn state(&self) -> Vec<T> {
        self.bindings().into_iter().map(|(_, v)| v).collect()
    }
}

impl FramePoint<f64> {
    pub fn from_state(chart: BundleChart, state: &[f64]) -> Self {
        let layout = chart.lvy_coords();
        let env: BTreeMap<&CoordName, f64> = layout.iter().zip(state.iter().copied()).collect();
        let d = chart.dim();
        let y = (0..d).map(|mu| env[&chart.ycoord(mu)]).collect();
        let p = Mat::from_fn(d, d, |mu, nu| chart.frame_coord(mu, nu).map_or(0.0, |c| env[&c]));
        FramePoint {
            chart,
            y,
            nn: p.block(0, 0, chart.n, chart.n),
            kk: p.block(chart.n, chart.n, chart.k, chart.k),
            kn: p.block(chart.n, 0, chart.k, chart.n),
        }
    }
}

impl FramePoint<Rational> {
    pub fn to_f64(&self) -> FramePoint<f64> {
        let f = |m: &Mat<Rational>| m.map(crate::symexpr::rat_to_f64);
        FramePoint {
            chart: self.chart,
            y: self.y.iter().map(crate::symexpr::rat_to_f64).collect(),
            nn: f(&self.nn),
            kk: f(&self.kk),
            kn: f(&self.kn),
        }
    }
}

fn all_zero<T: Scalar>(m: &Mat<T>) -> bool {
    (0..m.rows()).all(|r| (0..m.cols()).all(|c| m[(r, c)].is_zero()))
}

/// Element `(N, K, A)` of the adapted linear group, the block lower-triangular
/// matrix `[[N, 0], [A, K]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GAElement<T> {
    pub n: Mat<T>,
    pub k: Mat<T>,
    pub a: Mat<T>,
}

impl<T: Scalar> GAElement<T> {
    pub fn new(n: Mat<T>, k: Mat<T>, a: Mat<T>) -> Result<Self> {
        if !n.is_square() || !k.is_square() || a.rows() != k.rows() || a.cols() != n.rows() {
            return Err(Error::ChartMismatch("G_A block shapes".into()));
        }
        if n.det().is_zero() {
            return Err(Error::Singular("N"));
        }
        if k.det().is_zero() {
            return Err(Error::Singular("K"));
        }
        Ok(GAElement { n, k, a })
    }

    pub fn identity(chart: &BundleChart) -> Self {
        GAElement { n: Mat::identity(chart.n), k: Mat::identity(chart.k), a: Mat::zeros(chart.k, chart.n) }
    }

    pub fn matrix(&self) -> Mat<T> {
        let (n, k) = (self.n.rows(), self.k.rows());
        let mut m = Mat::zeros(n + k, n + k);
        m.set_block(0, 0, &self.n);
        m.set_block(n, 0, &self.a);
        m.set_block(n, n, &self.k);
        m
    }

    /// `(N, K, A)(N', K', A') = (NN', KK', AN' + KA')`.
    pub fn mul(&self, o: &GAElement<T>) -> GAElement<T> {
        GAElement { n: self.n.mul(&o.n), k: self.k.mul(&o.k), a: self.a.mul(&o.n).add(&self.k.mul(&o.a)) }
    }

    /// `(N^-1, K^-1, -K^-1 A N^-1)`.
    pub fn inverse(&self) -> Result<GAElement<T>> {
        let ni = self.n.inverse().ok_or(Error::Singular("N"))?;
        let ki = self.k.inverse().ok_or(Error::Singular("K"))?;
        let a = ki.mul(&self.a).mul(&ni).neg();
        Ok(GAElement { n: ni, k: ki, a })
    }

    pub fn is_identity(&self) -> bool {
        self.n == Mat::identity(self.n.rows()) && self.k == Mat::identity(self.k.rows()) && all_zero(&self.a)
    }
}

/// Right action on frames; on coframe coordinates `P -> g^-1 P`.
pub fn ga_act_frame<T: Scalar>(w: &FramePoint<T>, g: &GAElement<T>) -> Result<FramePoint<T>> {
    let gi = g.inverse()?.matrix();
    FramePoint::from_full(w.chart, w.y.clone(), &gi.mul(&w.full()))
}

/// Linear left action on `(B, lambda)`:
/// `(N, K, A)(B, lambda) = det(N^-1) (N B K^-1, lambda - tr(B K^-1 A))`.
pub fn ga_act_fiber<T: Scalar>(g: &GAElement<T>, b: &Mat<T>, lambda: &T) -> Result<(Mat<T>, T)> {
    let ki = g.k.inverse().ok_or(Error::Singular("K"))?;
    let s = T::one().div(&g.n.det()).ok_or(Error::Singular("N"))?;
    let b2 = g.n.mul(b).mul(&ki).scale(&s);
    let l2 = lambda.sub(&b.mul(&ki).mul(&g.a).trace()).mul(&s);
    Ok((b2, l2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Sampler;

    #[test]
    fn identity_acts_trivially() {
        let c = BundleChart::new(2, 2).unwrap();
        let mut s = Sampler::new(3);
        let w = s.frame_point(&c);
        assert_eq!(ga_act_frame(&w, &GAElement::identity(&c)).unwrap(), w);
    }

    #[test]
    fn right_action_law_and_freeness() {
        let c = BundleChart::new(2, 2).unwrap();
        let mut s = Sampler::new(4);
        for _ in 0..20 {
            let (w, g, h) = (s.frame_point(&c), s.ga_element(&c), s.ga_element(&c));
            let lhs = ga_act_frame(&ga_act_frame(&w, &g).unwrap(), &h).unwrap();
            assert_eq!(lhs, ga_act_frame(&w, &g.mul(&h)).unwrap());
            if !g.is_identity() {
                assert_ne!(ga_act_frame(&w, &g).unwrap(), w);
            }
        }
    }

    #[test]
    fn fiber_action_is_a_linear_left_action() {
        let c = BundleChart::new(2, 1).unwrap();
        let mut s = Sampler::new(5);
        for _ in 0..10 {
            let (g, h) = (s.ga_element(&c), s.ga_element(&c));
            let (b, l) = (s.rational_matrix(2, 1), s.rational());
            let (b1, l1) = ga_act_fiber(&h, &b, &l).unwrap();
            let lhs = ga_act_fiber(&g, &b1, &l1).unwrap();
            assert_eq!(lhs, ga_act_fiber(&g.mul(&h), &b, &l).unwrap());
        }
    }

    #[test]
    fn singular_blocks_are_rejected() {
        let c = BundleChart::new(1, 1).unwrap();
        let z = Mat::<Rational>::zeros(1, 1);
        assert!(GAElement::new(z.clone(), Mat::identity(1), z.clone()).is_err());
        assert!(FramePoint::new(c, vec![Rational::from_integer(0.into()); 2], Mat::identity(1), z.clone(), z).is_err());
    }
}
