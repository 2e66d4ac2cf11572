//! Seeded generators for random test inputs.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::forms::VectorField;
use crate::geobundle::{BundleChart, VectorFieldY};
use crate::linalg::Mat;
use crate::symexpr::{rat, CoordName, Expr, Monomial, Poly, Rational};
use crate::vframe::{FramePoint, GAElement};

pub const SEED_ENV: &str = "VERTFRAME_SEED";
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Seed from `VERTFRAME_SEED`, falling back to [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn from_env() -> Self {
        Sampler::new(seed_from_env())
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    /// Rational `a / b` with `|a| <= 5`, `1 <= b <= 4`.
    pub fn rational(&mut self) -> Rational {
        rat(self.int(-5, 5), self.int(1, 4))
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if !r.is_zero() {
                return r;
            }
        }
    }

    pub fn f64_in(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn rational_matrix(&mut self, rows: usize, cols: usize) -> Mat<Rational> {
        let data: Vec<Vec<Rational>> = (0..rows).map(|_| (0..cols).map(|_| self.rational()).collect()).collect();
        Mat::from_rows(data)
    }

    pub fn invertible_matrix(&mut self, n: usize) -> Mat<Rational> {
        loop {
            let m = self.rational_matrix(n, n);
            if !m.det().is_zero() {
                return m;
            }
        }
    }

    /// Random polynomial of total degree `<= degree` in `vars` with small
    /// integer coefficients; each monomial is kept with probability one half.
    pub fn polynomial(&mut self, vars: &[CoordName], degree: u32) -> Expr {
        let mut monos = vec![Monomial::one()];
        for v in vars {
            let mut next = Vec::new();
            for m in &monos {
                for e in 0..=degree {
                    if m.degree() + e > degree {
                        break;
                    }
                    let f = if e == 0 { m.clone() } else { m.mul(&Monomial(vec![(v.clone(), e)])) };
                    next.push(f);
                }
            }
            monos = next;
        }
        let mut p = Poly::zero();
        for m in monos {
            if self.rng.gen_bool(0.5) {
                let c = self.int(-3, 3);
                p.add_term(m, Rational::from_integer(c.into()));
            }
        }
        Expr::from_poly(p)
    }

    /// Projectable field: base components in `x` only, fiber components in `(x, y)`.
    pub fn projectable_field(&mut self, chart: &BundleChart, degree: u32) -> VectorFieldY {
        let xs = chart.base_coords();
        let ys = chart.y_coords();
        let mut v = VectorField::zero();
        for c in &xs {
            let e = self.polynomial(&xs, degree);
            v.set(c.clone(), e);
        }
        for c in chart.fiber_coords() {
            let e = self.polynomial(&ys, degree);
            v.set(c, e);
        }
        v
    }

    /// Like [`Sampler::projectable_field`] but never identically zero.
    pub fn nonzero_projectable_field(&mut self, chart: &BundleChart, degree: u32) -> VectorFieldY {
        loop {
            let v = self.projectable_field(chart, degree);
            if !v.is_zero() {
                return v;
            }
        }
    }

    pub fn frame_point(&mut self, chart: &BundleChart) -> FramePoint<Rational> {
        let y: Vec<Rational> = (0..chart.dim()).map(|_| self.rational()).collect();
        FramePoint::new(
            *chart,
            y,
            self.invertible_matrix(chart.n),
            self.invertible_matrix(chart.k),
            self.rational_matrix(chart.k, chart.n),
        )
        .expect("blocks are invertible")
    }

    pub fn ga_element(&mut self, chart: &BundleChart) -> GAElement<Rational> {
        GAElement::new(self.invertible_matrix(chart.n), self.invertible_matrix(chart.k), self.rational_matrix(chart.k, chart.n))
            .expect("blocks are invertible")
    }

    pub fn shuffle<T>(&mut self, v: &mut [T]) {
        v.shuffle(&mut self.rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geobundle::is_projectable;

    #[test]
    fn deterministic_for_a_seed() {
        let c = BundleChart::new(2, 2).unwrap();
        let a = Sampler::new(7).projectable_field(&c, 2);
        let b = Sampler::new(7).projectable_field(&c, 2);
        assert_eq!(a, b);
        assert!(is_projectable(&c, &a));
    }

    #[test]
    fn degrees_are_bounded() {
        let mut s = Sampler::new(1);
        let vars = [CoordName::BaseX(1), CoordName::FiberY(1)];
        for _ in 0..20 {
            assert!(s.polynomial(&vars, 2).numerator().total_degree() <= 2);
        }
    }
}
