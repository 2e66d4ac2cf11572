//! Fixed-step RK4 flows, closed-form flows and the conservation scenarios.

mod scenarios;

pub use scenarios::*;

use crate::forms::VectorField;
use crate::geobundle::BundleChart;
use crate::linalg::Mat;
use crate::symexpr::{CompiledExpr, CoordName};
use crate::{Error, Result};

/// Components beyond this magnitude abort the integration.
pub const BLOW_UP: f64 = 1e12;
/// Frame blocks with smaller determinant abort the integration.
pub const FRAME_DET_MIN: f64 = 1e-9;

/// A vector field compiled for float evaluation on a fixed coordinate layout.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    layout: Vec<CoordName>,
    comps: Vec<Option<CompiledExpr>>,
}

impl FieldSpec {
    pub fn new(v: &VectorField, layout: &[CoordName]) -> Result<Self> {
        if let Some((c, _)) = v.components().find(|(c, _)| !layout.contains(c)) {
            return Err(Error::ChartMismatch(format!("field has a component along {c} outside the state layout")));
        }
        let comps = layout
            .iter()
            .map(|c| {
                let e = v.get(c);
                if e.is_zero() {
                    Ok(None)
                } else {
                    CompiledExpr::new(&e, layout).map(Some)
                }
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(FieldSpec { layout: layout.to_vec(), comps })
    }

    pub fn layout(&self) -> &[CoordName] {
        &self.layout
    }

    pub fn eval(&self, state: &[f64], out: &mut [f64]) -> Result<()> {
        for (o, c) in out.iter_mut().zip(&self.comps) {
            *o = match c {
                Some(c) => c.eval(state)?,
                None => 0.0,
            };
        }
        Ok(())
    }
}

/// Determinant monitor for the `pi^i_j` and `pi^A_B` blocks of a frame state.
#[derive(Clone, Debug)]
pub struct FrameGuard {
    nn: Vec<Vec<usize>>,
    kk: Vec<Vec<usize>>,
}

impl FrameGuard {
    pub fn new(chart: &BundleChart, layout: &[CoordName]) -> Result<Self> {
        let find = |c: CoordName| {
            layout.iter().position(|l| *l == c).ok_or_else(|| Error::ChartMismatch(format!("layout lacks {c}")))
        };
        let (n, k) = (chart.n as u8, chart.k as u8);
        let nn = (1..=n).map(|i| (1..=n).map(|j| find(CoordName::FrameNN(i, j))).collect()).collect::<Result<_>>()?;
        let kk = (1..=k).map(|a| (1..=k).map(|b| find(CoordName::FrameKK(a, b))).collect()).collect::<Result<_>>()?;
        Ok(FrameGuard { nn, kk })
    }

    pub fn ok(&self, state: &[f64]) -> bool {
        let det = |idx: &Vec<Vec<usize>>| {
            Mat::from_fn(idx.len(), idx.len(), |r, c| state[idx[r][c]]).det()
        };
        det(&self.nn).abs() >= FRAME_DET_MIN && det(&self.kk).abs() >= FRAME_DET_MIN
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub layout: Vec<CoordName>,
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory has the initial sample")
    }

    pub fn index_of(&self, c: &CoordName) -> Option<usize> {
        self.layout.iter().position(|l| l == c)
    }
}

fn check_state(state: &[f64], sample: usize, guard: Option<&FrameGuard>) -> Result<()> {
    if state.iter().any(|v| !v.is_finite() || v.abs() > BLOW_UP) {
        return Err(Error::BlowUp(sample));
    }
    if let Some(g) = guard {
        if !g.ok(state) {
            return Err(Error::SingularFrame(sample));
        }
    }
    Ok(())
}

/// Classical fixed-step RK4 over `round(t_max / dt)` steps.
pub fn integrate_rk4(
    field: &FieldSpec,
    start: &[f64],
    t_max: f64,
    dt: f64,
    guard: Option<&FrameGuard>,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_max >= 0.0) {
        return Err(Error::Config(format!("need dt > 0 and t_max >= 0, got dt={dt}, t_max={t_max}")));
    }
    let d = field.layout.len();
    if start.len() != d {
        return Err(Error::ChartMismatch(format!("start has {} entries, layout has {d}", start.len())));
    }
    let steps = (t_max / dt).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    check_state(start, 0, guard)?;
    times.push(0.0);
    states.push(start.to_vec());
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut tmp = vec![0.0; d];
    let mut s = start.to_vec();
    for step in 1..=steps {
        let wrap = |e: Error| match e {
            Error::Expr(_) => Error::BlowUp(step),
            e => e,
        };
        field.eval(&s, &mut k1).map_err(wrap)?;
        for i in 0..d {
            tmp[i] = s[i] + 0.5 * dt * k1[i];
        }
        field.eval(&tmp, &mut k2).map_err(wrap)?;
        for i in 0..d {
            tmp[i] = s[i] + 0.5 * dt * k2[i];
        }
        field.eval(&tmp, &mut k3).map_err(wrap)?;
        for i in 0..d {
            tmp[i] = s[i] + dt * k3[i];
        }
        field.eval(&tmp, &mut k4).map_err(wrap)?;
        for i in 0..d {
            s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        check_state(&s, step, guard)?;
        times.push(step as f64 * dt);
        states.push(s.clone());
    }
    Ok(Trajectory { layout: field.layout.clone(), dt, times, states })
}

/// Least-squares slope of `log(err)` against `log(dt)` for RK4 on `x' = x`,
/// `x(0) = 1`, integrated to `t = 1` over the given step ladder.
pub fn rk4_order_slope(dts: &[f64]) -> Result<f64> {
    let v = VectorField::from_components([(CoordName::BaseX(1), crate::symexpr::Expr::x(1))]);
    let spec = FieldSpec::new(&v, &[CoordName::BaseX(1)])?;
    let mut pts = Vec::new();
    for &dt in dts {
        let tr = integrate_rk4(&spec, &[1.0], 1.0, dt, None)?;
        let err = (tr.last()[0] - std::f64::consts::E).abs();
        pts.push((dt.ln(), err.ln()));
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Ok(num / den)
}
