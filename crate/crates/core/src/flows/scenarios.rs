use crate::forms::VectorField;
use crate::geobundle::{from_components, BundleChart, VectorFieldY};
use crate::linalg::{Mat, Scalar};
use crate::multiphase::MultiphaseSpace;
use crate::par::Exec;
use crate::symexpr::{rat_to_f64, CompiledExpr, CoordName, Expr, Rational};
use crate::symobs::{christoffel, hamiltonian_family_solve, no_torsion_residual, no_torsion_select, st2_from_metric, st2_residual_is_zero, KKMetric};
use crate::vframe::{momentum_observable_lvy, phi_map, FramePoint};
use crate::{Error, Result};

use super::{integrate_rk4, FieldSpec, FrameGuard, Trajectory};

fn rzero() -> Rational {
    <Rational as Scalar>::zero()
}

/// Scalars that can be built from exact rationals.
pub trait Coef: Scalar {
    fn from_rat(r: &Rational) -> Self;
}

impl Coef for Rational {
    fn from_rat(r: &Rational) -> Self {
        r.clone()
    }
}

impl Coef for f64 {
    fn from_rat(r: &Rational) -> Self {
        rat_to_f64(r)
    }
}

/// Scenarios whose metric flows are affine in time.
pub const CLOSED_FORM_CASES: [&str; 3] = ["linear-momentum", "angular-momentum", "affine"];

/// Flow of `X^mu` for a constant metric: `Y^b + t G^{ab} P^mu_a`, frame fixed.
pub fn closed_form_flow<T: Coef>(case: &str, g: &KKMetric, mu: usize, w: &FramePoint<T>, t: &T) -> Result<FramePoint<T>> {
    if !CLOSED_FORM_CASES.contains(&case) {
        return Err(Error::UnknownCase(case.to_string()));
    }
    let c = g.chart;
    if case == "affine" && c.n != 1 {
        return Err(Error::ScenarioMismatch("affine flows need n = 1".into()));
    }
    if (0..c.k).any(|a| (0..c.n).any(|i| !g.gamma[(a, i)].is_zero())) {
        return Err(Error::ScenarioMismatch("closed-form flows need the trivial connection".into()));
    }
    if w.chart != c || mu >= c.dim() {
        return Err(Error::ChartMismatch("flow index or frame chart".into()));
    }
    let up: Mat<T> = g.upper().map(|e| T::from_rat(&e.as_constant().expect("constant metric")));
    let p = w.full();
    let d = c.dim();
    let y = (0..d)
        .map(|b| {
            let v = (0..d).fold(T::zero(), |acc, a| acc.add(&up[(a, b)].mul(&p[(mu, a)])));
            w.y[b].add(&t.mul(&v))
        })
        .collect();
    Ok(FramePoint { y, ..w.clone() })
}

/// Per-series values along flows, with an optional expected correction.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftReport {
    pub labels: Vec<String>,
    pub times: Vec<f64>,
    /// `values[s][i]` is series `s` at `times[i]`.
    pub values: Vec<Vec<f64>>,
    /// Analytic prediction of the drift, same shape as `values`.
    pub correction: Option<Vec<Vec<f64>>>,
}

impl DriftReport {
    pub fn drift(&self, s: usize) -> Vec<f64> {
        let v = &self.values[s];
        v.iter().map(|x| x - v[0]).collect()
    }

    pub fn max_abs_drift(&self) -> Vec<f64> {
        (0..self.values.len()).map(|s| self.drift(s).iter().fold(0.0_f64, |m, d| m.max(d.abs()))).collect()
    }

    /// `max |drift − correction|` per series, when a correction is present.
    pub fn max_residual(&self) -> Option<Vec<f64>> {
        let c = self.correction.as_ref()?;
        Some(
            (0..self.values.len())
                .map(|s| self.drift(s).iter().zip(&c[s]).fold(0.0_f64, |m, (d, e)| m.max((d - e).abs())))
                .collect(),
        )
    }
}

fn compile_all(exprs: &[Expr], layout: &[CoordName]) -> Result<Vec<CompiledExpr>> {
    Ok(exprs.iter().map(|e| CompiledExpr::new(e, layout)).collect::<std::result::Result<_, _>>()?)
}

/// Integrates each field of a family from `start` and evaluates `obs[mu]`
/// along the flow of field `mu`.
fn per_mu_series(
    chart: &BundleChart,
    fields: &[VectorField],
    obs: &[Expr],
    start: &[f64],
    t_max: f64,
    dt: f64,
    exec: Exec,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let layout = chart.lvy_coords();
    let mus: Vec<usize> = (0..fields.len()).collect();
    let runs = exec.map(&mus, |&mu| -> Result<(Trajectory, Vec<f64>)> {
        let spec = FieldSpec::new(&fields[mu], &layout)?;
        let guard = FrameGuard::new(chart, &layout)?;
        let tr = integrate_rk4(&spec, start, t_max, dt, Some(&guard))?;
        let j = CompiledExpr::new(&obs[mu], &layout)?;
        let vals = tr.states.iter().map(|s| j.eval(s)).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok((tr, vals))
    });
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut ends = Vec::new();
    for r in runs {
        let (tr, v) = r?;
        ends.push(tr.last().to_vec());
        times = tr.times;
        values.push(v);
    }
    Ok((times, values, ends))
}

/// Conservation of `J(xi)^mu` along the flow of `X^mu` for each generator,
/// plus the worst distance between RK4 endpoints and the closed-form flow.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservationRun {
    pub report: DriftReport,
    pub endpoint_error: f64,
}

pub fn conservation_run(
    case: &str,
    g: &KKMetric,
    generators: &[(String, VectorFieldY)],
    w0: &FramePoint<Rational>,
    t_max: f64,
    dt: f64,
    exec: Exec,
) -> Result<ConservationRun> {
    let c = g.chart;
    let fam = hamiltonian_family_solve(&st2_from_metric(g)?);
    let start = w0.to_f64().state();
    let mut labels = Vec::new();
    let mut values = Vec::new();
    let mut times = Vec::new();
    let mut endpoint_error: f64 = 0.0;
    for (name, xi) in generators {
        let j = momentum_observable_lvy(&c, xi)?;
        let (t, v, ends) = per_mu_series(&c, &fam.fields, &j, &start, t_max, dt, exec)?;
        for (mu, end) in ends.iter().enumerate() {
            let exact = closed_form_flow(case, g, mu, &w0.to_f64(), &t_max)?.state();
            endpoint_error = exact.iter().zip(end).fold(endpoint_error, |m, (a, b)| m.max((a - b).abs()));
            labels.push(format!("J[{name}]^{mu}"));
        }
        times = t;
        values.extend(v);
    }
    Ok(ConservationRun { report: DriftReport { labels, times, values, correction: None }, endpoint_error })
}

/// Affine generator `(k^A_B y^B + x1 v^A) ∂_A` on `n = 1`.
pub fn affine_generator(chart: &BundleChart, kmat: &Mat<Rational>, v: &[Rational]) -> Result<VectorFieldY> {
    if chart.n != 1 || kmat.rows() != chart.k || kmat.cols() != chart.k || v.len() != chart.k {
        return Err(Error::ScenarioMismatch("affine generator needs n = 1 and k-sized k and v".into()));
    }
    let mut comps = vec![Expr::zero()];
    for a in 0..chart.k {
        let lin: Expr = (0..chart.k).map(|b| Expr::from_rational(kmat[(a, b)].clone()) * Expr::y(b as u8 + 1)).sum();
        comps.push(lin + Expr::from_rational(v[a].clone()) * Expr::x(1));
    }
    Ok(from_components(chart, &comps))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParallelAxisReport {
    /// `J^B∘F^B_λ − J^B − λ ẋ⁰ ι_AC ẏ^C v^A = 0` at every rational `λ` sample.
    pub exact_ok: bool,
    /// `J⁰` vanishes at `w` and along `F⁰_λ`.
    pub j0_zero: bool,
    pub float: DriftReport,
    pub max_float_residual: f64,
}

/// Parallel-axis term of the affine generator, checked exactly at `samples + 1`
/// values of `λ` in `[0, λ_max]` and along RK4 flows.
pub fn parallel_axis_analysis(
    g: &KKMetric,
    kmat: &Mat<Rational>,
    v: &[Rational],
    w: &FramePoint<Rational>,
    lambda_max: &Rational,
    samples: usize,
    dt: f64,
    exec: Exec,
) -> Result<ParallelAxisReport> {
    let c = g.chart;
    let xi = affine_generator(&c, kmat, v)?;
    let iota_k = g.iota.mul(kmat);
    if iota_k.add(&iota_k.transpose()) != Mat::zeros(c.k, c.k) {
        return Err(Error::ScenarioMismatch("k must be in o(iota)".into()));
    }
    let j = momentum_observable_lvy(&c, &xi)?;
    let eval = |pt: &FramePoint<Rational>, e: &Expr| e.eval_rational(&pt.env());
    let up = g.upper().map(|e| e.as_constant().expect("constant metric"));
    // correction per unit λ along F^B: ẋ⁰ ι_AC ẏ^C v^A with ẏ^C = ι^{CE} π^B_E
    let slope = |pt: &FramePoint<Rational>, b: usize| -> Rational {
        let xdot = (0..c.dim()).fold(rzero(), |acc, a| acc + &up[(a, 0)] * &pt.full()[(c.n + b, a)]);
        let mut s = rzero();
        for a in 0..c.k {
            for cc in 0..c.k {
                let ydot = (0..c.k).fold(rzero(), |acc, e| acc + &up[(c.n + e, c.n + cc)] * &pt.kk[(b, e)]);
                s = s + &g.iota[(a, cc)] * &ydot * &v[a];
            }
        }
        xdot * s
    };
    let mut exact_ok = true;
    let mut j0_zero = eval(w, &j[0])? == rzero();
    for step in 0..=samples {
        let lam = lambda_max * Rational::from_integer((step as i64).into()) / Rational::from_integer((samples.max(1) as i64).into());
        let f0 = closed_form_flow("affine", g, 0, w, &lam)?;
        j0_zero &= eval(&f0, &j[0])? == rzero();
        for b in 0..c.k {
            let mu = c.n + b;
            let fb = closed_form_flow("affine", g, mu, w, &lam)?;
            let lhs = eval(&fb, &j[mu])? - eval(w, &j[mu])?;
            exact_ok &= lhs == &lam * slope(w, b);
        }
    }
    let fam = hamiltonian_family_solve(&st2_from_metric(g)?);
    let (times, values, _) = per_mu_series(&c, &fam.fields, &j, &w.to_f64().state(), rat_to_f64(lambda_max), dt, exec)?;
    let mut correction = vec![vec![0.0; times.len()]];
    for b in 0..c.k {
        let s = rat_to_f64(&slope(w, b));
        correction.push(times.iter().map(|t| t * s).collect());
    }
    let labels = (0..c.dim()).map(|mu| format!("J^{mu}")).collect();
    let float = DriftReport { labels, times, values, correction: Some(correction) };
    let max_float_residual = float.max_residual().expect("correction present").into_iter().fold(0.0, f64::max);
    Ok(ParallelAxisReport { exact_ok, j0_zero, float, max_float_residual })
}

#[derive(Clone, Debug)]
pub struct GeodesicReport {
    pub trajectory: Trajectory,
    /// max over interior samples of `|Ÿ^a + Γ^a_{bc} Ẏ^b Ẏ^c|`, finite differences.
    pub geodesic_residual: f64,
    /// max of `|π̇^A_s − Γ^n_{sr} Ẏ^r π^A_n|` over vertical frame rows.
    pub transport_residual: f64,
    pub energy: Vec<f64>,
    pub energy_drift: f64,
    /// No-torsion contraction residual is symbolically zero.
    pub no_torsion_exact: bool,
}

/// Integrates `X⁰` of the no-torsion family and measures the geodesic and
/// frame-transport equations along the result.
pub fn geodesic_transport_run(g: &KKMetric, start: &FramePoint<f64>, t_max: f64, dt: f64) -> Result<GeodesicReport> {
    let c = g.chart;
    let fam = no_torsion_select(g);
    if !st2_residual_is_zero(&st2_from_metric(g)?, &fam.fields) {
        return Err(Error::ScenarioMismatch("no-torsion fields need a connection without curvature".into()));
    }
    let no_torsion_exact = no_torsion_residual(&c, &fam.fields).iter().all(Expr::is_zero);
    let layout = c.lvy_coords();
    let spec = FieldSpec::new(&fam.fields[0], &layout)?;
    let guard = FrameGuard::new(&c, &layout)?;
    let tr = integrate_rk4(&spec, &start.state(), t_max, dt, Some(&guard))?;
    let d = c.dim();
    let (lo, up) = (g.lower(), g.upper());
    let gam = christoffel(&lo, &up, &c);
    let gamc: Vec<Vec<Vec<CompiledExpr>>> =
        gam.iter().map(|m| m.iter().map(|r| compile_all(r, &layout)).collect::<Result<_>>()).collect::<Result<_>>()?;
    let loc: Vec<Vec<CompiledExpr>> = (0..d).map(|a| compile_all(&(0..d).map(|b| lo[(a, b)].clone()).collect::<Vec<_>>(), &layout)).collect::<Result<_>>()?;
    let yi: Vec<usize> = (0..d).map(|a| tr.index_of(&c.ycoord(a)).expect("layout has Y")).collect();
    let mut vel = vec![0.0; layout.len()];
    let mut energy = Vec::with_capacity(tr.len());
    for s in &tr.states {
        spec.eval(s, &mut vel)?;
        let mut e = 0.0;
        for a in 0..d {
            for b in 0..d {
                e += loc[a][b].eval(s)? * vel[yi[a]] * vel[yi[b]];
            }
        }
        energy.push(e);
    }
    let energy_drift = energy.iter().fold(0.0_f64, |m, e| m.max((e - energy[0]).abs()));
    let frame_idx: Vec<(usize, usize, usize)> = (c.n..d)
        .flat_map(|l| (0..d).filter_map(move |s| c.frame_coord(l, s).map(|name| (l, s, name))))
        .map(|(l, s, name)| (l, s, tr.index_of(&name).expect("layout has frame")))
        .collect();
    let (mut geo, mut transport): (f64, f64) = (0.0, 0.0);
    for i in 1..tr.len().saturating_sub(1) {
        let (a, b, m) = (&tr.states[i - 1], &tr.states[i + 1], &tr.states[i]);
        let ydot: Vec<f64> = yi.iter().map(|&k| (b[k] - a[k]) / (2.0 * dt)).collect();
        for r in 0..d {
            let k = yi[r];
            let acc = (b[k] - 2.0 * m[k] + a[k]) / (dt * dt);
            let mut q = 0.0;
            for p in 0..d {
                for s in 0..d {
                    q += gamc[r][p][s].eval(m)? * ydot[p] * ydot[s];
                }
            }
            geo = geo.max((acc + q).abs());
        }
        for &(l, s, k) in &frame_idx {
            let pdot = (b[k] - a[k]) / (2.0 * dt);
            let mut q = 0.0;
            for nu in 0..d {
                let Some(name) = c.frame_coord(l, nu) else { continue };
                let pk = tr.index_of(&name).expect("layout has frame");
                for r in 0..d {
                    q += gamc[nu][s][r].eval(m)? * ydot[r] * m[pk];
                }
            }
            transport = transport.max((pdot - q).abs());
        }
    }
    Ok(GeodesicReport { trajectory: tr, geodesic_residual: geo, transport_residual: transport, energy, energy_drift, no_torsion_exact })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReparamReport {
    /// Series `J_LVY^mu` for each `mu`, then `J_Z`; correction holds the
    /// constant-metric prediction of the drift when the connection is trivial.
    pub report: DriftReport,
    pub max_drift: f64,
    pub conserved: bool,
}

/// Momentum of the time-reparametrization generator `f(x1) ∂_x1` along `X⁰`.
///
/// `J_Z = p f` is evaluated through `φ_(B,λ)`.
pub fn reparam_momentum_run(
    g: &KKMetric,
    f: &Expr,
    start: &FramePoint<f64>,
    b: &Mat<Rational>,
    lambda: &Rational,
    t_max: f64,
    dt: f64,
) -> Result<ReparamReport> {
    let c = g.chart;
    if c.n != 1 {
        return Err(Error::ScenarioMismatch("time reparametrization needs n = 1".into()));
    }
    if f.variables().iter().any(|v| *v != CoordName::BaseX(1)) || !f.is_polynomial() {
        return Err(Error::ScenarioMismatch("f must be a polynomial in x1".into()));
    }
    let mut comps = vec![Expr::zero(); c.dim()];
    comps[0] = f.clone();
    let xi = from_components(&c, &comps);
    let mut obs = momentum_observable_lvy(&c, &xi)?;
    let jz = MultiphaseSpace::new(c).momentum(&xi)?.as_scalar().subs(&phi_map(&c, b, lambda));
    obs.push(jz.clone());
    let fam = no_torsion_select(g);
    let layout = c.lvy_coords();
    let spec = FieldSpec::new(&fam.fields[0], &layout)?;
    let guard = FrameGuard::new(&c, &layout)?;
    let tr = integrate_rk4(&spec, &start.state(), t_max, dt, Some(&guard))?;
    let compiled = compile_all(&obs, &layout)?;
    let values = compiled
        .iter()
        .map(|j| tr.states.iter().map(|s| j.eval(s)).collect::<std::result::Result<Vec<_>, _>>())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let flat = (0..c.k).all(|a| g.gamma[(a, 0)].is_zero());
    let correction = if flat {
        // constant metric: frame fixed, x1(t) = x1 + t ẋ1, so J(t) = J(0)|_{x1 -> x1(t)}
        let s0 = &tr.states[0];
        let mut vel = vec![0.0; layout.len()];
        spec.eval(s0, &mut vel)?;
        let xi0 = tr.index_of(&CoordName::BaseX(1)).expect("layout has x1");
        let series = compiled
            .iter()
            .map(|j| {
                let j0 = j.eval(s0)?;
                tr.times
                    .iter()
                    .map(|t| {
                        let mut s = s0.clone();
                        s[xi0] += t * vel[xi0];
                        Ok(j.eval(&s)? - j0)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Some(series)
    } else {
        None
    };
    let mut labels: Vec<String> = (0..c.dim()).map(|mu| format!("J_LVY^{mu}")).collect();
    labels.push("J_Z".into());
    let report = DriftReport { labels, times: tr.times, values, correction };
    let max_drift = report.max_abs_drift().into_iter().fold(0.0, f64::max);
    Ok(ReparamReport { report, max_drift, conserved: max_drift <= 1e-9 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Sampler;
    use crate::symexpr::{int, parse_expr, rat};
    use crate::symobs::orthogonal_basis;

    fn diag(v: &[i64]) -> Mat<Rational> {
        Mat::from_fn(v.len(), v.len(), |r, c| if r == c { int(v[r]) } else { int(0) })
    }

    #[test]
    fn closed_form_at_zero_is_identity_and_unknown_case_fails() {
        let c = BundleChart::new(2, 2).unwrap();
        let g = KKMetric::flat(c, diag(&[1, 1]), diag(&[1, 1])).unwrap();
        let w = Sampler::new(41).frame_point(&c);
        assert_eq!(closed_form_flow("angular-momentum", &g, 2, &w, &int(0)).unwrap(), w);
        assert!(matches!(closed_form_flow("spiral", &g, 0, &w, &int(1)), Err(Error::UnknownCase(_))));
    }

    #[test]
    fn closed_form_fiber_flow_formula() {
        let c = BundleChart::new(1, 1).unwrap();
        let g = KKMetric::flat(c, diag(&[1]), diag(&[2])).unwrap();
        let w = FramePoint::new(c, vec![int(1), int(1)], Mat::from_rows(vec![vec![int(3)]]), Mat::from_rows(vec![vec![int(4)]]), Mat::from_rows(vec![vec![int(5)]])).unwrap();
        let f = closed_form_flow("affine", &g, 1, &w, &int(2)).unwrap();
        // x + t π^A_0 = 1 + 10, y + t ι^{-1} π^A_B = 1 + 2*4/2
        assert_eq!(f.y, vec![int(11), int(5)]);
    }

    #[test]
    fn rotation_conserved_and_matches_closed_form() {
        let c = BundleChart::new(2, 2).unwrap();
        let g = KKMetric::flat(c, diag(&[1, 1]), diag(&[1, 1])).unwrap();
        let gens: Vec<(String, VectorFieldY)> =
            orthogonal_basis(&c, &g.eta, &g.iota).unwrap().into_iter().enumerate().map(|(i, v)| (format!("e{i}"), v)).collect();
        let w = Sampler::new(42).frame_point(&c);
        let run = conservation_run("angular-momentum", &g, &gens, &w, 1.0, 1e-3, Exec::default()).unwrap();
        assert!(run.report.max_abs_drift().iter().all(|d| *d <= 1e-9));
        assert!(run.endpoint_error <= 1e-9);
    }

    #[test]
    fn parallel_axis_term_euclidean() {
        let c = BundleChart::new(1, 3).unwrap();
        let g = KKMetric::flat(c, diag(&[1]), diag(&[1, 1, 1])).unwrap();
        let kmat = Mat::from_rows(vec![vec![int(0), int(1), int(0)], vec![int(-1), int(0), int(0)], vec![int(0); 3]]);
        let v = vec![int(1), rat(1, 2), int(-2)];
        let w = Sampler::new(43).frame_point(&c);
        let r = parallel_axis_analysis(&g, &kmat, &v, &w, &int(1), 4, 1e-3, Exec::default()).unwrap();
        assert!(r.exact_ok && r.j0_zero);
        assert!(r.max_float_residual <= 1e-12, "{}", r.max_float_residual);
        // without translations there is no correction
        let r = parallel_axis_analysis(&g, &kmat, &[int(0), int(0), int(0)], &w, &int(1), 2, 1e-2, Exec::Sequential).unwrap();
        assert!(r.exact_ok);
        assert!(r.float.correction.unwrap().iter().all(|s| s.iter().all(|x| *x == 0.0)));
    }

    #[test]
    fn affine_rejects_non_orthogonal_k() {
        let c = BundleChart::new(1, 2).unwrap();
        let g = KKMetric::flat(c, diag(&[1]), diag(&[1, 1])).unwrap();
        let w = Sampler::new(44).frame_point(&c);
        let r = parallel_axis_analysis(&g, &diag(&[1, 0]), &[int(0), int(0)], &w, &int(1), 1, 0.1, Exec::Sequential);
        assert!(matches!(r, Err(Error::ScenarioMismatch(_))));
    }

    #[test]
    fn geodesic_with_time_dependent_connection() {
        let c = BundleChart::new(1, 1).unwrap();
        let g = KKMetric::new(c, diag(&[1]), diag(&[1]), Mat::from_rows(vec![vec![Expr::x(1)]])).unwrap();
        let w = FramePoint::new(c, vec![0.0, 0.5], Mat::from_rows(vec![vec![1.0]]), Mat::from_rows(vec![vec![1.0]]), Mat::from_rows(vec![vec![0.3]])).unwrap();
        let r = geodesic_transport_run(&g, &w, 2.0, 1e-3).unwrap();
        assert!(r.no_torsion_exact);
        assert!(r.geodesic_residual <= 1e-6, "{}", r.geodesic_residual);
        assert!(r.transport_residual <= 1e-6, "{}", r.transport_residual);
        assert!(r.energy_drift <= 1e-8, "{}", r.energy_drift);
    }

    #[test]
    fn reparam_constant_and_linear() {
        let c = BundleChart::new(1, 2).unwrap();
        let g = KKMetric::flat(c, diag(&[1]), diag(&[1, 1])).unwrap();
        let w = Sampler::new(45).frame_point(&c).to_f64();
        let b = Mat::zeros(1, 2);
        let one = reparam_momentum_run(&g, &Expr::one(), &w, &b, &int(1), 1.0, 1e-3).unwrap();
        assert!(one.conserved);
        let lin = reparam_momentum_run(&g, &Expr::x(1), &w, &b, &int(1), 1.0, 1e-3).unwrap();
        assert!(!lin.conserved);
        assert!(lin.report.max_residual().unwrap().iter().all(|r| *r <= 1e-9));
        let zero = reparam_momentum_run(&g, &Expr::zero(), &w, &b, &int(1), 1.0, 1e-2).unwrap();
        assert!(zero.report.values.iter().all(|s| s.iter().all(|x| *x == 0.0)));
        let c2 = BundleChart::new(2, 1).unwrap();
        let g2 = KKMetric::flat(c2, diag(&[1, 1]), diag(&[1])).unwrap();
        let w2 = Sampler::new(46).frame_point(&c2).to_f64();
        assert!(reparam_momentum_run(&g2, &parse_expr("x1", None).unwrap(), &w2, &Mat::zeros(2, 1), &int(1), 1.0, 0.1).is_err());
    }
}
