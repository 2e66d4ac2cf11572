//! Degree-two symmetric observables on `L_V Y` and their Hamiltonian families.
//!
//! A symmetric contravariant tensor `g^{ab}` on `Y` gives `ĝ = P g Pᵀ`. The
//! representative Hamiltonian fields are
//! `X^mu[Y^b] = g^{ab} P^mu_a`, `X^mu[P^nu_c] = P^mu_a P^nu_b C^{ab}_c`,
//! with `C` chosen so that the symmetrized structure equation holds.

use std::collections::BTreeMap;

use crate::flows::{integrate_rk4, FieldSpec, FrameGuard};
use crate::forms::{Form, VectorField};
use crate::geobundle::{from_components, BundleChart, VectorFieldY};
use crate::linalg::{Mat, Scalar};
use crate::par::Exec;
use crate::symexpr::{CompiledExpr, Expr, Rational};
use crate::vframe::{hamiltonian_solve_t1, lift_to_lvy, soldering_form, FramePoint, T1Observable};
use crate::{Error, Result};

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

/// Symmetric degree-two observable, stored as the contravariant tensor on `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct ST2Observable {
    pub chart: BundleChart,
    pub g: Mat<Expr>,
}

impl ST2Observable {
    /// Rejects non-symmetric input and base blocks that depend on the fiber.
    pub fn new(chart: BundleChart, g: Mat<Expr>) -> Result<Self> {
        let d = chart.dim();
        if g.rows() != d || g.cols() != d {
            return Err(Error::ChartMismatch(format!("tensor is {}x{}, chart needs {d}x{d}", g.rows(), g.cols())));
        }
        if !g.is_symmetric() {
            return Err(Error::Config("symmetric observable must be symmetric".into()));
        }
        let ys = chart.y_coords();
        for a in 0..d {
            for b in 0..d {
                let e = &g[(a, b)];
                if let Some(bad) = e.variables().into_iter().find(|v| !ys.contains(v)) {
                    return Err(Error::ChartMismatch(format!("coefficient depends on {bad}")));
                }
                if chart.is_base(a) && chart.is_base(b) && chart.fiber_coords().iter().any(|y| e.depends_on(y)) {
                    return Err(Error::NotProjectable);
                }
            }
        }
        Ok(ST2Observable { chart, g })
    }

    /// `ĝ^{mu nu} = P^mu_a g^{ab} P^nu_b`.
    pub fn values(&self) -> Mat<Expr> {
        let p = self.chart.frame_matrix();
        p.mul(&self.g).mul(&p.transpose())
    }
}

/// Kaluza–Klein metric from constant `η`, `ι` and connection `γ^A_i(x, y)`,
/// with `γ(v) = (v^A − v^i γ^A_i) ∂_A`.
#[derive(Clone, Debug, PartialEq)]
pub struct KKMetric {
    pub chart: BundleChart,
    pub eta: Mat<Rational>,
    pub iota: Mat<Rational>,
    /// `k x n`
    pub gamma: Mat<Expr>,
}

impl KKMetric {
    pub fn new(chart: BundleChart, eta: Mat<Rational>, iota: Mat<Rational>, gamma: Mat<Expr>) -> Result<Self> {
        let (n, k) = (chart.n, chart.k);
        if eta.rows() != n || eta.cols() != n || iota.rows() != k || iota.cols() != k || gamma.rows() != k || gamma.cols() != n {
            return Err(Error::ChartMismatch("metric block shapes".into()));
        }
        if !eta.is_symmetric() || !iota.is_symmetric() {
            return Err(Error::Config("metric blocks must be symmetric".into()));
        }
        if Scalar::is_zero(&eta.det()) {
            return Err(Error::Singular("eta"));
        }
        if Scalar::is_zero(&iota.det()) {
            return Err(Error::Singular("iota"));
        }
        let ys = chart.y_coords();
        for a in 0..k {
            for i in 0..n {
                if let Some(bad) = gamma[(a, i)].variables().into_iter().find(|v| !ys.contains(v)) {
                    return Err(Error::ChartMismatch(format!("connection depends on {bad}")));
                }
            }
        }
        Ok(KKMetric { chart, eta, iota, gamma })
    }

    /// Trivial connection, so `G = η ⊕ ι`.
    pub fn flat(chart: BundleChart, eta: Mat<Rational>, iota: Mat<Rational>) -> Result<Self> {
        KKMetric::new(chart, eta, iota, Mat::zeros(chart.k, chart.n))
    }

    /// Covariant `G = [[η + γᵀιγ, −γᵀι], [−ιγ, ι]]`.
    pub fn lower(&self) -> Mat<Expr> {
        let (n, k) = (self.chart.n, self.chart.k);
        let (eta, iota) = (to_expr(&self.eta), to_expr(&self.iota));
        let gt = self.gamma.transpose();
        let mut g = Mat::zeros(n + k, n + k);
        g.set_block(0, 0, &eta.add(&gt.mul(&iota).mul(&self.gamma)));
        g.set_block(0, n, &gt.mul(&iota).neg());
        g.set_block(n, 0, &iota.mul(&self.gamma).neg());
        g.set_block(n, n, &iota);
        g
    }

    /// Contravariant `G^-1 = [[η⁻¹, η⁻¹γᵀ], [γη⁻¹, ι⁻¹ + γη⁻¹γᵀ]]`.
    pub fn upper(&self) -> Mat<Expr> {
        let (n, k) = (self.chart.n, self.chart.k);
        let ei = to_expr(&self.eta.inverse().expect("checked in new"));
        let ii = to_expr(&self.iota.inverse().expect("checked in new"));
        let gt = self.gamma.transpose();
        let mut g = Mat::zeros(n + k, n + k);
        g.set_block(0, 0, &ei);
        g.set_block(0, n, &ei.mul(&gt));
        g.set_block(n, 0, &self.gamma.mul(&ei));
        g.set_block(n, n, &ii.add(&self.gamma.mul(&ei).mul(&gt)));
        g
    }
}

fn to_expr(m: &Mat<Rational>) -> Mat<Expr> {
    m.map(|r| Expr::from_rational(r.clone()))
}

pub fn st2_from_metric(g: &KKMetric) -> Result<ST2Observable> {
    ST2Observable::new(g.chart, g.upper())
}

/// A representative system of `n + k` Hamiltonian fields.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianFamily {
    pub chart: BundleChart,
    pub fields: Vec<VectorField>,
}

fn family_from(chart: &BundleChart, g: &Mat<Expr>, coeff: impl Fn(usize, usize, usize) -> Expr) -> HamiltonianFamily {
    let d = chart.dim();
    let p = chart.frame_matrix();
    let c: Vec<Vec<Vec<Expr>>> = (0..d).map(|a| (0..d).map(|b| (0..d).map(|gm| coeff(a, b, gm)).collect()).collect()).collect();
    let fields = (0..d)
        .map(|mu| {
            let mut x = VectorField::zero();
            for b in 0..d {
                let comp: Expr = (0..d).map(|a| &g[(a, b)] * &p[(mu, a)]).sum();
                x.set(chart.ycoord(b), comp);
            }
            for nu in 0..d {
                for gm in 0..d {
                    let Some(name) = chart.frame_coord(nu, gm) else { continue };
                    let mut comp = Expr::zero();
                    for a in 0..d {
                        if p[(mu, a)].is_zero() {
                            continue;
                        }
                        for b in 0..d {
                            if p[(nu, b)].is_zero() || c[a][b][gm].is_zero() {
                                continue;
                            }
                            comp = comp + &p[(mu, a)] * &p[(nu, b)] * &c[a][b][gm];
                        }
                    }
                    x.set(name, comp);
                }
            }
            x
        })
        .collect();
    HamiltonianFamily { chart: *chart, fields }
}

/// Representative solving `dĝ^{mu nu} = −(X^mu ⨼ dθ^nu + X^nu ⨼ dθ^mu)`.
///
/// Base directions use `C^{ab}_i = −½ ∂_i g^{ab}`. Fiber directions put the
/// whole mixed derivative on `C^{jB}_A` so that no `P^i_A` component appears.
pub fn hamiltonian_family_solve(g: &ST2Observable) -> HamiltonianFamily {
    let c = g.chart;
    family_from(&c, &g.g, |a, b, gm| {
        let y = c.ycoord(gm);
        let dg = g.g[(a, b)].diff(&y);
        if c.is_base(gm) {
            return dg.scale(&-half());
        }
        match (c.is_base(a), c.is_base(b)) {
            (true, true) | (false, true) => Expr::zero(),
            (true, false) => -dg,
            (false, false) => dg.scale(&-half()),
        }
    })
}

/// `dĝ^{mu nu} + X^mu ⨼ dθ^nu + X^nu ⨼ dθ^mu` for `mu <= nu`, keyed by `(mu, nu)`.
pub fn st2_residual(g: &ST2Observable, fields: &[VectorField]) -> BTreeMap<(usize, usize), Form> {
    let d = g.chart.dim();
    let dth = soldering_form(&g.chart).d();
    let gv = g.values();
    let mut out = BTreeMap::new();
    for mu in 0..d {
        for nu in mu..d {
            let r = Form::scalar(gv[(mu, nu)].clone())
                .d()
                .add(&dth.component(&[nu]).interior(&fields[mu]))
                .add(&dth.component(&[mu]).interior(&fields[nu]));
            out.insert((mu, nu), r);
        }
    }
    out
}

pub fn st2_residual_is_zero(g: &ST2Observable, fields: &[VectorField]) -> bool {
    st2_residual(g, fields).values().all(Form::is_zero)
}

/// Symmetrized contraction `Y^mu ⨼ dθ^nu + Y^nu ⨼ dθ^mu`, keyed by `(mu, nu)`.
pub fn ambiguity_residual(chart: &BundleChart, y: &[VectorField]) -> BTreeMap<(usize, usize), Form> {
    let d = chart.dim();
    let dth = soldering_form(chart).d();
    let mut out = BTreeMap::new();
    for mu in 0..d {
        for nu in mu..d {
            out.insert((mu, nu), dth.component(&[nu]).interior(&y[mu]).add(&dth.component(&[mu]).interior(&y[nu])));
        }
    }
    out
}

/// True when the differences are vertical (no `∂/∂Y` part) and satisfy the
/// symmetrized ambiguity equation.
pub fn ambiguity_is_admissible(chart: &BundleChart, y: &[VectorField]) -> bool {
    let ys = chart.y_coords();
    y.iter().all(|f| f.components().all(|(c, _)| !ys.contains(c))) && ambiguity_residual(chart, y).values().all(Form::is_zero)
}

/// Vertical fields `Y^mu[P^nu_b] = P^mu_a P^nu_c A^{ac}_b` from a coefficient
/// `A^{ac}_b` that must be antisymmetric in `(a, c)`; entries with a base `a`
/// or `c` and a fiber `b` are dropped, which keeps `Y^mu[P^i_A]` zero.
pub fn ambiguity_fields(chart: &BundleChart, a: impl Fn(usize, usize, usize) -> Expr) -> Vec<VectorField> {
    let d = chart.dim();
    let p = chart.frame_matrix();
    let coef = |al: usize, ga: usize, b: usize| -> Expr {
        if al >= ga || (!chart.is_base(b) && (chart.is_base(al) || chart.is_base(ga))) {
            return Expr::zero();
        }
        a(al, ga, b)
    };
    (0..d)
        .map(|mu| {
            let mut out = VectorField::zero();
            for nu in 0..d {
                for b in 0..d {
                    let Some(name) = chart.frame_coord(nu, b) else { continue };
                    let mut comp = Expr::zero();
                    for al in 0..d {
                        for ga in (al + 1)..d {
                            let c = coef(al, ga, b);
                            if c.is_zero() {
                                continue;
                            }
                            let anti = &p[(mu, al)] * &p[(nu, ga)] - &p[(mu, ga)] * &p[(nu, al)];
                            comp = comp + anti * c;
                        }
                    }
                    out.set(name, comp);
                }
            }
            out
        })
        .collect()
}

/// `Γ[m][a][b] = Γ^m_{ab}` of the Levi-Civita connection.
pub fn christoffel(lower: &Mat<Expr>, upper: &Mat<Expr>, chart: &BundleChart) -> Vec<Vec<Vec<Expr>>> {
    let d = chart.dim();
    let dg: Vec<Mat<Expr>> = (0..d).map(|c| lower.map(|e| e.diff(&chart.ycoord(c)))).collect();
    (0..d)
        .map(|m| {
            (0..d)
                .map(|a| {
                    (0..d)
                        .map(|b| {
                            let s: Expr = (0..d)
                                .filter(|s| !upper[(m, *s)].is_zero())
                                .map(|s| &upper[(m, s)] * &(&dg[a][(s, b)] + &dg[b][(s, a)] - &dg[s][(a, b)]))
                                .sum();
                            s.scale(&half())
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// The no-torsion representative
/// `X^mu = G^{ab} P^mu_a ∂_b + Γ^b_{sr} G^{kr} P^mu_k P^l_b ∂/∂P^l_s`.
pub fn no_torsion_select(g: &KKMetric) -> HamiltonianFamily {
    let c = g.chart;
    let (lo, up) = (g.lower(), g.upper());
    let gam = christoffel(&lo, &up, &c);
    let d = c.dim();
    family_from(&c, &up, |k, b, s| (0..d).map(|r| &gam[b][s][r] * &up[(k, r)]).sum())
}

/// `X^mu ⨼ X^nu ⨼ dθ^l` for all `mu < nu` and `l`.
pub fn no_torsion_residual(chart: &BundleChart, fields: &[VectorField]) -> Vec<Expr> {
    let d = chart.dim();
    let dth = soldering_form(chart).d();
    let mut out = Vec::new();
    for mu in 0..d {
        for nu in (mu + 1)..d {
            let w = dth.interior(&fields[nu]).interior(&fields[mu]);
            out.extend((0..d).map(|l| w.function(&[l])));
        }
    }
    out
}

/// `(L_xi G)_{mk} = xi^l ∂_l G_{mk} + G_{nk} ∂_m xi^n + G_{mn} ∂_k xi^n`.
pub fn killing_residual(chart: &BundleChart, xi: &VectorFieldY, g: &Mat<Expr>) -> Mat<Expr> {
    let d = chart.dim();
    let v: Vec<Expr> = (0..d).map(|m| xi.get(&chart.ycoord(m))).collect();
    let dv: Vec<Vec<Expr>> = (0..d).map(|nu| (0..d).map(|m| v[nu].diff(&chart.ycoord(m))).collect()).collect();
    Mat::from_fn(d, d, |m, k| {
        let mut r: Expr = (0..d).map(|l| &v[l] * &g[(m, k)].diff(&chart.ycoord(l))).sum();
        for nu in 0..d {
            r = r + &g[(nu, k)] * &dv[nu][m] + &g[(m, nu)] * &dv[nu][k];
        }
        r
    })
}

pub fn killing_check(xi: &VectorFieldY, g: &KKMetric) -> Mat<Expr> {
    killing_residual(&g.chart, xi, &g.lower())
}

/// `L_{xi_LVY} ĝ^{mu nu}`.
pub fn lie_derivative_st2(g: &ST2Observable, xi: &VectorFieldY) -> Result<Mat<Expr>> {
    let lift = lift_to_lvy(&g.chart, xi)?;
    Ok(g.values().map(|e| lift.apply(e)))
}

pub fn invariance_check(g: &ST2Observable, xi: &VectorFieldY) -> Result<bool> {
    let l = lie_derivative_st2(g, xi)?;
    let d = g.chart.dim();
    Ok((0..d).all(|a| (0..d).all(|b| l[(a, b)].is_zero())))
}

/// Both brackets of a T¹ and an ST² observable:
/// `{f̂, ĝ} = −X_f(ĝ^{mu nu})` and `{ĝ, f̂} = −(X^mu(f^nu) + X^nu(f^mu))`.
pub fn poisson_t1_st2(f: &T1Observable, g: &ST2Observable, family: &HamiltonianFamily) -> Result<(Mat<Expr>, Mat<Expr>)> {
    let xf = hamiltonian_solve_t1(f)?;
    let fg = g.values().map(|e| -xf.apply(e));
    let fv = f.values();
    let d = g.chart.dim();
    let gf = Mat::from_fn(d, d, |m, n| -(family.fields[m].apply(&fv[n]) + family.fields[n].apply(&fv[m])));
    Ok((fg, gf))
}

/// Generators of `o(η) ⊕ o(ι)`: `ξ = E^a_b Y^b ∂_a` with `E = η⁻¹(e_ij − e_ji)` on
/// the base block and `E = ι⁻¹(e_AB − e_BA)` on the fiber block.
pub fn orthogonal_basis(chart: &BundleChart, eta: &Mat<Rational>, iota: &Mat<Rational>) -> Result<Vec<VectorFieldY>> {
    let mut out = Vec::new();
    let blocks = [(eta, 0usize), (iota, chart.n)];
    for (m, off) in blocks {
        let inv = m.inverse().ok_or(Error::Singular("metric block"))?;
        let s = m.rows();
        for i in 0..s {
            for j in (i + 1)..s {
                let anti = Mat::from_fn(s, s, |r, c| match (r, c) {
                    _ if r == i && c == j => <Rational as Scalar>::one(),
                    _ if r == j && c == i => -<Rational as Scalar>::one(),
                    _ => <Rational as Scalar>::zero(),
                });
                let e = inv.mul(&anti);
                let mut comps = vec![Expr::zero(); chart.dim()];
                for (r, comp) in comps.iter_mut().enumerate().skip(off).take(s) {
                    *comp = (0..s).map(|c| Expr::from_rational(e[(r - off, c)].clone()) * Expr::var(chart.ycoord(off + c))).sum();
                }
                out.push(from_components(chart, &comps));
            }
        }
    }
    Ok(out)
}

/// Per-`mu` drift of `J(xi)^mu` along the flow of `X^mu`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservationReport {
    /// `{Ĵ(xi), ĝ} = 0`; when false, drift is expected and not a failure.
    pub invariant: bool,
    pub drift: Vec<f64>,
    pub endpoints: Vec<Vec<f64>>,
}

pub fn conserved_quantity_check(
    xi: &VectorFieldY,
    g: &ST2Observable,
    family: &HamiltonianFamily,
    w0: &FramePoint<f64>,
    t_max: f64,
    dt: f64,
    exec: Exec,
) -> Result<ConservationReport> {
    let chart = g.chart;
    let f = T1Observable::new(chart, xi.clone())?;
    let (fg, _) = poisson_t1_st2(&f, g, family)?;
    let d = chart.dim();
    let invariant = (0..d).all(|a| (0..d).all(|b| fg[(a, b)].is_zero()));
    let layout = chart.lvy_coords();
    let j = f.values();
    let start = w0.state();
    let mus: Vec<usize> = (0..d).collect();
    let runs = exec.map(&mus, |&mu| -> Result<(f64, Vec<f64>)> {
        let spec = FieldSpec::new(&family.fields[mu], &layout)?;
        let guard = FrameGuard::new(&chart, &layout)?;
        let tr = integrate_rk4(&spec, &start, t_max, dt, Some(&guard))?;
        let jm = CompiledExpr::new(&j[mu], &layout)?;
        let j0 = jm.eval(&start)?;
        let mut drift: f64 = 0.0;
        for s in &tr.states {
            drift = drift.max((jm.eval(s)? - j0).abs());
        }
        Ok((drift, tr.last().to_vec()))
    });
    let mut drift = Vec::with_capacity(d);
    let mut endpoints = Vec::with_capacity(d);
    for r in runs {
        let (a, b) = r?;
        drift.push(a);
        endpoints.push(b);
    }
    Ok(ConservationReport { invariant, drift, endpoints })
}
