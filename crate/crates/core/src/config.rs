//! JSON scenario and suite configuration (format version 1).
//!
//! Rationals are strings such as `"3/4"`, `"-2"` or `"0.25"`; expressions use
//! the coordinate grammar of [`crate::symexpr::parse_expr`].

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geobundle::{from_components, BundleChart, VectorFieldY};
use crate::linalg::Mat;
use crate::multiphase::ThetaVariant;
use crate::random::{seed_from_env, Sampler};
use crate::symexpr::{parse_expr, rat_to_f64, Expr, Rational};
use crate::symobs::KKMetric;
use crate::vframe::FramePoint;
use crate::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

pub const SCENARIOS: [&str; 5] = ["linear-momentum", "angular-momentum", "affine", "reparam", "geodesic"];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iota: Option<Vec<Vec<String>>>,
    /// `k x n` connection components `γ^A_i` as expressions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorSpec>,
    /// Coordinate bindings on `L_V Y`; missing entries default to the origin
    /// and the identity frame. Absent altogether, a seeded random frame is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// `"canonical"` or `"flipped-momentum-sign"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_variant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<AffineSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reparam: Option<ReparamSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    /// `n + k` components along `x1..xn, y1..yk`.
    pub components: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub t_max: String,
    pub dt: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineSpec {
    pub k_matrix: Vec<Vec<String>>,
    pub v: Vec<String>,
    pub lambda_max: String,
    #[serde(default = "default_lambda_samples")]
    pub lambda_samples: usize,
}

fn default_lambda_samples() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReparamSpec {
    pub f: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Parses an exact rational literal.
pub fn parse_rational(s: &str) -> Result<Rational> {
    parse_expr(s, None)?.as_constant().ok_or_else(|| cfg_err(format!("'{s}' is not a rational constant")))
}

fn parse_matrix(rows: &[Vec<String>], r: usize, c: usize, what: &str) -> Result<Mat<Rational>> {
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(cfg_err(format!("{what} must be {r}x{c}")));
    }
    let parsed = rows.iter().map(|row| row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    Ok(Mat::from_rows(parsed))
}

fn identity(n: usize) -> Mat<Rational> {
    Mat::identity(n)
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        if cfg.version != CONFIG_VERSION {
            return Err(cfg_err(format!("unsupported config version {} (expected {CONFIG_VERSION})", cfg.version)));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        Config::from_json(&text)
    }

    pub fn chart(&self, default_n: usize, default_k: usize) -> Result<BundleChart> {
        BundleChart::new(self.n.unwrap_or(default_n), self.k.unwrap_or(default_k)).map_err(|e| cfg_err(e.to_string()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or_else(seed_from_env)
    }

    pub fn theta_variant(&self) -> Result<ThetaVariant> {
        match self.theta_variant.as_deref() {
            None | Some("canonical") => Ok(ThetaVariant::Canonical),
            Some("flipped-momentum-sign") => Ok(ThetaVariant::FlippedMomentumSign),
            Some(other) => Err(cfg_err(format!("unknown theta_variant '{other}'"))),
        }
    }

    /// Kaluza–Klein metric; `η` and `ι` default to identities, `γ` to zero.
    pub fn metric(&self, chart: &BundleChart) -> Result<KKMetric> {
        let (n, k) = (chart.n, chart.k);
        let eta = self.eta.as_ref().map_or_else(|| Ok(identity(n)), |m| parse_matrix(m, n, n, "eta"))?;
        let iota = self.iota.as_ref().map_or_else(|| Ok(identity(k)), |m| parse_matrix(m, k, k, "iota"))?;
        let gamma = match &self.gamma {
            None => Mat::zeros(k, n),
            Some(rows) => {
                if rows.len() != k || rows.iter().any(|r| r.len() != n) {
                    return Err(cfg_err(format!("gamma must be {k}x{n}")));
                }
                let parsed = rows
                    .iter()
                    .map(|r| r.iter().map(|s| parse_expr(s, Some((n, k))).map_err(Error::from)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Mat::from_rows(parsed)
            }
        };
        KKMetric::new(*chart, eta, iota, gamma).map_err(|e| cfg_err(e.to_string()))
    }

    pub fn generators(&self, chart: &BundleChart) -> Result<Vec<(String, VectorFieldY)>> {
        self.generators
            .iter()
            .map(|g| {
                if g.components.len() != chart.dim() {
                    return Err(cfg_err(format!("generator '{}' needs {} components", g.name, chart.dim())));
                }
                let comps = g.components.iter().map(|s| parse_expr(s, Some((chart.n, chart.k)))).collect::<std::result::Result<Vec<Expr>, _>>()?;
                let v = from_components(chart, &comps);
                chart.check_y_field(&v).map_err(|e| cfg_err(format!("generator '{}': {e}", g.name)))?;
                Ok((g.name.clone(), v))
            })
            .collect()
    }

    pub fn initial_point(&self, chart: &BundleChart) -> Result<FramePoint<Rational>> {
        let Some(bind) = &self.initial else {
            return Ok(Sampler::new(self.seed()).frame_point(chart));
        };
        let mut env: BTreeMap<_, Rational> = FramePoint::identity_at(*chart, vec![Rational::from_integer(0.into()); chart.dim()]).env();
        for (name, val) in bind {
            let e = parse_expr(name, Some((chart.n, chart.k)))?;
            let vars = e.variables();
            if vars.len() != 1 || e != Expr::var(vars[0].clone()) || !env.contains_key(&vars[0]) {
                return Err(cfg_err(format!("'{name}' is not a coordinate of the frame bundle")));
            }
            env.insert(vars[0].clone(), parse_rational(val)?);
        }
        let d = chart.dim();
        let y = (0..d).map(|m| env[&chart.ycoord(m)].clone()).collect();
        let p = Mat::from_fn(d, d, |m, nu| chart.frame_coord(m, nu).map_or_else(|| Rational::from_integer(0.into()), |c| env[&c].clone()));
        FramePoint::from_full(*chart, y, &p).map_err(|e| cfg_err(format!("initial frame: {e}")))
    }

    /// `(t_max, dt)` with defaults `10` and `1/1000`.
    pub fn integrator(&self) -> Result<(f64, f64)> {
        let (t, dt) = match &self.integrator {
            None => return Ok((10.0, 1e-3)),
            Some(s) => (rat_to_f64(&parse_rational(&s.t_max)?), rat_to_f64(&parse_rational(&s.dt)?)),
        };
        if !(dt > 0.0) || t < 0.0 {
            return Err(cfg_err("integrator needs dt > 0 and t_max >= 0"));
        }
        Ok((t, dt))
    }

    pub fn affine(&self, chart: &BundleChart) -> Result<(Mat<Rational>, Vec<Rational>, Rational, usize)> {
        let a = self.affine.as_ref().ok_or_else(|| cfg_err("affine scenario needs an 'affine' block"))?;
        let k = parse_matrix(&a.k_matrix, chart.k, chart.k, "affine.k_matrix")?;
        if a.v.len() != chart.k {
            return Err(cfg_err(format!("affine.v needs {} entries", chart.k)));
        }
        let v = a.v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Ok((k, v, parse_rational(&a.lambda_max)?, a.lambda_samples))
    }

    /// `(f, B, λ)`; `B` defaults to zero and `λ` to one.
    pub fn reparam(&self, chart: &BundleChart) -> Result<(Expr, Mat<Rational>, Rational)> {
        let r = self.reparam.as_ref().ok_or_else(|| cfg_err("reparam scenario needs a 'reparam' block"))?;
        let f = parse_expr(&r.f, Some((chart.n, chart.k)))?;
        let b = r.b.as_ref().map_or_else(|| Ok(Mat::zeros(chart.n, chart.k)), |m| parse_matrix(m, chart.n, chart.k, "reparam.b"))?;
        let lambda = r.lambda.as_deref().map_or_else(|| Ok(Rational::from_integer(1.into())), parse_rational)?;
        Ok((f, b, lambda))
    }
}
