//! `vertframe`: identity suite, flow scenarios and bracket inspection.
//!
//! Exit codes: 0 all checks pass, 1 a check or integration failed, 2 the
//! input could not be used.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vertframe::config::Config;
use vertframe::geobundle::{from_components, lie_bracket, require_projectable, BundleChart, VectorFieldY};
use vertframe::multiphase::MultiphaseSpace;
use vertframe::suite::{run_scenario, run_verify, select_checks, SuiteParams};
use vertframe::symexpr::{parse_expr, Expr};
use vertframe::vframe::{bracket_defect_lvy, momentum_observable_lvy, poisson_lvy};
use vertframe::Error;

const PRESETS: [(&str, &str); 6] = [
    ("linear-momentum", include_str!("../presets/linear-momentum.json")),
    ("angular-momentum", include_str!("../presets/angular-momentum.json")),
    ("affine", include_str!("../presets/affine.json")),
    ("affine-lorentz", include_str!("../presets/affine-lorentz.json")),
    ("reparam", include_str!("../presets/reparam.json")),
    ("geodesic", include_str!("../presets/geodesic.json")),
];

#[derive(Parser)]
#[command(name = "vertframe", version, about = "Momentum mappings on multiphase space and the vertically adapted frame bundle")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the symbolic identity suite.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated check names; all checks when omitted.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Also write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// List the available checks and exit.
        #[arg(long)]
        list: bool,
    },
    /// Integrate a flow scenario and write its CSV series and JSON report.
    Run {
        /// linear-momentum, angular-momentum, affine, affine-lorentz, reparam or geodesic.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print momenta, their bracket and the bracket defect for two generators.
    Bracket {
        #[arg(long, value_enum)]
        space: Space,
        /// Comma-separated components along x1..xn, y1..yk.
        #[arg(long)]
        xi: String,
        #[arg(long)]
        zeta: String,
        /// Base dimension; the fiber dimension is the remaining component count.
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    #[value(name = "Z", alias = "z")]
    Z,
    #[value(name = "LVY", alias = "lvy")]
    Lvy,
}

enum Failure {
    Checks,
    Input(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BlowUp(_) | Error::SingularFrame(_) | Error::Io(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Verify { config, checks, n, k, json, list } => verify(config, checks, n, k, json, list),
        Cmd::Run { scenario, config, out } => run(scenario, config, &out),
        Cmd::Bracket { space, xi, zeta, n } => bracket(space, &xi, &zeta, n),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn verify(config: Option<PathBuf>, checks: Vec<String>, n: Option<usize>, k: Option<usize>, json: Option<PathBuf>, list: bool) -> Result<(), Failure> {
    if list {
        for c in vertframe::suite::ALL_CHECKS {
            println!("{c}");
        }
        return Ok(());
    }
    let mut cfg = match &config {
        Some(p) => Config::load(p)?,
        None => Config { version: 1, ..Default::default() },
    };
    cfg.n = n.or(cfg.n);
    cfg.k = k.or(cfg.k);
    let requested = if checks.is_empty() { cfg.checks.clone() } else { checks };
    let selected = select_checks(&requested)?;
    let params = SuiteParams::from_config(&cfg)?;
    let report = run_verify(&params, &selected);
    print!("{}", report.summary());
    if let Some(p) = json.or_else(|| cfg.output.as_ref().and_then(|o| o.json.as_ref().map(PathBuf::from))) {
        write(&p, &report.to_json())?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn run(scenario: Option<String>, config: Option<PathBuf>, out: &Path) -> Result<(), Failure> {
    let mut cfg = match (&config, &scenario) {
        (Some(p), _) => Config::load(p)?,
        (None, Some(name)) => {
            let text = PRESETS.iter().find(|(k, _)| k == name).map(|(_, t)| *t).ok_or_else(|| {
                let names: Vec<&str> = PRESETS.iter().map(|(k, _)| *k).collect();
                Failure::Input(format!("unknown scenario '{name}' (presets: {})", names.join(", ")))
            })?;
            Config::from_json(text)?
        }
        (None, None) => return Err(Failure::Input("run needs --scenario or --config".into())),
    };
    let label = scenario.clone().or_else(|| cfg.scenario.clone()).unwrap_or_default();
    if config.is_some() {
        if let Some(s) = scenario {
            cfg.scenario = Some(s);
        }
    }
    let (report, table) = run_scenario(&cfg)?;
    fs::create_dir_all(out).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
    let outputs = cfg.output.clone().unwrap_or_default();
    let csv_path = out.join(outputs.csv.unwrap_or_else(|| format!("{label}.csv")));
    let json_path = out.join(outputs.json.unwrap_or_else(|| format!("{label}.json")));
    write(&csv_path, &table.to_csv_string())?;
    write(&json_path, &report.to_json())?;
    print!("{}", report.summary());
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn parse_field(src: &str, n: usize) -> Result<(BundleChart, VectorFieldY), Failure> {
    let parts: Vec<&str> = src.split(',').collect();
    if parts.len() <= n {
        return Err(Failure::Input(format!("'{src}' has {} components; need n + k with n = {n}, k >= 1", parts.len())));
    }
    let chart = BundleChart::new(n, parts.len() - n)?;
    let comps = parts.iter().map(|p| parse_expr(p.trim(), Some((chart.n, chart.k)))).collect::<Result<Vec<Expr>, _>>().map_err(Error::from)?;
    let v = from_components(&chart, &comps);
    chart.check_y_field(&v)?;
    require_projectable(&chart, &v)?;
    Ok((chart, v))
}

fn show_vec(v: &[Expr]) -> String {
    format!("({})", v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "))
}

fn bracket(space: Space, xi: &str, zeta: &str, n: usize) -> Result<(), Failure> {
    let (c, a) = parse_field(xi, n)?;
    let (c2, b) = parse_field(zeta, n)?;
    if c != c2 {
        return Err(Failure::Input("xi and zeta have different component counts".into()));
    }
    let br = lie_bracket(&c, &a, &b)?;
    println!("[xi, zeta] = {br}");
    match space {
        Space::Lvy => {
            println!("J(xi)          = {}", show_vec(&momentum_observable_lvy(&c, &a)?));
            println!("J(zeta)        = {}", show_vec(&momentum_observable_lvy(&c, &b)?));
            println!("{{J(xi),J(zeta)}} = {}", show_vec(&poisson_lvy(&c, &a, &b)?));
            println!("J([xi, zeta])  = {}", show_vec(&momentum_observable_lvy(&c, &br)?));
            println!("defect         = {}", show_vec(&bracket_defect_lvy(&c, &a, &b)?));
        }
        Space::Z => {
            let z = MultiphaseSpace::new(c);
            println!("J(xi)          = {}", z.momentum(&a)?);
            println!("J(zeta)        = {}", z.momentum(&b)?);
            println!("{{J(xi),J(zeta)}} = {}", z.poisson(&a, &b)?);
            println!("J([xi, zeta])  = {}", z.momentum(&br)?);
            println!("defect         = {}", z.bracket_defect(&a, &b)?);
            println!("-d(xi_Z ⨼ zeta_Z ⨼ Theta) = {}", z.exact_term(&a, &b)?);
        }
    }
    Ok(())
}
