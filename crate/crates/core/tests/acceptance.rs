//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the output.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use vertframe::config::Config;
use vertframe::geobundle::BundleChart;
use vertframe::par::Exec;
use vertframe::random::seed_from_env;
use vertframe::suite::{run_check, run_scenario, run_verify, SuiteParams, ALL_CHECKS};

const LINEAR: &str = include_str!("../../cli/presets/linear-momentum.json");
const ANGULAR: &str = include_str!("../../cli/presets/angular-momentum.json");
const AFFINE: &str = include_str!("../../cli/presets/affine.json");
const AFFINE_LORENTZ: &str = include_str!("../../cli/presets/affine-lorentz.json");
const GEODESIC: &str = include_str!("../../cli/presets/geodesic.json");

struct Line {
    id: &'static str,
    passed: bool,
    detail: String,
}

fn params(n: usize, k: usize) -> SuiteParams {
    SuiteParams::new(BundleChart::new(n, k).unwrap(), seed_from_env())
}

/// Runs named suite checks and folds them into one criterion line with an
/// optional wall-clock budget.
fn checks(id: &'static str, runs: &[(usize, usize, &str)], budget: Option<Duration>) -> Line {
    let t = Instant::now();
    let mut passed = true;
    let mut parts = Vec::new();
    for &(n, k, name) in runs {
        let o = run_check(&params(n, k), name);
        passed &= o.passed;
        parts.push(format!("{name}@({n},{k}): {}", o.detail));
    }
    let el = t.elapsed();
    if let Some(b) = budget {
        passed &= el < b;
        parts.push(format!("{:.2} s (budget {} s)", el.as_secs_f64(), b.as_secs()));
    }
    Line { id, passed, detail: parts.join("; ") }
}

fn scenario(text: &str) -> (vertframe::report::Report, Duration) {
    let t = Instant::now();
    let (r, _) = run_scenario(&Config::from_json(text).unwrap()).unwrap();
    (r, t.elapsed())
}

fn scenario_line(id: &'static str, texts: &[(&str, &str)], budget: Option<Duration>) -> Line {
    let mut passed = true;
    let mut parts = Vec::new();
    let mut total = Duration::ZERO;
    for (label, text) in texts {
        let (r, el) = scenario(text);
        total += el;
        passed &= r.passed();
        let metrics: Vec<String> = r.metrics.iter().map(|(k, v)| format!("{k}={v:e}")).collect();
        let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        parts.push(format!("{label}: {}{}", metrics.join(", "), if failed.is_empty() { String::new() } else { format!(" failed {failed:?}") }));
    }
    if let Some(b) = budget {
        passed &= total < b;
        parts.push(format!("{:.2} s (budget {} s)", total.as_secs_f64(), b.as_secs()));
    }
    Line { id, passed, detail: parts.join("; ") }
}

fn suite_line() -> Line {
    let p = params(2, 2);
    let t = Instant::now();
    let a = run_verify(&p, &ALL_CHECKS);
    let el = t.elapsed();
    let b = run_verify(&p, &ALL_CHECKS);
    let mut seq = p.clone();
    seq.exec = Exec::Sequential;
    let c = run_verify(&seq, &ALL_CHECKS);
    let deterministic = a.to_json() == b.to_json() && a.to_json() == c.to_json();
    let passed = a.passed() && el < Duration::from_secs(60) && deterministic;
    let detail = format!(
        "{} checks, {} failed, {:.2} s (budget 60 s); repeated and sequential JSON identical: {deterministic}",
        a.checks.len(),
        a.checks.iter().filter(|c| !c.passed).count(),
        el.as_secs_f64()
    );
    Line { id: "11 full suite runtime and determinism", passed, detail }
}

fn main() -> ExitCode {
    let s20 = Some(Duration::from_secs(20));
    let s30 = Some(Duration::from_secs(30));
    let lines = vec![
        checks("1 bracket closure on L_V Y", &[(2, 2, "lvy-closure")], s20),
        checks("2 Z bracket defect is exact", &[(2, 2, "z-defect")], s30),
        checks("3 defining equations on Z and L_V Y", &[(2, 2, "defining-z"), (2, 2, "defining-lvy")], None),
        checks("4 pairing and pullback theorems", &[(1, 1, "pairing"), (2, 2, "pairing"), (1, 1, "pullback"), (2, 2, "pullback")], s30),
        checks("5 G_A structure", &[(1, 1, "ga-structure"), (2, 2, "ga-structure")], None),
        checks("6 Killing generators and dilation", &[(2, 2, "killing")], None),
        scenario_line("7 conservation flows", &[("linear", LINEAR), ("angular", ANGULAR)], Some(Duration::from_secs(10))),
        scenario_line("8 parallel-axis term", &[("k=3 Euclidean", AFFINE), ("k=4 Lorentz", AFFINE_LORENTZ)], None),
        scenario_line("9 geodesic and frame transport", &[("n=k=1, gamma=x1", GEODESIC)], None),
        checks("10 RK4 order", &[(1, 1, "rk4-order")], None),
        suite_line(),
    ];
    for l in &lines {
        println!("{} criterion {}: {}", if l.passed { "PASS" } else { "FAIL" }, l.id, l.detail);
    }
    let failed = lines.iter().filter(|l| !l.passed).count();
    println!("acceptance: {} of {} criteria pass", lines.len() - failed, lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
