//! Config-driven execution: everything the CLI can do, minus argument
//! parsing. A [`RunConfig`] is validated, executed, and turned into a
//! report document, a CSV table, and an exit code: 0 when every check
//! passed, 1 when the run completed but a check failed, 2 when the run
//! itself could not be carried out (the error is emitted as JSON).

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::hardy::{to_boundary, CoefSeries, C64};
use crate::inner_outer::{poly_inner_outer, InnerFunction};
use crate::model_ops::shift_matrix;
use crate::probes::{
    biorthogonality_suite, disk_grid, nonclosability_search, rsc_witness,
    spectral_picture_column, spectral_picture_shift, worked_example_suite, CheckRow,
    ClosabilityScenario, WitnessOperator,
};
use crate::report;
use crate::theta::{
    confluence_test, corona_similarity, s_theta, theta_basis, ConfluenceOutcome, CoronaOutcome,
    Theta,
};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Factor,
    Model,
    Theta,
    Probe,
    Suite,
}

/// One run, fully described. Serializable so that reports can echo the
/// exact configuration that produced them.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub parameters: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

/// Every name accepted by `preset` fields somewhere in the CLI.
pub fn list_presets() -> Vec<&'static str> {
    vec![
        "paper-example",
        "common-factor-z",
        "shift",
        "poly-vs-outer-exp",
        "poly-vs-kernels-ladder",
        "bilateral-arcs-half",
    ]
}

pub struct RunOutcome {
    pub report: Value,
    pub csv: String,
    pub all_pass: bool,
}

// --- parameter plumbing ---------------------------------------------------------

fn check_keys(map: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    for k in map.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Config(format!(
                "unknown parameter '{}' (allowed: {})",
                k,
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

fn usize_param(map: &Map<String, Value>, key: &str, default: usize) -> Result<usize> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| Error::Config(format!("parameter '{}' must be a nonnegative integer", key))),
    }
}

fn f64_param(map: &Map<String, Value>, key: &str, default: f64) -> Result<f64> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| Error::Config(format!("parameter '{}' must be a number", key))),
    }
}

fn str_param<'a>(map: &'a Map<String, Value>, key: &str) -> Result<Option<&'a str>> {
    match map.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.as_str())),
        Some(_) => Err(Error::Config(format!("parameter '{}' must be a string", key))),
    }
}

fn value_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::Config(format!("{} must be a number", what)))
}

/// Polynomial coefficients, constant term first. Accepts a JSON array of
/// numbers or [re, im] pairs, or a comma-separated string.
fn parse_poly(v: &Value) -> Result<CoefSeries> {
    match v {
        Value::String(s) => {
            let mut c = Vec::new();
            for tok in s.split(',') {
                let t = tok.trim();
                let x: f64 = t
                    .parse()
                    .map_err(|_| Error::Config(format!("bad coefficient '{}'", t)))?;
                c.push(x);
            }
            if c.is_empty() {
                return Err(Error::Config("empty coefficient list".into()));
            }
            Ok(CoefSeries::from_reals(&c))
        }
        Value::Array(items) if !items.is_empty() => {
            let mut c = Vec::new();
            for it in items {
                match it {
                    Value::Array(p) if p.len() == 2 => c.push(C64::new(
                        value_f64(&p[0], "coefficient")?,
                        value_f64(&p[1], "coefficient")?,
                    )),
                    other => c.push(C64::new(value_f64(other, "coefficient")?, 0.0)),
                }
            }
            Ok(CoefSeries::new(c))
        }
        _ => Err(Error::Config(
            "poly must be a comma-separated string or a nonempty array of coefficients".into(),
        )),
    }
}

/// Zeros of a Blaschke product: JSON array of numbers / [re, im] pairs, or
/// a string of `re,im` pairs separated by semicolons.
fn parse_zeros(v: &Value) -> Result<Vec<C64>> {
    match v {
        Value::String(s) => {
            let mut out = Vec::new();
            for pair in s.split(';') {
                let parts: Vec<&str> = pair.split(',').map(str::trim).collect();
                let (re, im) = match parts.as_slice() {
                    [re] => (*re, "0"),
                    [re, im] => (*re, *im),
                    _ => return Err(Error::Config(format!("bad zero '{}'", pair))),
                };
                let re: f64 =
                    re.parse().map_err(|_| Error::Config(format!("bad zero '{}'", pair)))?;
                let im: f64 =
                    im.parse().map_err(|_| Error::Config(format!("bad zero '{}'", pair)))?;
                out.push(C64::new(re, im));
            }
            Ok(out)
        }
        Value::Array(items) => items
            .iter()
            .map(|it| match it {
                Value::Array(p) if p.len() == 2 => Ok(C64::new(
                    value_f64(&p[0], "zero")?,
                    value_f64(&p[1], "zero")?,
                )),
                other => Ok(C64::new(value_f64(other, "zero")?, 0.0)),
            })
            .collect(),
        _ => Err(Error::Config("zeros must be an array or a 're,im;re,im' string".into())),
    }
}

/// Keep only the named checks. `selection` is "all" or a comma-separated list
/// of row names; asking for a name that does not exist is an error, not a
/// silent no-op.
fn filter_checks(rows: Vec<CheckRow>, selection: &str) -> Result<Vec<CheckRow>> {
    let selection = selection.trim();
    if selection.is_empty() || selection == "all" {
        return Ok(rows);
    }
    let wanted: Vec<&str> = selection.split(',').map(str::trim).collect();
    for w in &wanted {
        if !rows.iter().any(|r| r.name == *w) {
            let names: Vec<&str> = rows.iter().map(|r| r.name.as_str()).collect();
            return Err(Error::Config(format!(
                "no check named '{}' (have: {})",
                w,
                names.join(", ")
            )));
        }
    }
    Ok(rows.into_iter().filter(|r| wanted.contains(&r.name.as_str())).collect())
}

// --- commands ---------------------------------------------------------------------

fn run_factor(config: &RunConfig) -> Result<(Vec<CheckRow>, Value)> {
    check_keys(&config.parameters, &["poly"])?;
    if config.preset.is_some() {
        return Err(Error::Config("factor takes an explicit poly, not a preset".into()));
    }
    let poly = config
        .parameters
        .get("poly")
        .ok_or_else(|| Error::Config("factor needs a 'poly' parameter".into()))?;
    let p = parse_poly(poly)?;
    let (inner, outer) = poly_inner_outer(&p)?;
    let len = p.len() + inner.zeros.len() + 4;
    let recombined = inner.series_to(len)?.mul(&outer).truncated(len);
    let residual = recombined.sub(&p.padded(len)).norm() / p.norm().max(1e-300);
    let rows = vec![CheckRow::le("factorization-residual", p.len(), residual, 1e-9)];
    let detail = json!({
        "inner": serde_json::to_value(&inner).map_err(|e| Error::Io(e.to_string()))?,
        "outer": serde_json::to_value(&outer).map_err(|e| Error::Io(e.to_string()))?,
        "inner-degree": inner.zeros.len(),
    });
    Ok((rows, detail))
}

fn injectivity_rows(certs: &[crate::theta::InjectivityCertificate], n: usize) -> Vec<CheckRow> {
    certs
        .iter()
        .map(|c| CheckRow::ge(&format!("injectivity[{}]", c.label), n, c.sigma_min, 1e-6))
        .collect()
}

fn run_model(config: &RunConfig) -> Result<(Vec<CheckRow>, Value)> {
    check_keys(&config.parameters, &["n", "k", "zeros"])?;
    let n = usize_param(&config.parameters, "n", 64)?;
    let k = usize_param(&config.parameters, "k", 8)?;
    let preset = config.preset.as_deref().unwrap_or("shift");
    let zeros = config.parameters.get("zeros").map(parse_zeros).transpose()?;

    if let Some(zeros) = zeros {
        // Finite Blaschke model space.
        let m = InnerFunction::blaschke(zeros)?;
        let witness = rsc_witness(WitnessOperator::Model { m: &m, n })?;
        let mut rows = vec![CheckRow::le("witness-consistency", n, witness.consistency, 1e-10)];
        rows.extend(injectivity_rows(&witness.certificates, n));
        // |m| = 1 on the boundary grid, up to the series tail.
        let series = m.series_to(n.max(128))?;
        let grid = (2 * series.len()).next_power_of_two();
        let vals = to_boundary(&series, grid)?;
        let uni = vals
            .values
            .iter()
            .map(|v| (v.norm() - 1.0).abs())
            .fold(0.0f64, f64::max);
        rows.push(CheckRow::le("blaschke-unimodularity", n, uni, 1e-8));
        let detail = json!({
            "witness": serde_json::to_value(&witness).map_err(|e| Error::Io(e.to_string()))?,
        });
        return Ok((rows, detail));
    }

    if preset != "shift" {
        return Err(Error::Config(format!(
            "model preset must be 'shift' or zeros must be given, got '{}'",
            preset
        )));
    }
    let witness = rsc_witness(WitnessOperator::Shift { n })?;
    let mut rows = vec![CheckRow::le("witness-consistency", n, witness.consistency, 1e-12)];
    rows.extend(injectivity_rows(&witness.certificates, n));
    let a = shift_matrix(n);
    let biorth = biorthogonality_suite(&a, k.min(n))?;
    rows.push(CheckRow::le("biorthogonality-deviation", n, biorth.max_deviation, 1e-10));
    let pic = spectral_picture_shift(&[n, n + n / 2], &disk_grid(&[0.3, 0.6], 8), 1e-4)?;
    rows.push(CheckRow::ge("spectral-stability", n, pic.stable_fraction, 0.9));
    let detail = json!({
        "witness": serde_json::to_value(&witness).map_err(|e| Error::Io(e.to_string()))?,
        "biorthogonality-deviation": biorth.max_deviation,
        "spectral": serde_json::to_value(&pic).map_err(|e| Error::Io(e.to_string()))?,
    });
    Ok((rows, detail))
}

fn common_factor_rows(n: usize, m_grid: usize) -> Result<(Vec<CheckRow>, Value)> {
    let theta = Theta::preset("common-factor-z")?;
    let tb = theta_basis(&theta, n)?;
    let a = s_theta(&tb);
    let mut rows = Vec::new();
    rows.push(CheckRow::le("column-unimodularity", n, theta.column_residual(m_grid)?, 1e-12));
    // The vanishing constraint at degree zero is empty here, so the
    // staircase gains one extra member.
    rows.push(CheckRow::le(
        "staircase-dimension",
        n,
        (tb.dim() as f64 - (n + 1) as f64).abs(),
        0.0,
    ));
    let confluence = confluence_test(&tb, &a)?;
    match &confluence {
        ConfluenceOutcome::NotConfluent { witness_norm, annihilation, .. } => {
            rows.push(CheckRow::ge("confluence-witness-norm", n, *witness_norm, 0.1));
            rows.push(CheckRow::le("confluence-annihilation", n, *annihilation, 1e-7));
        }
        ConfluenceOutcome::Confluent { .. } => {
            rows.push(CheckRow::ge("confluence-witness-norm", n, 0.0, 0.1));
            rows.push(CheckRow::le("confluence-annihilation", n, 1.0, 1e-7));
        }
    }
    let corona = corona_similarity(&theta, 8, m_grid)?;
    match &corona {
        CoronaOutcome::Infeasible { per_degree, .. } => {
            let floor = per_degree.iter().cloned().fold(f64::INFINITY, f64::min);
            rows.push(CheckRow::ge("similarity-residual-floor", n, floor, 1e-6));
        }
        _ => {
            rows.push(CheckRow::ge("similarity-residual-floor", n, 0.0, 1e-6));
        }
    }
    let detail = json!({
        "trusted": tb.trusted(),
        "guard": tb.guard(),
        "confluence": serde_json::to_value(&confluence).map_err(|e| Error::Io(e.to_string()))?,
        "similarity": serde_json::to_value(&corona).map_err(|e| Error::Io(e.to_string()))?,
    });
    Ok((rows, detail))
}

fn run_theta(config: &RunConfig) -> Result<(Vec<CheckRow>, Value)> {
    check_keys(&config.parameters, &["n", "m", "checks"])?;
    let n = usize_param(&config.parameters, "n", 256)?;
    let m_grid = usize_param(&config.parameters, "m", 1024)?;
    let preset = config
        .preset
        .as_deref()
        .ok_or_else(|| Error::Config("theta needs a preset".into()))?;
    let (rows, detail) = match preset {
        "paper-example" => {
            let rows = worked_example_suite(n, m_grid)?;
            let tb = theta_basis(&Theta::preset(preset)?, n)?;
            let detail = json!({
                "trusted": tb.trusted(),
                "guard": tb.guard(),
                "dimension": tb.dim(),
            });
            (rows, detail)
        }
        "common-factor-z" => common_factor_rows(n, m_grid)?,
        other => {
            return Err(Error::Config(format!(
                "unknown column preset '{}' (have: {})",
                other,
                Theta::preset_names().join(", ")
            )))
        }
    };
    let selection = str_param(&config.parameters, "checks")?.unwrap_or("all");
    Ok((filter_checks(rows, selection)?, detail))
}

fn scenario_preset(name: &str) -> Option<(ClosabilityScenario, f64, usize)> {
    match name {
        "poly-vs-outer-exp" => Some((ClosabilityScenario::PolyVsOuter, 1e-2, 40)),
        "poly-vs-kernels-ladder" => Some((ClosabilityScenario::PolyVsKernels, 1e-1, 30)),
        "bilateral-arcs-half" => Some((ClosabilityScenario::BilateralArcs, 1e-3, 8)),
        _ => None,
    }
}

fn run_probe(config: &RunConfig) -> Result<(Vec<CheckRow>, Value)> {
    let kind = str_param(&config.parameters, "kind")?
        .ok_or_else(|| Error::Config("probe needs a kind".into()))?
        .to_string();
    match kind.as_str() {
        "closability" => {
            check_keys(&config.parameters, &["kind", "scenario", "eps", "cap", "g"])?;
            let from_preset = match config.preset.as_deref() {
                None => None,
                Some(p) => Some(scenario_preset(p).ok_or_else(|| {
                    Error::Config(format!("unknown closability preset '{}'", p))
                })?),
            };
            let scenario = match str_param(&config.parameters, "scenario")? {
                Some(s) => ClosabilityScenario::parse(s)?,
                None => {
                    from_preset
                        .map(|(s, _, _)| s)
                        .ok_or_else(|| Error::Config("probe closability needs a scenario".into()))?
                }
            };
            let eps = f64_param(
                &config.parameters,
                "eps",
                from_preset.map(|(_, e, _)| e).unwrap_or(1e-2),
            )?;
            let cap = usize_param(
                &config.parameters,
                "cap",
                from_preset.map(|(_, _, c)| c).unwrap_or(40),
            )?;
            let g = str_param(&config.parameters, "g")?.unwrap_or("one");
            if g != "one" {
                return Err(Error::Config(format!(
                    "the only implemented target is g = one, got '{}'",
                    g
                )));
            }
            let rep = nonclosability_search(scenario, eps, cap)?;
            let mut rows = Vec::new();
            if rep.certifying {
                rows.push(CheckRow::le("witness-eps", rep.steps.len(), rep.achieved_eps, eps));
                if let Some(w) = &rep.witness {
                    rows.push(CheckRow::le("witness-consistency", rep.steps.len(), w.consistency, 1e-7));
                }
            }
            let detail = serde_json::to_value(&rep).map_err(|e| Error::Io(e.to_string()))?;
            Ok((rows, detail))
        }
        "witness" => {
            check_keys(&config.parameters, &["kind", "operator", "n", "zeros"])?;
            let operator = str_param(&config.parameters, "operator")?.unwrap_or("shift");
            match operator {
                "shift" => {
                    let n = usize_param(&config.parameters, "n", 64)?;
                    let w = rsc_witness(WitnessOperator::Shift { n })?;
                    let mut rows =
                        vec![CheckRow::le("witness-consistency", n, w.consistency, 1e-12)];
                    rows.extend(injectivity_rows(&w.certificates, n));
                    let detail = serde_json::to_value(&w).map_err(|e| Error::Io(e.to_string()))?;
                    Ok((rows, detail))
                }
                "model" => {
                    let n = usize_param(&config.parameters, "n", 64)?;
                    let zeros = match config.parameters.get("zeros") {
                        Some(v) => parse_zeros(v)?,
                        None => vec![C64::new(0.5, 0.0), C64::new(-0.3, 0.2)],
                    };
                    let m = InnerFunction::blaschke(zeros)?;
                    let w = rsc_witness(WitnessOperator::Model { m: &m, n })?;
                    let mut rows =
                        vec![CheckRow::le("witness-consistency", n, w.consistency, 1e-10)];
                    rows.extend(injectivity_rows(&w.certificates, n));
                    let detail = serde_json::to_value(&w).map_err(|e| Error::Io(e.to_string()))?;
                    Ok((rows, detail))
                }
                "column" => {
                    let n = usize_param(&config.parameters, "n", 96)?;
                    let preset = config.preset.as_deref().unwrap_or("paper-example");
                    let theta = Theta::preset(preset)?;
                    let tb = theta_basis(&theta, n)?;
                    let a = s_theta(&tb);
                    let w = rsc_witness(WitnessOperator::Column { tb: &tb, a: &a })?;
                    let mut rows =
                        vec![CheckRow::le("witness-consistency", n, w.consistency, 1e-9)];
                    rows.extend(injectivity_rows(&w.certificates, n));
                    let detail = serde_json::to_value(&w).map_err(|e| Error::Io(e.to_string()))?;
                    Ok((rows, detail))
                }
                other => Err(Error::Config(format!(
                    "witness operator must be shift, model, or column, got '{}'",
                    other
                ))),
            }
        }
        "biorthogonality" => {
            check_keys(&config.parameters, &["kind", "operator", "n", "k"])?;
            let operator = str_param(&config.parameters, "operator")?.unwrap_or("shift");
            let k = usize_param(&config.parameters, "k", 10)?;
            match operator {
                "shift" => {
                    let n = usize_param(&config.parameters, "n", 64)?;
                    let a = shift_matrix(n);
                    let b = biorthogonality_suite(&a, k.min(n))?;
                    let rows = vec![CheckRow::le(
                        "biorthogonality-deviation",
                        n,
                        b.max_deviation,
                        1e-10,
                    )];
                    let detail = serde_json::to_value(&b).map_err(|e| Error::Io(e.to_string()))?;
                    Ok((rows, detail))
                }
                "column" => {
                    let n = usize_param(&config.parameters, "n", 96)?;
                    let preset = config.preset.as_deref().unwrap_or("paper-example");
                    let theta = Theta::preset(preset)?;
                    let tb = theta_basis(&theta, n)?;
                    let a = s_theta(&tb);
                    let b = biorthogonality_suite(&a, k)?;
                    let rows = vec![CheckRow::le(
                        "biorthogonality-deviation",
                        n,
                        b.max_deviation,
                        1e-8,
                    )];
                    let detail = serde_json::to_value(&b).map_err(|e| Error::Io(e.to_string()))?;
                    Ok((rows, detail))
                }
                other => Err(Error::Config(format!(
                    "biorthogonality operator must be shift or column, got '{}'",
                    other
                ))),
            }
        }
        "spectral" => {
            check_keys(&config.parameters, &["kind", "operator", "n", "per-circle", "tol"])?;
            let operator = str_param(&config.parameters, "operator")?.unwrap_or("shift");
            let per = usize_param(&config.parameters, "per-circle", 14)?;
            let tol = f64_param(&config.parameters, "tol", 1e-5)?;
            let lambdas = disk_grid(&[0.3, 0.5, 0.7], per);
            let pic = match operator {
                "shift" => {
                    let n = usize_param(&config.parameters, "n", 256)?;
                    spectral_picture_shift(&[n / 4, n / 2, n], &lambdas, tol)?
                }
                "column" => {
                    let n = usize_param(&config.parameters, "n", 96)?;
                    let preset = config.preset.as_deref().unwrap_or("paper-example");
                    let theta = Theta::preset(preset)?;
                    spectral_picture_column(&theta, &[n / 2, (3 * n) / 4, n], &lambdas, tol)?
                }
                other => {
                    return Err(Error::Config(format!(
                        "spectral operator must be shift or column, got '{}'",
                        other
                    )))
                }
            };
            let rows =
                vec![CheckRow::ge("spectral-stability", pic.points.len(), pic.stable_fraction, 0.9)];
            let detail = serde_json::to_value(&pic).map_err(|e| Error::Io(e.to_string()))?;
            Ok((rows, detail))
        }
        other => Err(Error::Config(format!(
            "unknown probe kind '{}' (have: closability, witness, biorthogonality, spectral)",
            other
        ))),
    }
}

fn run_suite(config: &RunConfig) -> Result<(Vec<CheckRow>, Value)> {
    check_keys(&config.parameters, &["n", "m", "checks"])?;
    let n = usize_param(&config.parameters, "n", 256)?;
    let m_grid = usize_param(&config.parameters, "m", 1024)?;
    let mut rows = worked_example_suite(n, m_grid)?;

    // Orbit pairing and witness rows at a fixed mid-size truncation: the
    // trust window, not the ambient size, is what they exercise.
    let theta = Theta::preset("paper-example")?;
    let tb = theta_basis(&theta, 96)?;
    let a = s_theta(&tb);
    let biorth = biorthogonality_suite(&a, 10)?;
    rows.push(CheckRow::le("biorthogonality-deviation", 96, biorth.max_deviation, 1e-8));
    let witness = rsc_witness(WitnessOperator::Column { tb: &tb, a: &a })?;
    rows.push(CheckRow::le("witness-consistency", 96, witness.consistency, 1e-9));

    let lambdas = disk_grid(&[0.3, 0.5, 0.7], 14);
    let shift_pic = spectral_picture_shift(&[64, 128, 256], &lambdas, 1e-5)?;
    rows.push(CheckRow::ge(
        "spectral-stability-shift",
        lambdas.len(),
        shift_pic.stable_fraction,
        0.9,
    ));
    let column_pic = spectral_picture_column(&theta, &[48, 72, 96], &lambdas, 1e-5)?;
    rows.push(CheckRow::ge(
        "spectral-stability-column",
        lambdas.len(),
        column_pic.stable_fraction,
        0.9,
    ));

    let outer = nonclosability_search(ClosabilityScenario::PolyVsOuter, 1e-2, 40)?;
    rows.push(CheckRow::le("closability-outer-eps", outer.steps.len(), outer.achieved_eps, 1e-2));
    let kernels = nonclosability_search(ClosabilityScenario::PolyVsKernels, 1e-1, 30)?;
    rows.push(CheckRow::le(
        "closability-kernels-eps",
        kernels.steps.len(),
        kernels.achieved_eps,
        1e-1,
    ));

    let detail = json!({
        "spectral-shift": serde_json::to_value(&shift_pic).map_err(|e| Error::Io(e.to_string()))?,
        "spectral-column": serde_json::to_value(&column_pic).map_err(|e| Error::Io(e.to_string()))?,
        "closability-outer": serde_json::to_value(&outer).map_err(|e| Error::Io(e.to_string()))?,
        "closability-kernels": serde_json::to_value(&kernels).map_err(|e| Error::Io(e.to_string()))?,
    });
    let selection = str_param(&config.parameters, "checks")?.unwrap_or("all");
    Ok((filter_checks(rows, selection)?, detail))
}

// --- execution --------------------------------------------------------------------

/// Validate and execute; no output side effects.
pub fn execute(config: &RunConfig) -> Result<RunOutcome> {
    if config.schema != report::SCHEMA {
        return Err(Error::Config(format!(
            "unsupported schema {} (this build reads {})",
            config.schema,
            report::SCHEMA
        )));
    }
    let (checks, detail) = match config.command {
        Command::Factor => run_factor(config)?,
        Command::Model => run_model(config)?,
        Command::Theta => run_theta(config)?,
        Command::Probe => run_probe(config)?,
        Command::Suite => run_suite(config)?,
    };
    let all_pass = checks.iter().all(|c| c.pass);
    let echo = serde_json::to_value(config).map_err(|e| Error::Io(e.to_string()))?;
    let doc = report::assemble(echo, &checks, detail);
    Ok(RunOutcome { report: doc, csv: report::to_csv(&checks), all_pass })
}

fn configure_threads() {
    if let Ok(v) = std::env::var("HARDYLAB_THREADS") {
        if let Ok(t) = v.parse::<usize>() {
            if t >= 1 {
                // A second call (tests, repeated runs) fails harmlessly.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
        }
    }
}

fn write_outputs(out: &RunOutcome, target: &str, duration_ms: u128) -> Result<()> {
    let path = PathBuf::from(target);
    let json_path = if path.extension().map(|e| e == "json").unwrap_or(false) {
        path.clone()
    } else {
        path.with_extension("json")
    };
    if let Some(dir) = json_path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let csv_path = json_path.with_extension("csv");
    let meta_path = json_path.with_extension("meta.json");
    std::fs::write(&json_path, report::to_json(&out.report))?;
    std::fs::write(&csv_path, &out.csv)?;
    std::fs::write(&meta_path, report::to_json(&report::meta(duration_ms)))?;
    Ok(())
}

/// Run a config end to end: execute, emit the report (stdout or files),
/// and map the outcome to the exit code contract.
pub fn run(config: &RunConfig) -> i32 {
    configure_threads();
    let started = std::time::Instant::now();
    match execute(config) {
        Ok(out) => {
            if let Some(target) = &config.output {
                if let Err(e) = write_outputs(&out, target, started.elapsed().as_millis()) {
                    println!("{}", report::to_json(&e.to_json()));
                    return 2;
                }
            } else {
                print!("{}", report::to_json(&out.report));
            }
            if out.all_pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            println!("{}", report::to_json(&e.to_json()));
            2
        }
    }
}
