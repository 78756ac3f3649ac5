use std::path::Path;

use maxzonoid::alternation::{check_extremal_consistency, check_table_alternation, construct_from_extremal, Consistency};
use maxzonoid::dependence::{
    chi, extremal_coefficient, inverted_pearson_2d, kendall_tau_2d_with_tol, multivariate_rho, spearman_rho,
    ExtremalTable, MeasureMethod,
};
use maxzonoid::distribution::{cdf, copula, pickands, quantile_curve, simulate, MaxStableModel, SampleMatrix};
use maxzonoid::estimate::{
    convergence_diagnostic, empirical_spectral, estimate_zonoid_2d, estimated_dependency_set, DirectionEstimate,
};
use maxzonoid::families::{discretize, DEFAULT_ATOMS};
use maxzonoid::geometry::{DISTANCE_GRID_2D, ENVELOPE_GRID};
use maxzonoid::spectral::{spectral_from_polygon_2d, validate_dependency};
use maxzonoid::{DependencySet, ReferenceNorm};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{estimate_json, read_table, ResultDocument, Sink, Table};
use crate::spec::{subset_text, SpecFile};
use crate::{Cli, Command, Common, EvalKind};

const DEFAULT_SIM_SAMPLES: usize = 1000;
const DEFAULT_MC_SAMPLES: usize = 200_000;
const DEFAULT_TAU_TOL: f64 = 1e-8;
const DEFAULT_CURVE_POINTS: usize = 200;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let c = &cli.common;
    let sink = Sink::new(c.out.as_deref());
    match &cli.command {
        Command::Eval { points, what } => eval(c, &sink, points, *what),
        Command::Measures { max_subset } => measures(c, &sink, *max_subset),
        Command::Simulate => simulate_cmd(c, &sink),
        Command::Spectral { to_atoms, to_polygon, norm } => spectral(c, &sink, *to_atoms, *to_polygon, (*norm).into()),
        Command::CheckTheta => check_theta(c, &sink),
        Command::ConstructTheta => construct_theta(c, &sink),
        Command::Estimate { data, threshold, norm, halfplanes } => match (data, halfplanes) {
            (Some(d), _) => estimate(&sink, d, *threshold, (*norm).into()),
            (None, Some(h)) => estimate_halfplanes(&sink, h),
            (None, None) => Err(CliError::Usage("estimate needs --data or --halfplanes".into())),
        },
        Command::Quantile { alpha } => quantile(c, &sink, *alpha),
        Command::Converge { data, thresholds } => converge(c, &sink, data, thresholds),
    }
}

fn load_spec(c: &Common) -> Result<SpecFile, CliError> {
    let Some(path) = &c.model else {
        return Err(CliError::Usage("this command needs --model FILE".into()));
    };
    SpecFile::load(path)
}

fn load_model(c: &Common) -> Result<(SpecFile, MaxStableModel), CliError> {
    let spec = load_spec(c)?;
    let model = spec.model()?;
    Ok((spec, model))
}

fn base_meta(spec: &SpecFile) -> Vec<(&'static str, String)> {
    vec![("tool", crate::output::TOOL.into()), ("version", maxzonoid::VERSION.into()), ("model", spec.describe())]
}

fn samples_from(table: &Table, d: Option<usize>, name: &str) -> Result<SampleMatrix, CliError> {
    if let Some(d) = d {
        if table.ncols() != d {
            return Err(CliError::Validation(format!("{name}: expected {d} columns, found {}", table.ncols())));
        }
    }
    if table.rows.is_empty() {
        return Err(CliError::Validation(format!("{name}: no data rows")));
    }
    Ok(SampleMatrix::from_rows(&table.rows)?)
}

fn eval(c: &Common, sink: &Sink, points: &Path, what: EvalKind) -> Result<(), CliError> {
    let (spec, model) = load_model(c)?;
    let table = read_table(points)?;
    let d = model.dim();
    let want = if what == EvalKind::Pickands { d - 1 } else { d };
    if table.ncols() != want {
        return Err(CliError::Validation(format!(
            "{}: expected {want} columns for {what:?}, found {}",
            points.display(),
            table.ncols()
        )));
    }
    let name = match what {
        EvalKind::Cdf => "cdf",
        EvalKind::Copula => "copula",
        EvalKind::Pickands => "pickands",
        EvalKind::Norm => "norm",
    };
    let mut rows = Vec::with_capacity(table.rows.len());
    for r in &table.rows {
        let v = match what {
            EvalKind::Cdf => cdf(&model, r)?,
            EvalKind::Copula => copula(&model, r)?,
            EvalKind::Pickands => pickands(&model, r)?,
            EvalKind::Norm => model.tail_dependence(r)?,
        };
        let mut row = r.clone();
        row.push(v);
        rows.push(row);
    }
    let mut header = table.header.clone();
    header.push(name.into());
    sink.write_csv(&base_meta(&spec), &header, &rows)
}

fn measures(c: &Common, sink: &Sink, max_subset: usize) -> Result<(), CliError> {
    let (spec, model) = load_model(c)?;
    let k = model.dependency_set();
    let d = model.dim();
    let samples = c.samples.unwrap_or(DEFAULT_MC_SAMPLES);
    let (method, mc) = if d == 2 {
        (MeasureMethod::Exact, None)
    } else {
        (MeasureMethod::MonteCarlo { samples, seed: c.seed }, Some((samples, c.seed)))
    };
    let table_dim = d.min(maxzonoid::dependence::MAX_TABLE_DIM);
    let mut thetas = Vec::new();
    for mask in 1usize..1 << table_dim {
        let size = mask.count_ones() as usize;
        if size < 2 || size > max_subset {
            continue;
        }
        let subset = maxzonoid::dependence::mask_members(mask, d);
        thetas.push(json!({ "subset": subset_text(&subset), "theta": extremal_coefficient(k, &subset)? }));
    }
    let mut results = json!({
        "dimension": d,
        "extremal_coefficients": thetas,
        "spearman_rho": estimate_json(spearman_rho(k, method)?, mc),
        "multivariate_rho": estimate_json(multivariate_rho(k, method)?, mc),
    });
    if d == 2 {
        let tol = c.tol.unwrap_or(DEFAULT_TAU_TOL);
        results["chi"] = json!(chi(k)?);
        results["kendall_tau"] = json!({ "value": kendall_tau_2d_with_tol(k, tol)?, "quadrature_tol": tol, "method": "quadrature" });
        results["inverted_pearson"] = estimate_json(inverted_pearson_2d(k, MeasureMethod::Exact)?, None);
    }
    sink.write_json(&ResultDocument::new("measures", Some(spec.to_json()), results))
}

fn simulate_cmd(c: &Common, sink: &Sink) -> Result<(), CliError> {
    let (spec, model) = load_model(c)?;
    let n = c.samples.unwrap_or(DEFAULT_SIM_SAMPLES);
    let model = model.discretized(c.grid.unwrap_or(DEFAULT_ATOMS))?;
    let x = simulate(&model, n, c.seed)?;
    let mut meta = base_meta(&spec);
    meta.push(("seed", c.seed.to_string()));
    meta.push(("samples", n.to_string()));
    meta.push(("discretization_error", model.discretization_error().to_string()));
    let header: Vec<String> = (1..=x.ncols()).map(|i| format!("x{i}")).collect();
    let rows: Vec<Vec<f64>> = x.rows().map(<[f64]>::to_vec).collect();
    sink.write_csv(&meta, &header, &rows)
}

fn spectral(c: &Common, sink: &Sink, to_atoms: bool, to_polygon: bool, norm: ReferenceNorm) -> Result<(), CliError> {
    let (spec, model) = load_model(c)?;
    let k = model.dependency_set();
    if to_atoms {
        let (sigma, error) = match (k.exact_spectral(), k.to_polygon_2d()) {
            (Some(s), _) => (s.rebase(norm), 0.0),
            (None, Some(p)) => (spectral_from_polygon_2d(&p, norm), 0.0),
            (None, None) => {
                let disc = discretize(k, c.grid.unwrap_or(DEFAULT_ATOMS))?;
                (disc.measure.rebase(norm), disc.max_error)
            }
        };
        let report = validate_dependency(&sigma);
        let header = format!(
            "# converted from {}\n# atoms={} total_mass={} discretization_error={} dependency={}\n",
            spec.describe(),
            sigma.atoms().len(),
            sigma.total_mass(),
            error,
            report.is_dependency
        );
        return sink.write_text(&(header + &SpecFile::from_measure(&sigma).to_toml()));
    }
    if to_polygon {
        if model.dim() != 2 {
            return Err(CliError::Validation(format!("--to-polygon needs a planar model, got dimension {}", model.dim())));
        }
        let exact = k.to_polygon_2d();
        let approximate = exact.is_none();
        let poly = match exact {
            Some(p) => p,
            None => k.polygon_2d(c.grid.unwrap_or(ENVELOPE_GRID))?,
        };
        let header = format!(
            "# converted from {}\n# vertices={} exact={}\n",
            spec.describe(),
            poly.vertices().len(),
            !approximate
        );
        return sink.write_text(&(header + &SpecFile::from_polygon(&poly).to_toml()));
    }
    let results = match k.exact_spectral() {
        Some(sigma) => {
            let report = validate_dependency(&sigma);
            json!({
                "representation": "discrete",
                "atoms": sigma.atoms().len(),
                "reference_norm": sigma.reference_norm().name(),
                "total_mass": sigma.total_mass(),
                "l1_total_mass": sigma.rebase(ReferenceNorm::L1).total_mass(),
                "marginal_sums": report.marginal_sums,
                "is_dependency": report.is_dependency,
            })
        }
        None => json!({
            "representation": "analytic",
            "marginals": k.marginals(),
            "is_dependency": true,
        }),
    };
    sink.write_json(&ResultDocument::new("spectral", Some(spec.to_json()), results))
}

fn violation_json(subset: &[usize], weight: f64) -> Value {
    json!({ "subset": subset_text(subset), "weight": weight })
}

fn weights_json(c: &Consistency) -> Value {
    Value::Array(
        c.weights()
            .iter()
            .filter(|(_, w)| *w != 0.0)
            .map(|(s, w)| json!({ "subset": subset_text(&s), "weight": w }))
            .collect(),
    )
}

fn check_theta(c: &Common, sink: &Sink) -> Result<(), CliError> {
    let spec = load_spec(c)?;
    let table: ExtremalTable = spec.table()?;
    let verdict = check_extremal_consistency(&table)?;
    let alternation = check_table_alternation(&table)?;
    let mut results = json!({
        "consistent": verdict.is_consistent(),
        "alternation_agrees": alternation.is_ok() == verdict.is_consistent(),
        "weights": weights_json(&verdict),
    });
    let failure = match &verdict {
        Consistency::Consistent(_) => None,
        Consistency::Violation { subset, weight, .. } => {
            results["witness"] = violation_json(subset, *weight);
            Some(format!(
                "inconsistent extremal coefficients: weight of subset {{{}}} is {weight}",
                subset_text(subset)
            ))
        }
    };
    sink.write_json(&ResultDocument::new("check-theta", Some(spec.to_json()), results))?;
    match failure {
        Some(msg) => Err(CliError::Validation(msg)),
        None => Ok(()),
    }
}

fn construct_theta(c: &Common, sink: &Sink) -> Result<(), CliError> {
    let spec = load_spec(c)?;
    let table = spec.table()?;
    if let Consistency::Violation { subset, weight, .. } = check_extremal_consistency(&table)? {
        return Err(CliError::Validation(format!(
            "inconsistent extremal coefficients: weight of subset {{{}}} is {weight}",
            subset_text(&subset)
        )));
    }
    let model = construct_from_extremal(&table)?;
    let sigma = model
        .discrete_form()
        .cloned()
        .ok_or_else(|| CliError::Validation("constructed model has no atoms".into()))?;
    let header = format!("# constructed from {}\n# atoms={}\n", spec.describe(), sigma.atoms().len());
    sink.write_text(&(header + &SpecFile::from_measure(&sigma).to_toml()))
}

fn estimate(sink: &Sink, data: &Path, threshold: Option<f64>, norm: ReferenceNorm) -> Result<(), CliError> {
    let table = read_table(data)?;
    let x = samples_from(&table, None, &data.display().to_string())?;
    let Some(s) = threshold else {
        return Err(CliError::Usage("estimate --data needs --threshold".into()));
    };
    let sigma = empirical_spectral(&x, s, norm)?;
    let set: DependencySet = estimated_dependency_set(&x, s, norm)?;
    let atoms: Vec<Value> = sigma.atoms().iter().map(|a| json!({ "point": a.point, "mass": a.mass })).collect();
    let mut results = json!({
        "threshold": s,
        "reference_norm": norm.name(),
        "samples": x.nrows(),
        "exceedances": maxzonoid::estimate::exceedance_count(&x, s, norm),
        "spectral": { "atoms": atoms, "total_mass": sigma.total_mass(), "marginal_sums": sigma.marginal_sums() },
    });
    if x.ncols() == 2 {
        let poly = set.to_polygon_2d().ok_or_else(|| CliError::Validation("estimate has no polygon".into()))?;
        results["normalized_zonoid"] = json!({ "vertices": poly.vertices() });
    } else {
        let t = ExtremalTable::of_zonoid(&set)?;
        let theta: Vec<Value> =
            t.iter().filter(|(s, _)| s.len() >= 2).map(|(s, v)| json!({ "subset": subset_text(&s), "theta": v })).collect();
        results["normalized_zonoid"] = json!({ "extremal_coefficients": theta });
    }
    sink.write_json(&ResultDocument::new("estimate", None, results))
}

fn estimate_halfplanes(sink: &Sink, path: &Path) -> Result<(), CliError> {
    let table = read_table(path)?;
    if table.ncols() != 3 {
        return Err(CliError::Validation(format!(
            "{}: expected columns u1,u2,value, found {} columns",
            path.display(),
            table.ncols()
        )));
    }
    let estimates: Vec<DirectionEstimate> =
        table.rows.iter().map(|r| DirectionEstimate { direction: vec![r[0], r[1]], value: r[2] }).collect();
    let est = estimate_zonoid_2d(&estimates)?;
    let clipped: Vec<usize> = est.clipped.iter().map(|i| i + 1).collect();
    let results = json!({
        "vertices": est.polygon.vertices(),
        "clipped_rows": clipped,
        "note": "planar half-plane estimator; the construction is not guaranteed to give a max-zonoid in dimension 3 or more",
    });
    sink.write_json(&ResultDocument::new("estimate", None, results))
}

fn quantile(c: &Common, sink: &Sink, alpha: f64) -> Result<(), CliError> {
    let (spec, model) = load_model(c)?;
    let pts = quantile_curve(&model, alpha, c.grid.unwrap_or(DEFAULT_CURVE_POINTS))?;
    let mut meta = base_meta(&spec);
    meta.push(("alpha", alpha.to_string()));
    let rows: Vec<Vec<f64>> = pts.iter().map(|p| p.to_vec()).collect();
    sink.write_csv(&meta, &["x1".into(), "x2".into()], &rows)
}

fn converge(c: &Common, sink: &Sink, data: &Path, thresholds: &[f64]) -> Result<(), CliError> {
    let (spec, model) = load_model(c)?;
    let table = read_table(data)?;
    let x = samples_from(&table, Some(model.dim()), &data.display().to_string())?;
    let grid = c.grid.unwrap_or(DISTANCE_GRID_2D);
    let points = convergence_diagnostic(&x, thresholds, model.dependency_set(), grid)?;
    let mut meta = base_meta(&spec);
    meta.push(("samples", x.nrows().to_string()));
    meta.push(("grid", grid.to_string()));
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| vec![p.s, p.exceedances as f64, p.distance.unwrap_or(f64::NAN)])
        .collect();
    sink.write_csv(&meta, &["s".into(), "exceedances".into(), "distance".into()], &rows)
}
