use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use ridgequad::diagnostics::{l2_error, map_uniform, uniform_points, L2Error};
use ridgequad::export::{fmt17, json_array, CsvTable};
use ridgequad::models::{
    gradient_direction, hartmann_direction, legendre_ls_baseline, random_direction, Model, ModelKind,
};
use ridgequad::nearridge::fit_near_ridge;
use ridgequad::ridge::{reference_measure, weighted_l2_error};
use ridgequad::{convolve_density, BudgetAllocation, RidgeDirection, RidgeRule};

use crate::config::{usage, Allocation, DirectionSource, Format, StudyConfig};

/// The near-ridge complement basis is part of the model definition, not of a
/// study, so it does not follow `--seed`.
const NEAR_RIDGE_BASIS_SEED: u64 = 0;

const GRADIENT_POINTS: usize = 50;
const BASELINE_DEGREES: [usize; 3] = [1, 2, 3];
const BASELINE_PENALTIES: [f64; 6] = [1e-8, 1e-6, 1e-4, 1e-2, 0.1, 1.0];

fn json_num(x: f64) -> String {
    if x.is_finite() {
        fmt17(x)
    } else {
        "null".to_string()
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn emit(cfg: &StudyConfig, contents: &str) -> Result<()> {
    match &cfg.output {
        Some(path) => write_file(path, contents),
        None => std::io::stdout()
            .lock()
            .write_all(contents.as_bytes())
            .context("cannot write to stdout"),
    }
}

fn output_dir(cfg: &StudyConfig) -> Result<&Path> {
    let dir = cfg.require_output()?;
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    Ok(dir)
}

fn read_direction_file(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text)
            .map_err(|e| usage(format!("invalid direction file {}: {e}", path.display())));
    }
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| usage(format!("bad direction component `{t}` in {}", path.display())))
        })
        .collect()
}

/// Direction of dimension `dim` from the configured source. The default is
/// the averaged gradient for Hartmann and the ones vector otherwise.
fn resolve_direction(cfg: &StudyConfig, dim: usize) -> Result<RidgeDirection> {
    let source = cfg.direction.unwrap_or(match cfg.model {
        ModelKind::Hartmann => DirectionSource::Gradient,
        _ => DirectionSource::Ones,
    });
    let direction = match source {
        DirectionSource::Ones => RidgeDirection::ones(dim)?,
        DirectionSource::Random => random_direction(dim, cfg.require_seed("a random direction")?)?,
        DirectionSource::Gradient => {
            let seed = cfg.require_seed("a gradient direction")?;
            if dim != cfg.model.dim() {
                return Err(usage(format!(
                    "a gradient direction has the model's dimension {}, not {dim}",
                    cfg.model.dim()
                )));
            }
            match cfg.model {
                ModelKind::Hartmann => hartmann_direction(seed)?,
                kind => {
                    let model = Model::new(kind, RidgeDirection::ones(dim)?, NEAR_RIDGE_BASIS_SEED)?;
                    let f = model.evaluator();
                    gradient_direction(&f, dim, GRADIENT_POINTS, seed)?
                }
            }
        }
        DirectionSource::File => {
            let path = cfg.direction_file.as_deref().expect("checked during resolution");
            let components = read_direction_file(path)?;
            if components.len() != dim {
                return Err(usage(format!(
                    "direction file has {} components, expected {dim}",
                    components.len()
                )));
            }
            RidgeDirection::new(components).map_err(|e| usage(e.to_string()))?
        }
    };
    Ok(direction)
}

/// Direction for commands that only need `a`: `--dim` wins, then the length
/// of a direction file, then the model's dimension.
fn standalone_direction(cfg: &StudyConfig) -> Result<RidgeDirection> {
    let dim = match (cfg.dim, cfg.direction, cfg.direction_file.as_deref()) {
        (Some(dim), _, _) => dim,
        (None, Some(DirectionSource::File), Some(path)) => read_direction_file(path)?.len(),
        _ => cfg.model.dim(),
    };
    resolve_direction(cfg, dim)
}

fn build_model(cfg: &StudyConfig) -> Result<Model> {
    if let Some(dim) = cfg.dim {
        if dim != cfg.model.dim() {
            return Err(usage(format!(
                "model {} has dimension {}, not {dim}",
                cfg.model.name(),
                cfg.model.dim()
            )));
        }
    }
    let direction = resolve_direction(cfg, cfg.model.dim())?;
    Ok(Model::new(cfg.model, direction, NEAR_RIDGE_BASIS_SEED)?)
}

pub fn density(cfg: &StudyConfig) -> Result<()> {
    let a = standalone_direction(cfg)?;
    let grid = convolve_density(&a, cfg.n_points)?;
    let text = match cfg.format {
        Format::Csv => grid.to_csv().render(),
        Format::Json => format!(
            "{{\"direction\":{},\"n_points\":{},\"u\":{},\"q\":{}}}\n",
            json_array(a.components()),
            grid.n_points(),
            json_array(&grid.nodes()),
            json_array(grid.values())
        ),
    };
    emit(cfg, &text)
}

pub fn quadrature(cfg: &StudyConfig) -> Result<()> {
    let a = standalone_direction(cfg)?;
    let rule = RidgeRule::build(&a, cfg.n_points, cfg.degree)?;
    let text = match cfg.format {
        Format::Csv => rule.rule().to_csv().render(),
        Format::Json => format!(
            "{{\"direction\":{},\"n_points\":{},\"degree\":{},\"jacobi\":{},\"lambda\":{},\"nu\":{}}}\n",
            json_array(a.components()),
            cfg.n_points,
            cfg.degree,
            rule.jacobi().to_json(),
            json_array(rule.rule().nodes()),
            json_array(rule.rule().weights())
        ),
    };
    emit(cfg, &text)
}

fn l2_json(err: &L2Error) -> String {
    format!(
        "{{\"absolute\":{},\"relative\":{}}}",
        json_num(err.absolute),
        json_num(err.relative)
    )
}

pub fn approx(cfg: &StudyConfig) -> Result<()> {
    let model = build_model(cfg)?;
    let a = model.direction();
    let dir = output_dir(cfg)?;
    let rule = RidgeRule::build(a, cfg.n_points, cfg.degree)?;
    let fit = rule.fit(model.evaluator())?;
    let expansion = &fit.expansion;

    let mut nodes = CsvTable::new(
        &["lambda", "nu", "f"]
            .into_iter()
            .map(String::from)
            .chain((1..=a.dim()).map(|i| format!("xi_{i}")))
            .collect::<Vec<_>>(),
    );
    for ((point, nu), value) in fit.points.iter().zip(rule.rule().weights()).zip(&fit.values) {
        let mut row = vec![point.lambda, *nu, *value];
        row.extend_from_slice(&point.xi);
        nodes.push(&row);
    }
    write_file(&dir.join("nodes.csv"), &nodes.render())?;

    let exact_integral = model.integral();
    let mut weighted_error = None;
    if model.has_profile() {
        let (left, right) = expansion.support();
        let n = cfg.profile_points.max(2);
        let mut table = CsvTable::new(&["u", "g_true", "g_approx", "abs_error"]);
        for k in 0..n {
            let u = left + (right - left) * k as f64 / (n - 1) as f64;
            let truth = model.profile(u).expect("profile is known");
            let approx = expansion.evaluate(u);
            table.push(&[u, truth, approx, (truth - approx).abs()]);
        }
        write_file(&dir.join("profile.csv"), &table.render())?;
        let reference = reference_measure(a)?;
        weighted_error = Some(weighted_l2_error(
            expansion,
            |u| model.profile(u).expect("profile is known"),
            &reference,
        ));
    }

    if let Some(sweep) = &cfg.sweep {
        let reference = model.has_profile().then(|| reference_measure(a)).transpose()?;
        let mut table = CsvTable::new(&["N", "d", "l2_error", "integral_error"]);
        for &n in &sweep.n_points {
            for &d in &sweep.degrees {
                let e = RidgeRule::build(a, n, d)?.fit(model.evaluator())?.expansion;
                let l2 = reference.as_ref().map_or(f64::NAN, |r| {
                    weighted_l2_error(&e, |u| model.profile(u).expect("profile is known"), r)
                });
                let integral = exact_integral.map_or(f64::NAN, |i| (e.integral() - i).abs());
                table.push(&[n as f64, d as f64, l2, integral]);
            }
        }
        write_file(&dir.join("sweep.csv"), &table.render())?;
    }

    let json = format!(
        "{{\"model\":{},\"n_points\":{},\"degree\":{},\"evaluations\":{},\"direction\":{},\
         \"weighted_l2_error\":{},\"exact_integral\":{},\"expansion\":{}}}\n",
        json_str(model.kind().name()),
        cfg.n_points,
        cfg.degree,
        fit.values.len(),
        json_array(a.components()),
        json_num(weighted_error.unwrap_or(f64::NAN)),
        json_num(exact_integral.unwrap_or(f64::NAN)),
        expansion.to_json()
    );
    write_file(&dir.join("expansion.json"), &json)
}

fn allocation(cfg: &StudyConfig, nodes: usize) -> Result<BudgetAllocation> {
    Ok(match (cfg.samples_per_node, cfg.budget) {
        (Some(m), _) => BudgetAllocation::Uniform(m),
        (None, Some(total)) => match cfg.allocation {
            Allocation::Equal => BudgetAllocation::uniform_from_budget(total, nodes)
                .map_err(|e| usage(e.to_string()))?,
            Allocation::Proportional => {
                if total < nodes {
                    return Err(usage(format!(
                        "budget {total} is smaller than the {nodes} quadrature nodes"
                    )));
                }
                BudgetAllocation::ProportionalToWeight(total)
            }
        },
        (None, None) => BudgetAllocation::Uniform(100),
    })
}

fn allocation_json(allocation: BudgetAllocation) -> String {
    match allocation {
        BudgetAllocation::Uniform(m) => format!("{{\"kind\":\"equal\",\"per_node\":{m}}}"),
        BudgetAllocation::ProportionalToWeight(t) => {
            format!("{{\"kind\":\"proportional\",\"total\":{t}}}")
        }
    }
}

pub fn near_approx(cfg: &StudyConfig) -> Result<()> {
    let seed = cfg.require_seed("near-approx")?;
    let model = build_model(cfg)?;
    let a = model.direction();
    let dim = model.dim();
    let f = model.evaluator();
    let dir = output_dir(cfg)?;

    let rule = RidgeRule::build(a, cfg.n_points, cfg.degree)?;
    let alloc = allocation(cfg, rule.rule().len())?;
    let fit = fit_near_ridge(&rule, &f, alloc, seed)?;
    let expansion = &fit.expansion;
    write_file(&dir.join("profile.csv"), &fit.profile_csv(rule.rule()).render())?;

    let err = l2_error(&f, |x| expansion.evaluate(a.project(x)), dim, cfg.mc_points, seed.wrapping_add(1));

    let mut shadow = CsvTable::new(&["u", "f"]);
    for row in map_uniform(dim, cfg.shadow_points, seed.wrapping_add(2), |x| [a.project(x), f(x)]) {
        shadow.push(&row);
    }
    write_file(&dir.join("shadow.csv"), &shadow.render())?;

    if model.kind() == ModelKind::Hartmann {
        let table = budget_comparison(cfg, &model, &rule, seed)?;
        write_file(&dir.join("budgets.csv"), &table.render())?;
    }

    let json = format!(
        "{{\"model\":{},\"n_points\":{},\"degree\":{},\"truncation_degree\":{},\"evaluations\":{},\
         \"seed\":{seed},\"allocation\":{},\"direction\":{},\"l2_error\":{},\"exact_integral\":{},\
         \"expansion\":{}}}\n",
        json_str(model.kind().name()),
        cfg.n_points,
        cfg.degree,
        expansion.truncation_degree(),
        fit.evaluations(),
        allocation_json(alloc),
        json_array(a.components()),
        l2_json(&err),
        json_num(model.integral().unwrap_or(f64::NAN)),
        expansion.to_json()
    );
    write_file(&dir.join("expansion.json"), &json)
}

/// Relative L² error of the near-ridge fit and of the best Legendre
/// least-squares fit, at equal evaluation budgets.
fn budget_comparison(cfg: &StudyConfig, model: &Model, rule: &RidgeRule, seed: u64) -> Result<CsvTable> {
    let a = model.direction();
    let dim = model.dim();
    let f = model.evaluator();
    let test_seed = seed.wrapping_add(1);
    let mut table = CsvTable::new(&[
        "budget",
        "evaluations",
        "ridge_l2",
        "baseline_l2",
        "baseline_degree",
        "baseline_penalty",
    ]);
    for &budget in &cfg.budgets {
        let alloc = BudgetAllocation::uniform_from_budget(budget, rule.rule().len())
            .map_err(|e| usage(e.to_string()))?;
        let fit = fit_near_ridge(rule, &f, alloc, seed)?;
        let e = &fit.expansion;
        let ridge = l2_error(&f, |x| e.evaluate(a.project(x)), dim, cfg.mc_points, test_seed);

        let samples: Vec<(Vec<f64>, f64)> = uniform_points(dim, budget, seed.wrapping_add(3))
            .into_iter()
            .map(|x| {
                let y = f(&x);
                (x, y)
            })
            .collect();
        let mut best = (f64::INFINITY, 0, 0.0);
        for degree in BASELINE_DEGREES {
            for penalty in BASELINE_PENALTIES {
                let Ok(base) = legendre_ls_baseline(&samples, degree, penalty) else {
                    continue;
                };
                let err = l2_error(&f, |x| base.evaluate(x), dim, cfg.mc_points, test_seed);
                if err.relative < best.0 {
                    best = (err.relative, degree, penalty);
                }
            }
        }
        table.push(&[
            budget as f64,
            fit.evaluations() as f64,
            ridge.relative,
            best.0,
            best.1 as f64,
            best.2,
        ]);
    }
    Ok(table)
}
