use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use qfridge::dynamics::{evolve, steady_state, Fault, DEFAULT_TOL};
use qfridge::experiments::{preset_curves, run_sweep, FigureId, RowFlags, SweepTable};
use qfridge::format::{fmt_out, round_sig, OUTPUT_DIGITS};
use qfridge::tensor::{check_density, diag, identity, ComplexMatrix};
use qfridge::validation::run_validation_with;
use qfridge::{heat_currents, temperatures, FridgeModel};

use crate::config::{ModelSpec, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    /// Explicit choice, else the output file's extension, else CSV.
    pub fn resolve(explicit: Option<Format>, out: Option<&Path>) -> Format {
        explicit.unwrap_or_else(|| match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Csv,
        })
    }
}

/// What a command produced: files written and the parameters it ran with.
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub resolved: Value,
    /// Set when results were written but the run should still fail.
    pub failure: Option<CliError>,
}

pub struct Options<'a> {
    pub out: Option<&'a Path>,
    pub format: Format,
    pub tol: Option<f64>,
}

impl Options<'_> {
    fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }
}

fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(round_sig(x, OUTPUT_DIGITS))
    } else {
        Value::Null
    }
}

fn emit(text: &str, path: Option<&Path>, outputs: &mut Vec<PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text)?;
            outputs.push(p.to_path_buf());
        }
        None => print!("{text}"),
    }
    Ok(())
}

/// `<stem>_<suffix>.<ext>` beside `path`.
fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    path.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

pub fn steady(config: &RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    let model = config.model.build()?;
    let s = steady_state(&model, opts.tol()).map_err(CliError::from_solver)?;
    let temps = temperatures(&model, &s.rho).map_err(CliError::from_solver)?;
    let currents = heat_currents(&model, &s.rho).map_err(CliError::from_solver)?;

    let mut report = format!("model {} (dimension {})\n", model.tag(), model.dim());
    report.push_str("particle,T,kind,thermality_defect,Q\n");
    for (i, (t, q)) in temps.iter().zip(&currents.per_particle).enumerate() {
        let _ = writeln!(
            report,
            "{},{},{},{},{}",
            i + 1,
            fmt_out(t.value),
            t.kind.as_str(),
            fmt_out(t.thermality_defect),
            fmt_out(*q)
        );
    }
    let _ = writeln!(
        report,
        "residual {}  uniqueness_gap {}  converged {}",
        fmt_out(s.residual),
        fmt_out(s.uniqueness_gap),
        s.converged
    );
    for w in model.warnings() {
        let _ = writeln!(report, "warning: {w}");
    }
    print!("{report}");

    let mut outputs = Vec::new();
    if let Some(out) = opts.out {
        match opts.format {
            Format::Json => {
                let part = |imag: bool| -> Vec<Vec<Value>> {
                    (0..s.rho.nrows())
                        .map(|r| {
                            (0..s.rho.ncols())
                                .map(|c| {
                                    let z = s.rho[(r, c)];
                                    number(if imag { z.im } else { z.re })
                                })
                                .collect()
                        })
                        .collect()
                };
                let doc = json!({
                    "model": model.tag().to_string(),
                    "resolved": config.model.resolved(),
                    "temperatures": temps.iter().map(|t| json!({
                        "value": number(t.value),
                        "kind": t.kind.as_str(),
                        "thermality_defect": number(t.thermality_defect),
                    })).collect::<Vec<_>>(),
                    "heat_currents": currents.per_particle.iter().map(|q| number(*q)).collect::<Vec<_>>(),
                    "residual": number(s.residual),
                    "uniqueness_gap": number(s.uniqueness_gap),
                    "converged": s.converged,
                    "degenerate": s.degenerate,
                    "rho": { "re": part(false), "im": part(true) },
                    "digits": OUTPUT_DIGITS,
                });
                let text = serde_json::to_string_pretty(&doc).expect("json") + "\n";
                emit(&text, Some(out), &mut outputs)?;
            }
            Format::Csv => {
                let body = report.lines().skip(1).take(temps.len() + 1).collect::<Vec<_>>().join("\n") + "\n";
                emit(&body, Some(out), &mut outputs)?;
                let mut state = String::from("row,col,re,im\n");
                for r in 0..s.rho.nrows() {
                    for c in 0..s.rho.ncols() {
                        let z = s.rho[(r, c)];
                        let _ = writeln!(state, "{r},{c},{},{}", fmt_out(z.re), fmt_out(z.im));
                    }
                }
                emit(&state, Some(&sibling(out, "rho", "csv")), &mut outputs)?;
            }
        }
    }

    let failure = (!s.converged).then(|| {
        CliError::Convergence(format!(
            "stationary residual {:e} exceeds tolerance {:e}",
            s.residual,
            opts.tol()
        ))
    });
    Ok(Outcome {
        outputs,
        resolved: json!({ "model": config.model.resolved(), "tol": opts.tol() }),
        failure,
    })
}

fn initial_state(model: &FridgeModel, kind: &str) -> Result<ComplexMatrix, CliError> {
    let n = model.dim();
    let mut pops = vec![0.0; n];
    match kind {
        "mixed" => return Ok(identity(n).map(|z| z / n as f64)),
        "ground" => pops[0] = 1.0,
        "excited" => pops[n - 1] = 1.0,
        other => {
            return Err(CliError::Usage(format!(
                "evolve.initial: expected mixed, ground or excited, got `{other}`"
            )))
        }
    }
    Ok(diag(&pops))
}

pub fn evolve_cmd(config: &RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    let model = config.model.build()?;
    let e = &config.evolve;
    let rho0 = initial_state(&model, &e.initial)?;
    let traj = evolve(&model, &rho0, e.t_final, e.dt, e.samples).map_err(CliError::from_model)?;

    let k = model.shape().num_particles();
    let mut names = vec!["t".to_string()];
    names.extend((1..=k).map(|i| format!("T{i}")));
    names.extend((1..=k).map(|i| format!("Q{i}")));
    names.extend(["trace_defect".to_string(), "min_eigenvalue".to_string()]);
    let mut rows = Vec::new();
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let temps = temperatures(&model, rho).map_err(CliError::from_solver)?;
        let q = heat_currents(&model, rho).map_err(CliError::from_solver)?;
        let d = check_density(rho);
        let mut row = vec![*t];
        row.extend(temps.iter().map(|r| r.value));
        row.extend(q.per_particle);
        row.extend([d.trace_defect, d.min_eigenvalue]);
        rows.push(row);
    }

    let text = match opts.format {
        Format::Csv => {
            let mut s = format!("# dt: {}\n# halvings: {}\n", traj.dt, traj.halvings);
            s.push_str(&names.join(","));
            s.push('\n');
            for row in &rows {
                s.push_str(&row.iter().map(|v| fmt_out(*v)).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let columns: Vec<Value> = names
                .iter()
                .enumerate()
                .map(|(c, n)| json!({ "name": n, "values": rows.iter().map(|r| number(r[c])).collect::<Vec<_>>() }))
                .collect();
            let doc = json!({
                "metadata": { "model": model.tag().to_string(), "dt": number(traj.dt), "halvings": traj.halvings, "digits": OUTPUT_DIGITS },
                "columns": columns,
            });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
    };
    let mut outputs = Vec::new();
    emit(&text, opts.out, &mut outputs)?;

    let failure = (!traj.final_diagnostics.is_valid(1e-8)).then(|| {
        CliError::Convergence(format!(
            "final state is not a valid density matrix: {:?}",
            traj.final_diagnostics
        ))
    });
    Ok(Outcome {
        outputs,
        resolved: json!({ "model": config.model.resolved(), "evolve": e }),
        failure,
    })
}

fn table_text(table: &SweepTable, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json_string(),
    }
}

fn flagged(tables: &[SweepTable]) -> Option<CliError> {
    let bad: usize = tables.iter().map(|t| t.metadata.flagged_rows).sum();
    (bad > 0).then(|| {
        CliError::Convergence(format!(
            "{bad} row(s) flagged {} or {}",
            RowFlags::UNCONVERGED.label(),
            RowFlags::FAILED.label()
        ))
    })
}

pub fn sweep(config: &RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    let section = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Usage("sweep needs a [sweep] section (or --set sweep.axis=...)".into()))?;
    let base = match &config.model {
        ModelSpec::Named(p) => *p,
        ModelSpec::Custom(_) => {
            return Err(CliError::Usage("sweeps need model I, II or III".into()));
        }
    };
    let sweep_config = section.to_config(base, opts.tol())?;
    let table = run_sweep(&sweep_config).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut outputs = Vec::new();
    emit(&table_text(&table, opts.format), opts.out, &mut outputs)?;
    Ok(Outcome {
        outputs,
        resolved: json!({ "sweep": sweep_config }),
        failure: flagged(std::slice::from_ref(&table)),
    })
}

pub fn figure(id: &str, opts: &Options) -> Result<Outcome, CliError> {
    let id: FigureId = id.parse().map_err(|e| match e {
        qfridge::FridgeError::InvalidSweep(msg) => CliError::Usage(msg),
        other => CliError::Usage(other.to_string()),
    })?;
    let mut curves = preset_curves(id);
    if let Some(tol) = opts.tol {
        curves = curves.into_iter().map(|c| c.with_tol(tol)).collect();
    }
    let tables = curves
        .iter()
        .map(run_sweep)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let mut outputs = Vec::new();
    match (opts.out, tables.len()) {
        (Some(out), 1) => emit(&table_text(&tables[0], opts.format), Some(out), &mut outputs)?,
        (Some(out), _) => {
            for t in &tables {
                let path = sibling(out, &t.metadata.label, opts.format.extension());
                emit(&table_text(t, opts.format), Some(&path), &mut outputs)?;
            }
        }
        (None, _) => match opts.format {
            Format::Csv => {
                let text: Vec<String> = tables.iter().map(SweepTable::to_csv).collect();
                print!("{}", text.join("\n"));
            }
            Format::Json => {
                let docs: Vec<Value> = tables.iter().map(SweepTable::to_json).collect();
                println!("{}", serde_json::to_string_pretty(&docs).expect("json"));
            }
        },
    }
    Ok(Outcome {
        outputs,
        resolved: json!({ "figure": id.as_str(), "curves": curves }),
        failure: flagged(&tables),
    })
}

pub fn validate(opts: &Options, fault: Option<Fault>) -> Result<Outcome, CliError> {
    let report = run_validation_with(opts.tol, fault).map_err(|e| CliError::Validation(e.to_string()))?;
    let mut lines = String::new();
    for c in &report.checks {
        let _ = writeln!(
            lines,
            "{} {:<24} {:>10.3e} <= {:.1e}  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.threshold,
            c.detail
        );
    }
    print!("{lines}");
    let mut outputs = Vec::new();
    if let Some(out) = opts.out {
        let text = match opts.format {
            Format::Json => serde_json::to_string_pretty(&report).expect("json") + "\n",
            Format::Csv => {
                let mut s = String::from("check,passed,value,threshold\n");
                for c in &report.checks {
                    let _ = writeln!(s, "{},{},{},{}", c.name, c.passed, fmt_out(c.value), fmt_out(c.threshold));
                }
                s
            }
        };
        emit(&text, Some(out), &mut outputs)?;
    }
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    Ok(Outcome {
        outputs,
        resolved: json!({ "tol": opts.tol }),
        failure: (!failed.is_empty())
            .then(|| CliError::Validation(format!("failed checks: {}", failed.join(", ")))),
    })
}
