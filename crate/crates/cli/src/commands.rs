//! The four subcommands and the exit-code mapping.
//!
//! Exit codes are stable: 0 success, 1 usage or environment, 2 invalid
//! input data, 3 infeasible configuration, 4 oracle mismatch, 5 oracle
//! capacity exceeded. Standard output carries only machine-parseable
//! payload (tables, CSV); diagnostics go to standard error.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use tankest_core::report::format_sig6;
use tankest_core::{
    enumerate_moments, estimate_all, exact_moments, parse_results_csv, parse_sample_file,
    render_histogram_svg, render_report, render_table, run_grid_with, Criterion, DataError,
    EstimatorId, ExactError, RepsCol, ReportError, SimError, SimulationConfig, TableFormat,
    TableRow,
};

use crate::config::parse_config_file;
use crate::{EstimateArgs, ExactArgs, ReportArgs, SimulateArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    OracleMismatch(String),
    #[error("{0}")]
    OracleCapacity(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::OracleMismatch(_) => 4,
            CliError::OracleCapacity(_) => 5,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::UnknownEstimator(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            ExactError::Capacity { .. } => CliError::OracleCapacity(e.to_string()),
            ExactError::MinMaxDomain { .. } => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Malformed { .. } => CliError::Data(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn canonical_ids(requested: &Option<Vec<EstimatorId>>) -> Vec<EstimatorId> {
    match requested {
        None => EstimatorId::ALL.to_vec(),
        Some(ids) => {
            let mut ids = ids.clone();
            ids.sort();
            ids.dedup();
            ids
        }
    }
}

/// `estimate`: apply the catalog to a sample file, print
/// `estimator estimate` lines in canonical order.
pub fn cmd_estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let text = read_file(&args.input)?;
    let sample = parse_sample_file(&text)?;
    let ids = canonical_ids(&args.estimators);
    let records = estimate_all(&sample, &ids).map_err(|e| CliError::Usage(e.to_string()))?;
    for r in records {
        println!("{} {}", r.estimator, format_sig6(r.estimate));
    }
    Ok(())
}

/// `exact`: one exact-moments CSV row per estimator; with `--oracle`,
/// rows come from full enumeration and any disagreement with the closed
/// forms is a hard failure.
pub fn cmd_exact(args: &ExactArgs) -> Result<(), CliError> {
    let ids = canonical_ids(&args.estimators);
    let mut rows = Vec::with_capacity(ids.len());
    for id in ids {
        let closed = exact_moments(id, args.n, args.k)?;
        if args.oracle {
            let oracle = enumerate_moments(id, args.n, args.k)?;
            if oracle != closed {
                return Err(CliError::OracleMismatch(format!(
                    "closed form disagrees with the enumeration oracle for `{id}` at N = {}, k = {}",
                    args.n, args.k
                )));
            }
            rows.push(TableRow::from(&oracle));
        } else {
            rows.push(TableRow::from(&closed));
        }
    }
    print!("{}", render_table(&rows, TableFormat::Csv)?);
    Ok(())
}

fn resolve_config(args: &SimulateArgs) -> Result<SimulationConfig, CliError> {
    let mut cfg = SimulationConfig::default();
    if let Some(path) = &args.config {
        let file = parse_config_file(&read_file(path)?).map_err(CliError::Usage)?;
        if let Some(v) = file.n_values {
            cfg.n_values = v;
        }
        if let Some(v) = file.k_values {
            cfg.k_values = v;
        }
        if let Some(v) = file.reps {
            cfg.reps = v;
        }
        if let Some(v) = file.seed {
            cfg.seed = v;
        }
        if let Some(v) = file.estimators {
            cfg.estimators = v;
        }
    }
    // flags beat file values beat defaults
    if let Some(v) = &args.n_values {
        cfg.n_values = v.clone();
    }
    if let Some(v) = &args.k_values {
        cfg.k_values = v.clone();
    }
    if let Some(v) = args.reps {
        cfg.reps = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = &args.estimators {
        cfg.estimators = canonical_ids(&Some(v.clone()));
    }
    Ok(cfg)
}

fn raw_file_name(n: u64, k: u64, id: EstimatorId) -> String {
    format!("raw_N{n}_k{k}_{id}.txt")
}

/// `simulate`: run the grid, write `results.csv` (and raw estimates when
/// retained) under `--out`. Nothing is printed to standard output;
/// progress goes to standard error. No partial outputs survive a
/// failure.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let cfg = resolve_config(args)?;
    cfg.validate().map_err(CliError::from)?;

    let cells = cfg.cells();
    eprintln!(
        "running {} cell(s) x {} estimator(s), {} reps each (seed {})",
        cells.len(),
        cfg.estimators.len(),
        cfg.reps,
        cfg.seed
    );
    let run = || {
        run_grid_with(&cfg, args.retain_raw, &|n, k| {
            eprintln!("cell N={n} k={k} done");
        })
    };
    let output = match args.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot build thread pool: {e}")))?
            .install(run),
        None => run(),
    }?;

    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", args.out.display())))?;

    let rows: Vec<TableRow> = output.rows.iter().map(TableRow::from).collect();
    let csv = render_table(&rows, TableFormat::Csv)?;

    let mut written: Vec<PathBuf> = Vec::new();
    let mut write_tracked = |path: PathBuf, content: &str| -> Result<(), CliError> {
        write_file(&path, content)?;
        written.push(path);
        Ok(())
    };
    let result = (|| {
        write_tracked(args.out.join("results.csv"), &csv)?;
        for raw in &output.raw {
            let mut body = String::new();
            for v in &raw.values {
                body.push_str(&format!("{v}\n"));
            }
            write_tracked(args.out.join(raw_file_name(raw.n, raw.k, raw.estimator)), &body)?;
        }
        Ok(())
    })();
    if result.is_err() {
        for path in &written {
            let _ = fs::remove_file(path);
        }
        return result;
    }

    eprintln!(
        "wrote {} ({} rows){}",
        args.out.join("results.csv").display(),
        rows.len(),
        if args.retain_raw {
            format!(" and {} raw-estimate file(s)", output.raw.len())
        } else {
            String::new()
        }
    );
    Ok(())
}

fn histogram_bins(len: usize) -> usize {
    (len as f64).sqrt().ceil().clamp(1.0, 60.0) as usize
}

/// `report`: read a results CSV, add exact reference rows, render the
/// Markdown report, and (with `--plots`) one labeled histogram SVG per
/// (cell, estimator) that has retained raw estimates.
pub fn cmd_report(args: &ReportArgs) -> Result<(), CliError> {
    let text = read_file(&args.results)?;
    let sim_rows = parse_results_csv(&text)?;
    if sim_rows.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no data rows",
            args.results.display()
        )));
    }
    let criterion: Criterion = args
        .criterion
        .parse()
        .map_err(|e: ReportError| CliError::Usage(e.to_string()))?;

    // exact reference rows for every (cell, estimator) not already exact
    let mut rows = sim_rows.clone();
    let mut seen_exact: Vec<(u64, u64, EstimatorId)> = sim_rows
        .iter()
        .filter(|r| r.reps == RepsCol::Exact)
        .map(|r| (r.n, r.k, r.estimator))
        .collect();
    for r in &sim_rows {
        let key = (r.n, r.k, r.estimator);
        if r.reps != RepsCol::Exact && !seen_exact.contains(&key) {
            let exact = exact_moments(r.estimator, r.n, r.k)
                .map_err(|e| CliError::Data(format!("row (N={}, k={}): {e}", r.n, r.k)))?;
            rows.push(TableRow::from(&exact));
            seen_exact.push(key);
        }
    }

    // histograms from raw estimates sitting next to the results file
    let mut plot_refs: Vec<String> = Vec::new();
    if let Some(plots_dir) = &args.plots {
        let raw_dir = args.results.parent().unwrap_or_else(|| Path::new("."));
        let mut targets: Vec<(u64, u64, EstimatorId)> = sim_rows
            .iter()
            .filter(|r| r.reps != RepsCol::Exact)
            .map(|r| (r.n, r.k, r.estimator))
            .collect();
        targets.dedup();
        let mut made = 0usize;
        for (n, k, id) in targets {
            let raw_path = raw_dir.join(raw_file_name(n, k, id));
            if !raw_path.is_file() {
                continue;
            }
            let mut values = Vec::new();
            for (idx, line) in read_file(&raw_path)?.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                values.push(line.parse::<f64>().map_err(|_| {
                    CliError::Data(format!(
                        "{}: line {}: bad estimate `{line}`",
                        raw_path.display(),
                        idx + 1
                    ))
                })?);
            }
            if values.is_empty() {
                continue;
            }
            let svg = render_histogram_svg(
                &values,
                &format!("{id} estimates at N = {n}, k = {k}"),
                "estimate of N",
                "frequency",
                histogram_bins(values.len()),
            )?;
            fs::create_dir_all(plots_dir).map_err(|e| {
                CliError::Usage(format!("cannot create {}: {e}", plots_dir.display()))
            })?;
            let name = format!("hist_N{n}_k{k}_{id}.svg");
            write_file(&plots_dir.join(&name), &svg)?;
            plot_refs.push(format!("{}/{name}", plots_dir.display()));
            made += 1;
        }
        if made > 0 {
            eprintln!("wrote {made} plot(s) under {}", plots_dir.display());
        }
    }

    let md = render_report(&rows, criterion, &plot_refs)?;
    write_file(&args.out, &md)?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}
