//! Suite execution: every instance is solved exactly for the reference
//! value, then by each configured algorithm, and each answer is scored
//! against the full parametric set.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SuiteConfig;
use super::generate::{generate_instances, GeneratedInstance, InstanceTags, SkippedCell};
use super::instance_file::InstanceFile;
use crate::error::{Error, Result};
use crate::expectation::LawCache;
use crate::master::MasterStrategy;
use crate::nonparametric::{distribution_summary, solve_np, NonparametricAmbiguity, NonparametricOptions};
use crate::parametric::{
    brute_force_metrics, solve_benders, solve_brute_force, solve_cs, solve_cs_full, solve_exact, solve_reduced_intake,
    solve_robust, Algorithm, BendersOptions, CuttingSurfaceOptions, SolveReport,
};

/// Decimal places used when counting popped and suppressed intakes.
pub const SUPPORT_DECIMALS: i32 = 6;

pub const RESULT_COLUMNS: [&str; 18] = [
    "instance_id",
    "algorithm",
    "status",
    "plan",
    "worst_case",
    "objective",
    "p_gap",
    "y_gap",
    "p_apg",
    "y_apg",
    "y_optimal",
    "p_optimal",
    "optimal",
    "iterations",
    "pmf_tables",
    "evaluator_calls",
    "converged",
    "wall_time_ms",
];

pub const INSTANCE_COLUMNS: [&str; 8] =
    ["instance_id", "horizon", "pairs", "high_days", "intake_space", "ambiguity_size", "samples", "n_probs"];

pub const DISTRIBUTION_COLUMNS: [&str; 12] = [
    "instance_id",
    "model",
    "objective",
    "radius",
    "divergence",
    "kl_divergence",
    "entropy",
    "total_mean",
    "total_variance",
    "total_skewness",
    "popped",
    "suppressed",
];

/// Outcome of one algorithm on one instance. Numeric fields are `None`
/// when the solve failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance_id: String,
    pub algorithm: Algorithm,
    /// `ok`, or `error: <message>`.
    pub status: String,
    pub plan: String,
    pub worst_case: String,
    pub objective: Option<f64>,
    pub p_gap: Option<f64>,
    pub y_gap: Option<f64>,
    pub p_apg: Option<f64>,
    pub y_apg: Option<f64>,
    pub y_optimal: Option<bool>,
    pub p_optimal: Option<bool>,
    pub optimal: Option<bool>,
    pub iterations: Option<usize>,
    pub pmf_tables: Option<usize>,
    pub evaluator_calls: Option<usize>,
    pub converged: Option<bool>,
    pub wall_time_ms: Option<f64>,
}

impl ResultRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    fn failed(instance_id: &str, algorithm: Algorithm, error: &Error) -> Self {
        Self {
            instance_id: instance_id.to_string(),
            algorithm,
            status: format!("error: {error}"),
            plan: String::new(),
            worst_case: String::new(),
            objective: None,
            p_gap: None,
            y_gap: None,
            p_apg: None,
            y_apg: None,
            y_optimal: None,
            p_optimal: None,
            optimal: None,
            iterations: None,
            pmf_tables: None,
            evaluator_calls: None,
            converged: None,
            wall_time_ms: None,
        }
    }

    pub fn to_record(&self) -> Vec<String> {
        let opt_f = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        let opt_b = |v: Option<bool>| v.map(|b| b.to_string()).unwrap_or_default();
        let opt_u = |v: Option<usize>| v.map(|n| n.to_string()).unwrap_or_default();
        vec![
            self.instance_id.clone(),
            self.algorithm.to_string(),
            self.status.clone(),
            self.plan.clone(),
            self.worst_case.clone(),
            opt_f(self.objective),
            opt_f(self.p_gap),
            opt_f(self.y_gap),
            opt_f(self.p_apg),
            opt_f(self.y_apg),
            opt_b(self.y_optimal),
            opt_b(self.p_optimal),
            opt_b(self.optimal),
            opt_u(self.iterations),
            opt_u(self.pmf_tables),
            opt_u(self.evaluator_calls),
            opt_b(self.converged),
            opt_f(self.wall_time_ms),
        ]
    }
}

/// Table-style description of a worst-case distribution against the nominal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub instance_id: String,
    pub model: Algorithm,
    pub objective: f64,
    pub radius: f64,
    pub divergence: f64,
    pub kl_divergence: f64,
    pub entropy: f64,
    pub total_mean: f64,
    pub total_variance: f64,
    pub total_skewness: f64,
    pub popped: usize,
    pub suppressed: usize,
}

impl DistributionRow {
    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.instance_id.clone(),
            self.model.to_string(),
            format_float(self.objective),
            format_float(self.radius),
            format_float(self.divergence),
            format_float(self.kl_divergence),
            format_float(self.entropy),
            format_float(self.total_mean),
            format_float(self.total_variance),
            format_float(self.total_skewness),
            self.popped.to_string(),
            self.suppressed.to_string(),
        ]
    }
}

/// Ten significant digits, shortest form.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.9e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    if !(1e-4..1e15).contains(&rounded.abs()) {
        return format!("{rounded:e}");
    }
    rounded.to_string()
}

#[derive(Debug, Clone, Default)]
pub struct InstanceOutcome {
    pub rows: Vec<ResultRow>,
    pub distributions: Vec<DistributionRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub seed: u64,
    pub config: SuiteConfig,
    pub instances: usize,
    pub rows: usize,
    pub skipped: Vec<SkippedCell>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub instances: Vec<(String, InstanceTags)>,
    pub rows: Vec<ResultRow>,
    pub distributions: Vec<DistributionRow>,
    pub skipped: Vec<SkippedCell>,
    pub out_dir: PathBuf,
}

fn score(
    instance: &GeneratedInstance,
    report: &SolveReport,
    theta: &crate::intake::ParametricAmbiguitySet,
    optimum: f64,
    cache: &LawCache,
) -> Result<ResultRow> {
    let gaps = brute_force_metrics(&instance.instance, theta, report, optimum, cache)?;
    Ok(ResultRow {
        instance_id: instance.id.clone(),
        algorithm: report.algorithm,
        status: "ok".into(),
        plan: report.plan.to_string(),
        worst_case: report.worst_case.to_string(),
        objective: Some(report.objective),
        p_gap: Some(gaps.p_gap),
        y_gap: Some(gaps.y_gap),
        p_apg: Some(gaps.p_apg),
        y_apg: Some(gaps.y_apg),
        y_optimal: Some(gaps.y_optimal),
        p_optimal: Some(gaps.p_optimal),
        optimal: Some(gaps.optimal()),
        iterations: Some(report.iterations),
        pmf_tables: Some(report.pmf_tables),
        evaluator_calls: Some(report.evaluator_calls),
        converged: Some(report.converged),
        wall_time_ms: Some(report.wall_time_ms),
    })
}

/// Runs every configured algorithm on one instance. Failures become rows.
pub fn run_instance(instance: &GeneratedInstance, config: &SuiteConfig) -> InstanceOutcome {
    let mut outcome = InstanceOutcome::default();
    if config.algorithms.is_empty() {
        return outcome;
    }
    let fail_all = |error: Error| InstanceOutcome {
        rows: config.algorithms.iter().map(|&a| ResultRow::failed(&instance.id, a, &error)).collect(),
        distributions: Vec::new(),
    };
    let theta = match instance.file.confidence_set() {
        Ok(theta) => theta,
        Err(e) => return fail_all(e),
    };
    let exact = match solve_exact(&instance.instance, &theta, MasterStrategy::ExactSearch) {
        Ok(report) => report,
        Err(e) => return fail_all(e),
    };
    let optimum = exact.objective;
    let cache = LawCache::new(instance.instance.intake_max());
    let cs_options =
        CuttingSurfaceOptions { epsilon: config.epsilon, max_iterations: config.k_max, ..CuttingSurfaceOptions::default() };

    for &algorithm in &config.algorithms {
        let inst = &instance.instance;
        let mut attempt = || -> Result<SolveReport> {
            match algorithm {
                Algorithm::Exact => Ok(exact.clone()),
                Algorithm::CuttingSurface => solve_cs(inst, &theta, &cs_options),
                Algorithm::CuttingSurfaceFull => solve_cs_full(inst, &theta, &cs_options),
                Algorithm::ReducedIntake => solve_reduced_intake(inst, &theta, config.beta, MasterStrategy::ExactSearch),
                Algorithm::Robust => solve_robust(inst, MasterStrategy::ExactSearch),
                Algorithm::BruteForce => solve_brute_force(inst, &theta),
                Algorithm::Benders => {
                    let options = BendersOptions { epsilon: config.benders_epsilon, ..BendersOptions::default() };
                    solve_benders(inst, &theta, &options).map(|(report, _)| report)
                }
                Algorithm::Nonparametric => {
                    let (report, rows) = run_nonparametric(instance, config, &exact)?;
                    outcome.distributions.extend(rows);
                    Ok(report)
                }
            }
        };
        let row = attempt().and_then(|report| score(instance, &report, &theta, optimum, &cache));
        outcome.rows.push(row.unwrap_or_else(|e| {
            log::warn!("{} {algorithm}: {e}", instance.id);
            ResultRow::failed(&instance.id, algorithm, &e)
        }));
    }
    outcome
}

/// Solves the divergence-ball model and describes both worst cases
/// against the nominal distribution.
fn run_nonparametric(
    instance: &GeneratedInstance,
    config: &SuiteConfig,
    exact: &SolveReport,
) -> Result<(SolveReport, Vec<DistributionRow>)> {
    let inst = &instance.instance;
    let dof = config.np_dof.unwrap_or(inst.horizon() as u32);
    let estimate = instance.file.estimate()?;
    let ambiguity =
        NonparametricAmbiguity::from_samples(inst.intake_max(), estimate, instance.file.sample_count(), config.np_alpha, dof)?;
    let solution = solve_np(inst, &ambiguity, &NonparametricOptions::default())?;
    let space = ambiguity.scenarios().space();
    let nominal = ambiguity.nominal();

    let crate::parametric::WorstCase::Parameter(worst_probs) = &exact.worst_case else {
        return Err(Error::Solver("exact model reported no worst-case parameter".into()));
    };
    let law = LawCache::new(inst.intake_max()).get(worst_probs)?;
    let parametric_worst = ambiguity.scenarios().weights_under(&law);

    let row = |model: Algorithm, objective: f64, p: &[f64]| -> Result<DistributionRow> {
        let s = distribution_summary(p, nominal, space, SUPPORT_DECIMALS)?;
        Ok(DistributionRow {
            instance_id: instance.id.clone(),
            model,
            objective,
            radius: ambiguity.radius(),
            divergence: s.divergence,
            kl_divergence: s.kl_divergence,
            entropy: s.entropy,
            total_mean: s.total_mean,
            total_variance: s.total_variance,
            total_skewness: s.total_skewness,
            popped: s.popped,
            suppressed: s.suppressed,
        })
    };
    let rows = vec![
        row(Algorithm::Exact, exact.objective, &parametric_worst)?,
        row(Algorithm::Nonparametric, solution.report.objective, &solution.worst_case.probabilities)?,
    ];
    Ok((solution.report, rows))
}

/// Generated instances, or the configured instance documents.
pub fn collect_instances(config: &SuiteConfig) -> Result<(Vec<GeneratedInstance>, Vec<SkippedCell>)> {
    if config.instance_files.is_empty() {
        let generated = generate_instances(config)?;
        return Ok((generated.instances, generated.skipped));
    }
    let instances = config
        .instance_files
        .iter()
        .map(|path| {
            let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string());
            GeneratedInstance::from_file(id, InstanceFile::load(path)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((instances, Vec::new()))
}

/// Runs instances on a pool of `jobs` threads (0 for the default) and
/// returns rows ordered by instance id, then algorithm.
pub fn run_instances(instances: &[GeneratedInstance], config: &SuiteConfig, jobs: usize) -> Result<InstanceOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Solver(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<InstanceOutcome> =
        pool.install(|| instances.par_iter().map(|instance| run_instance(instance, config)).collect());
    let mut merged = InstanceOutcome::default();
    for outcome in outcomes {
        merged.rows.extend(outcome.rows);
        merged.distributions.extend(outcome.distributions);
    }
    let rank = |a: Algorithm| Algorithm::ALL.iter().position(|&b| b == a).unwrap_or(usize::MAX);
    merged.rows.sort_by(|a, b| a.instance_id.cmp(&b.instance_id).then(rank(a.algorithm).cmp(&rank(b.algorithm))));
    merged
        .distributions
        .sort_by(|a, b| a.instance_id.cmp(&b.instance_id).then(rank(a.model).cmp(&rank(b.model))));
    Ok(merged)
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { context: format!("writing {}", path.display()), source }
}

pub(crate) fn write_csv(path: &Path, header: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let csv_error = |source| Error::Csv { context: format!("writing {}", path.display()), source };
    let mut writer = csv::Writer::from_path(path).map_err(csv_error)?;
    writer.write_record(header).map_err(csv_error)?;
    for record in records {
        writer.write_record(&record).map_err(csv_error)?;
    }
    writer.flush().map_err(io_error(path))
}

pub fn instance_record(id: &str, tags: &InstanceTags) -> Vec<String> {
    vec![
        id.to_string(),
        tags.horizon.to_string(),
        tags.pairs.to_string(),
        tags.high_days.to_string(),
        tags.intake_space.to_string(),
        tags.ambiguity_size.to_string(),
        tags.samples.to_string(),
        tags.n_probs.to_string(),
    ]
}

/// Writes one JSON document per instance and an `instances.csv` index.
pub fn write_instances(instances: &[GeneratedInstance], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_error(dir))?;
    for instance in instances {
        instance.file.save(&dir.join(format!("{}.json", instance.id)))?;
    }
    write_csv(
        &dir.join("instances.csv"),
        &INSTANCE_COLUMNS,
        instances.iter().map(|i| instance_record(&i.id, &i.tags)),
    )
}

/// Generates or loads instances, runs them and writes `results.csv`,
/// `instances.csv`, `distributions.csv` and `manifest.json` to `out_dir`.
/// With no algorithms configured only the manifest is written.
pub fn run_suite(config: &SuiteConfig, out_dir: &Path) -> Result<SuiteOutcome> {
    config.validate()?;
    std::fs::create_dir_all(out_dir).map_err(io_error(out_dir))?;
    let (instances, skipped) = collect_instances(config)?;
    log::info!("running {} instances ({} cells skipped)", instances.len(), skipped.len());

    let merged = if config.algorithms.is_empty() { InstanceOutcome::default() } else { run_instances(&instances, config, config.jobs)? };
    let mut files = Vec::new();
    if !config.algorithms.is_empty() {
        write_csv(&out_dir.join("results.csv"), &RESULT_COLUMNS, merged.rows.iter().map(ResultRow::to_record))?;
        write_csv(
            &out_dir.join("instances.csv"),
            &INSTANCE_COLUMNS,
            instances.iter().map(|i| instance_record(&i.id, &i.tags)),
        )?;
        write_csv(
            &out_dir.join("distributions.csv"),
            &DISTRIBUTION_COLUMNS,
            merged.distributions.iter().map(DistributionRow::to_record),
        )?;
        files.extend(["results.csv", "instances.csv", "distributions.csv"].map(String::from));
    }
    files.push("manifest.json".into());
    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        seed: config.seed,
        config: config.clone(),
        instances: instances.len(),
        rows: merged.rows.len(),
        skipped: skipped.clone(),
        files,
    };
    let manifest_path = out_dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|source| Error::Json { context: "serialising the manifest".into(), source })?;
    let _ = writeln!(text);
    std::fs::write(&manifest_path, text).map_err(io_error(&manifest_path))?;

    Ok(SuiteOutcome {
        instances: instances.into_iter().map(|i| (i.id, i.tags)).collect(),
        rows: merged.rows,
        distributions: merged.distributions,
        skipped,
        out_dir: out_dir.to_path_buf(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = r#"{
        "schema_version": 1, "L": 2, "K": 1,
        "capacity": [30, 10], "workstack": [5, 20], "rollover_cost": [1, 1], "i_max": [20, 20],
        "ambiguity": {"N": 10, "alpha": 0.005, "n_probs": 100, "p_hat": [0.75, 0.75]}
    }"#;

    fn worked() -> GeneratedInstance {
        GeneratedInstance::from_file("worked".into(), InstanceFile::parse(WORKED, "inline").unwrap()).unwrap()
    }

    #[test]
    fn floats_keep_ten_significant_digits() {
        assert_eq!(format_float(19.196_225_566_902_672), "19.19622557");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(1e-12), "1e-12");
        assert_eq!(format_float(-2.055_968_563_123e-17), "-2.055968563e-17");
        assert_eq!(format_float(f64::INFINITY), "inf");
    }

    #[test]
    fn worked_instance_rows() {
        let config = SuiteConfig {
            algorithms: vec![
                Algorithm::Exact,
                Algorithm::CuttingSurface,
                Algorithm::CuttingSurfaceFull,
                Algorithm::ReducedIntake,
                Algorithm::Robust,
            ],
            ..SuiteConfig::default()
        };
        let outcome = run_instance(&worked(), &config);
        let by = |a: Algorithm| outcome.rows.iter().find(|r| r.algorithm == a).unwrap();
        assert!(outcome.rows.iter().all(ResultRow::is_ok));
        let cs = by(Algorithm::CuttingSurface);
        assert!((cs.p_gap.unwrap() - 0.1268).abs() < 1e-3);
        assert_eq!(cs.y_optimal, Some(true));
        assert_eq!(by(Algorithm::CuttingSurfaceFull).optimal, Some(true));
        assert_eq!(by(Algorithm::Exact).optimal, Some(true));
        assert_eq!(by(Algorithm::Robust).plan, "y[2,1]=5");
    }

    #[test]
    fn failures_become_rows() {
        let mut broken = worked();
        broken.file.ambiguity.alpha = 2.0;
        let config = SuiteConfig { algorithms: vec![Algorithm::Exact, Algorithm::CuttingSurface], ..SuiteConfig::default() };
        let outcome = run_instance(&broken, &config);
        assert_eq!(outcome.rows.len(), 2);
        assert!(outcome.rows.iter().all(|r| r.status.starts_with("error") && r.objective.is_none()));
    }

    #[test]
    fn empty_algorithm_list_writes_only_the_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let config = SuiteConfig { algorithms: vec![], horizons: vec![3], ..SuiteConfig::desk() };
        let outcome = run_suite(&config, dir.path()).unwrap();
        assert!(outcome.rows.is_empty());
        let names: Vec<String> =
            std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
        assert_eq!(names, vec!["manifest.json".to_string()]);
    }
}
