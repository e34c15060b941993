//! Aggregation of suite outputs into optimality and gap summaries.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::generate::InstanceTags;
use super::suite::{format_float, DISTRIBUTION_COLUMNS, INSTANCE_COLUMNS, RESULT_COLUMNS};
use crate::error::{Error, Result};
use crate::parametric::Algorithm;

/// Lower edges of the ambiguity-set size buckets.
pub const AMBIGUITY_BUCKETS: [usize; 5] = [0, 100, 500, 1000, 5000];

pub fn ambiguity_bucket(size: usize) -> String {
    let k = AMBIGUITY_BUCKETS.iter().rposition(|&edge| size >= edge).unwrap_or(0);
    match AMBIGUITY_BUCKETS.get(k + 1) {
        Some(next) => format!("{}-{}", AMBIGUITY_BUCKETS[k], next - 1),
        None => format!("{}+", AMBIGUITY_BUCKETS[k]),
    }
}

/// A results row as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRow {
    pub instance_id: String,
    pub algorithm: Algorithm,
    pub ok: bool,
    pub p_gap: Option<f64>,
    pub y_gap: Option<f64>,
    pub p_apg: Option<f64>,
    pub y_apg: Option<f64>,
    pub y_optimal: Option<bool>,
    pub p_optimal: Option<bool>,
    pub optimal: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OptimalitySummary {
    pub rows: usize,
    pub failed: usize,
    pub optimal_pct: f64,
    pub p_optimal_pct: f64,
    pub y_optimal_pct: f64,
    pub mean_p_gap: f64,
    pub mean_y_gap: f64,
    pub mean_p_apg: f64,
    pub mean_y_apg: f64,
    /// Share of rows whose worst value is at most the reported objective.
    pub nonpositive_p_gap_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    /// `ambiguity_size`, `intake_space` or `pairs`.
    pub grouping: String,
    pub key: String,
    pub algorithm: Algorithm,
    pub summary: OptimalitySummary,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DistributionAverages {
    pub instances: usize,
    pub objective: f64,
    pub divergence: f64,
    pub kl_divergence: f64,
    pub entropy: f64,
    pub total_mean: f64,
    pub total_variance: f64,
    pub total_skewness: f64,
    pub popped: f64,
    pub suppressed: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub by_algorithm: BTreeMap<Algorithm, OptimalitySummary>,
    pub groups: Vec<GroupSummary>,
    pub distributions: BTreeMap<Algorithm, DistributionAverages>,
    /// `100 (NP − P) / P` for each averaged statistic.
    pub distribution_gap_pct: BTreeMap<String, f64>,
}

pub const REPORT_COLUMNS: [&str; 14] = [
    "grouping",
    "key",
    "algorithm",
    "rows",
    "failed",
    "optimal_pct",
    "p_optimal_pct",
    "y_optimal_pct",
    "mean_p_gap",
    "mean_y_gap",
    "mean_p_apg",
    "mean_y_apg",
    "nonpositive_p_gap_pct",
    "instances",
];

impl Report {
    /// Flat table: one line per algorithm overall, then per group.
    pub fn to_records(&self) -> Vec<Vec<String>> {
        let line = |grouping: &str, key: &str, algorithm: Algorithm, s: &OptimalitySummary| {
            vec![
                grouping.to_string(),
                key.to_string(),
                algorithm.to_string(),
                s.rows.to_string(),
                s.failed.to_string(),
                format_float(s.optimal_pct),
                format_float(s.p_optimal_pct),
                format_float(s.y_optimal_pct),
                format_float(s.mean_p_gap),
                format_float(s.mean_y_gap),
                format_float(s.mean_p_apg),
                format_float(s.mean_y_apg),
                format_float(s.nonpositive_p_gap_pct),
                (s.rows - s.failed).to_string(),
            ]
        };
        let mut out: Vec<Vec<String>> = self.by_algorithm.iter().map(|(&a, s)| line("all", "all", a, s)).collect();
        out.extend(self.groups.iter().map(|g| line(&g.grouping, &g.key, g.algorithm, &g.summary)));
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let csv_error = |source| Error::Csv { context: "formatting the report".into(), source };
        writer.write_record(REPORT_COLUMNS).map_err(csv_error)?;
        for record in self.to_records() {
            writer.write_record(&record).map_err(csv_error)?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Solver(format!("flushing the report: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub fn summarize(rows: &[&ParsedRow]) -> OptimalitySummary {
    let ok: Vec<&&ParsedRow> = rows.iter().filter(|r| r.ok).collect();
    let pct = |count: usize| if ok.is_empty() { 0.0 } else { count as f64 / ok.len() as f64 * 100.0 };
    let mean = |f: fn(&ParsedRow) -> Option<f64>| {
        let values: Vec<f64> = ok.iter().filter_map(|r| f(r)).collect();
        if values.is_empty() {
            0.0
        } else {
            values.iter().sum::<f64>() / values.len() as f64
        }
    };
    OptimalitySummary {
        rows: rows.len(),
        failed: rows.len() - ok.len(),
        optimal_pct: pct(ok.iter().filter(|r| r.optimal == Some(true)).count()),
        p_optimal_pct: pct(ok.iter().filter(|r| r.p_optimal == Some(true)).count()),
        y_optimal_pct: pct(ok.iter().filter(|r| r.y_optimal == Some(true)).count()),
        mean_p_gap: mean(|r| r.p_gap),
        mean_y_gap: mean(|r| r.y_gap),
        mean_p_apg: mean(|r| r.p_apg),
        mean_y_apg: mean(|r| r.y_apg),
        nonpositive_p_gap_pct: pct(ok.iter().filter(|r| r.p_gap.is_some_and(|g| g <= 0.0)).count()),
    }
}

/// Reads a CSV file whose header must contain `expected`, in any order.
struct Table {
    columns: HashMap<String, usize>,
    records: Vec<csv::StringRecord>,
    origin: String,
}

impl Table {
    fn read(path: &Path, expected: &[&str]) -> Result<Self> {
        let origin = path.display().to_string();
        let csv_error = |source| Error::Csv { context: format!("reading {origin}"), source };
        let mut reader = csv::Reader::from_path(path).map_err(csv_error)?;
        let header = reader.headers().map_err(csv_error)?.clone();
        let columns: HashMap<String, usize> = header.iter().enumerate().map(|(k, h)| (h.to_string(), k)).collect();
        if let Some(missing) = expected.iter().find(|c| !columns.contains_key(**c)) {
            return Err(Error::Schema(format!("{origin} lacks column {missing:?}")));
        }
        let records = reader.records().collect::<std::result::Result<Vec<_>, _>>().map_err(csv_error)?;
        Ok(Self { columns, records, origin })
    }

    fn text<'a>(&self, record: &'a csv::StringRecord, column: &str) -> &'a str {
        record.get(self.columns[column]).unwrap_or("")
    }

    fn parse<T: std::str::FromStr>(&self, record: &csv::StringRecord, line: usize, column: &str) -> Result<Option<T>> {
        let raw = self.text(record, column).trim();
        if raw.is_empty() {
            return Ok(None);
        }
        raw.parse().map(Some).map_err(|_| {
            Error::Schema(format!("{} line {}: column {column:?} holds unparsable value {raw:?}", self.origin, line + 2))
        })
    }

    fn required<T: std::str::FromStr>(&self, record: &csv::StringRecord, line: usize, column: &str) -> Result<T> {
        self.parse(record, line, column)?
            .ok_or_else(|| Error::Schema(format!("{} line {}: column {column:?} is empty", self.origin, line + 2)))
    }
}

pub fn read_results(path: &Path) -> Result<Vec<ParsedRow>> {
    let table = Table::read(path, &RESULT_COLUMNS)?;
    table
        .records
        .iter()
        .enumerate()
        .map(|(line, rec)| {
            let algorithm = table.text(rec, "algorithm").parse::<Algorithm>().map_err(|_| {
                Error::Schema(format!("{} line {}: column \"algorithm\" holds an unknown name", table.origin, line + 2))
            })?;
            Ok(ParsedRow {
                instance_id: table.text(rec, "instance_id").to_string(),
                algorithm,
                ok: table.text(rec, "status") == "ok",
                p_gap: table.parse(rec, line, "p_gap")?,
                y_gap: table.parse(rec, line, "y_gap")?,
                p_apg: table.parse(rec, line, "p_apg")?,
                y_apg: table.parse(rec, line, "y_apg")?,
                y_optimal: table.parse(rec, line, "y_optimal")?,
                p_optimal: table.parse(rec, line, "p_optimal")?,
                optimal: table.parse(rec, line, "optimal")?,
            })
        })
        .collect()
}

pub fn read_instances(path: &Path) -> Result<BTreeMap<String, InstanceTags>> {
    let table = Table::read(path, &INSTANCE_COLUMNS)?;
    table
        .records
        .iter()
        .enumerate()
        .map(|(line, rec)| {
            let tags = InstanceTags {
                horizon: table.required(rec, line, "horizon")?,
                pairs: table.required(rec, line, "pairs")?,
                high_days: table.required(rec, line, "high_days")?,
                intake_space: table.required(rec, line, "intake_space")?,
                ambiguity_size: table.required(rec, line, "ambiguity_size")?,
                samples: table.required(rec, line, "samples")?,
                n_probs: table.required(rec, line, "n_probs")?,
            };
            Ok((table.text(rec, "instance_id").to_string(), tags))
        })
        .collect()
}

fn read_distributions(path: &Path) -> Result<BTreeMap<Algorithm, DistributionAverages>> {
    let table = Table::read(path, &DISTRIBUTION_COLUMNS)?;
    let mut sums: BTreeMap<Algorithm, DistributionAverages> = BTreeMap::new();
    for (line, rec) in table.records.iter().enumerate() {
        let model = table.text(rec, "model").parse::<Algorithm>().map_err(|_| {
            Error::Schema(format!("{} line {}: column \"model\" holds an unknown name", table.origin, line + 2))
        })?;
        let entry = sums.entry(model).or_default();
        entry.instances += 1;
        let value = |column: &str| table.required::<f64>(rec, line, column);
        entry.objective += value("objective")?;
        entry.divergence += value("divergence")?;
        entry.kl_divergence += value("kl_divergence")?;
        entry.entropy += value("entropy")?;
        entry.total_mean += value("total_mean")?;
        entry.total_variance += value("total_variance")?;
        entry.total_skewness += value("total_skewness")?;
        entry.popped += value("popped")?;
        entry.suppressed += value("suppressed")?;
    }
    for entry in sums.values_mut() {
        let n = entry.instances as f64;
        for field in [
            &mut entry.objective,
            &mut entry.divergence,
            &mut entry.kl_divergence,
            &mut entry.entropy,
            &mut entry.total_mean,
            &mut entry.total_variance,
            &mut entry.total_skewness,
            &mut entry.popped,
            &mut entry.suppressed,
        ] {
            *field /= n;
        }
    }
    Ok(sums)
}

fn distribution_gaps(averages: &BTreeMap<Algorithm, DistributionAverages>) -> BTreeMap<String, f64> {
    let (Some(p), Some(np)) = (averages.get(&Algorithm::Exact), averages.get(&Algorithm::Nonparametric)) else {
        return BTreeMap::new();
    };
    let pairs = [
        ("objective", p.objective, np.objective),
        ("divergence", p.divergence, np.divergence),
        ("kl_divergence", p.kl_divergence, np.kl_divergence),
        ("entropy", p.entropy, np.entropy),
        ("total_mean", p.total_mean, np.total_mean),
        ("total_variance", p.total_variance, np.total_variance),
        ("total_skewness", p.total_skewness, np.total_skewness),
        ("popped", p.popped, np.popped),
        ("suppressed", p.suppressed, np.suppressed),
    ];
    pairs
        .into_iter()
        .map(|(name, base, other)| {
            let gap = if base == 0.0 { if other == 0.0 { 0.0 } else { f64::INFINITY } } else { 100.0 * (other - base) / base };
            (name.to_string(), gap)
        })
        .collect()
}

/// Builds the summary from parsed rows and instance tags.
pub fn build_report(rows: &[ParsedRow], tags: &BTreeMap<String, InstanceTags>) -> Result<Report> {
    let mut report = Report::default();
    for row in rows {
        if let (Some(o), Some(y), Some(p)) = (row.optimal, row.y_optimal, row.p_optimal) {
            if o != (y && p) {
                return Err(Error::Schema(format!(
                    "row {} {}: optimal flag disagrees with the y and p flags",
                    row.instance_id, row.algorithm
                )));
            }
        }
    }
    let mut algorithms: Vec<Algorithm> = rows.iter().map(|r| r.algorithm).collect();
    algorithms.sort();
    algorithms.dedup();
    for &algorithm in &algorithms {
        let subset: Vec<&ParsedRow> = rows.iter().filter(|r| r.algorithm == algorithm).collect();
        report.by_algorithm.insert(algorithm, summarize(&subset));
    }

    type KeyFn = fn(&InstanceTags) -> (usize, String);
    let groupings: [(&str, KeyFn); 3] = [
        ("ambiguity_size", |t| {
            let k = AMBIGUITY_BUCKETS.iter().rposition(|&e| t.ambiguity_size >= e).unwrap_or(0);
            (k, ambiguity_bucket(t.ambiguity_size))
        }),
        ("intake_space", |t| (t.intake_space as usize, t.intake_space.to_string())),
        ("pairs", |t| (t.pairs, t.pairs.to_string())),
    ];
    for (grouping, key_of) in groupings {
        let mut groups: BTreeMap<((usize, String), Algorithm), Vec<&ParsedRow>> = BTreeMap::new();
        for row in rows {
            let tag = tags.get(&row.instance_id).ok_or_else(|| {
                Error::Schema(format!("instance {} has results but no entry in instances.csv", row.instance_id))
            })?;
            groups.entry((key_of(tag), row.algorithm)).or_default().push(row);
        }
        for (((_, key), algorithm), members) in groups {
            report.groups.push(GroupSummary {
                grouping: grouping.into(),
                key,
                algorithm,
                summary: summarize(&members),
            });
        }
    }
    Ok(report)
}

/// Reads `results.csv`, `instances.csv` and, when present,
/// `distributions.csv` from a suite output directory.
pub fn aggregate_report(dir: &Path) -> Result<Report> {
    let rows = read_results(&dir.join("results.csv"))?;
    let tags = read_instances(&dir.join("instances.csv"))?;
    let mut report = build_report(&rows, &tags)?;
    let distributions = dir.join("distributions.csv");
    if distributions.exists() {
        report.distributions = read_distributions(&distributions)?;
        report.distribution_gap_pct = distribution_gaps(&report.distributions);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, algorithm: Algorithm, y: bool, p: bool) -> ParsedRow {
        ParsedRow {
            instance_id: id.into(),
            algorithm,
            ok: true,
            p_gap: Some(if p { 0.0 } else { 0.5 }),
            y_gap: Some(if y { 0.0 } else { 0.2 }),
            p_apg: Some(if p { 0.0 } else { 5.0 }),
            y_apg: Some(if y { 0.0 } else { 2.0 }),
            y_optimal: Some(y),
            p_optimal: Some(p),
            optimal: Some(y && p),
        }
    }

    fn tags(pairs: usize, size: usize) -> InstanceTags {
        InstanceTags { horizon: 5, pairs, high_days: 1, intake_space: 100, ambiguity_size: size, samples: 10, n_probs: 5 }
    }

    #[test]
    fn distribution_gaps_are_relative_to_the_parametric_model() {
        let p = DistributionAverages { instances: 2, divergence: 0.4, suppressed: 0.0, ..Default::default() };
        let np = DistributionAverages { instances: 2, divergence: 0.5, suppressed: 3.0, ..Default::default() };
        let gaps = distribution_gaps(&BTreeMap::from([(Algorithm::Exact, p), (Algorithm::Nonparametric, np)]));
        assert!((gaps["divergence"] - 25.0).abs() < 1e-9);
        assert_eq!(gaps["suppressed"], f64::INFINITY);
        assert_eq!(gaps["entropy"], 0.0);
    }

    #[test]
    fn buckets() {
        assert_eq!(ambiguity_bucket(0), "0-99");
        assert_eq!(ambiguity_bucket(305), "100-499");
        assert_eq!(ambiguity_bucket(500), "500-999");
        assert_eq!(ambiguity_bucket(9000), "5000+");
    }

    #[test]
    fn all_optimal_input_reports_full_marks() {
        let rows = vec![row("a", Algorithm::CuttingSurfaceFull, true, true), row("b", Algorithm::CuttingSurfaceFull, true, true)];
        let tag_map = BTreeMap::from([("a".to_string(), tags(3, 50)), ("b".to_string(), tags(7, 600))]);
        let report = build_report(&rows, &tag_map).unwrap();
        let s = &report.by_algorithm[&Algorithm::CuttingSurfaceFull];
        assert_eq!((s.optimal_pct, s.p_optimal_pct, s.y_optimal_pct), (100.0, 100.0, 100.0));
        assert!(report.groups.iter().all(|g| g.summary.optimal_pct == 100.0));
    }

    #[test]
    fn pair_groups_follow_the_tags() {
        let rows = vec![
            row("a", Algorithm::CuttingSurface, true, false),
            row("b", Algorithm::CuttingSurface, true, true),
            row("c", Algorithm::CuttingSurface, false, true),
        ];
        let tag_map = BTreeMap::from([
            ("a".to_string(), tags(3, 50)),
            ("b".to_string(), tags(5, 50)),
            ("c".to_string(), tags(7, 50)),
        ]);
        let report = build_report(&rows, &tag_map).unwrap();
        let keys: Vec<&str> = report.groups.iter().filter(|g| g.grouping == "pairs").map(|g| g.key.as_str()).collect();
        assert_eq!(keys, vec!["3", "5", "7"]);
        let overall = &report.by_algorithm[&Algorithm::CuttingSurface];
        assert!((overall.optimal_pct - 100.0 / 3.0).abs() < 1e-9);
        assert!((overall.y_optimal_pct - 200.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn inconsistent_flags_are_rejected() {
        let mut bad = row("a", Algorithm::CuttingSurface, true, true);
        bad.optimal = Some(false);
        let tag_map = BTreeMap::from([("a".to_string(), tags(3, 50))]);
        assert!(matches!(build_report(&[bad], &tag_map), Err(Error::Schema(_))));
    }

    #[test]
    fn missing_column_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        let header: Vec<&str> = RESULT_COLUMNS.iter().copied().filter(|&c| c != "y_gap").collect();
        std::fs::write(&path, header.join(",") + "\n").unwrap();
        let err = read_results(&path).unwrap_err().to_string();
        assert!(err.contains("y_gap"), "{err}");
    }
}
