//! Instance generation, suite execution, result files and aggregation.

mod config;
mod generate;
mod instance_file;
mod report;
mod suite;

pub use config::{HighDayTarget, SuiteConfig};
pub use generate::{
    default_pair_targets, feasible_pair_count, generate_instances, high_day_count, spare_patterns, Generated,
    GeneratedInstance, InstanceTags, SkippedCell,
};
pub use instance_file::{AmbiguityFile, InstanceFile, DEFAULT_ESTIMATE, SCHEMA_VERSION};
pub use report::{
    aggregate_report, ambiguity_bucket, build_report, read_instances, read_results, summarize, DistributionAverages,
    GroupSummary, OptimalitySummary, ParsedRow, Report, AMBIGUITY_BUCKETS, REPORT_COLUMNS,
};
pub use suite::{
    collect_instances, format_float, instance_record, run_instance, run_instances, run_suite, write_instances,
    DistributionRow, InstanceOutcome, Manifest, ResultRow, SuiteOutcome, DISTRIBUTION_COLUMNS, INSTANCE_COLUMNS,
    RESULT_COLUMNS, SUPPORT_DECIMALS,
};
