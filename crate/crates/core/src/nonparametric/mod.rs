//! Non-parametric model: any intake distribution within a modified
//! chi-square ball around the nominal binomial law.

mod divergence;
mod inner;
mod outer;

pub use divergence::{
    cone_holds, conjugate_modified_chi2, divergence_radius, entropy, kl_divergence, modified_chi2_divergence,
    MODIFIED_CHI2_CURVATURE,
};
pub use inner::{worst_case_distribution, InnerSolution, FLAT_COST_SPREAD};
pub use outer::{
    distribution_hash, distribution_summary, solve_np, DistributionSummary, NonparametricAmbiguity,
    NonparametricOptions, NonparametricSolution, NONPARAMETRIC_SCENARIO_CAP,
};
