//! Sign-flip plans, flip statistics, decision rules and the assembled test.

pub mod decide;
pub mod effective;
pub mod plan;
pub mod stats;
pub mod test;

pub use decide::{decide, p_value, Alternative, FlipSummary, Method, TestResult};
pub use effective::{effective_contributions, EffectiveScores};
pub use plan::{make_flip_plan, FlipPlan, SamplingMode};
pub use stats::{flip_statistics_quadratic, flip_statistics_scalar, StatKind, StatVector};
pub use test::{flip_statistics, flip_test, flip_test_scores, FlipOptions, ScoreMethod, VhatChoice};
