//! Exponential-family GLM machinery: families, designs, IRLS fits, scores
//! and information blocks.

pub mod design;
pub mod family;
pub mod fit;
pub mod score;

pub use design::{build_design, DesignMatrix, INTERCEPT};
pub use family::Family;
pub use fit::{fit_full, fit_null, log_likelihood, FullFit, NullFit};
pub use score::{information_blocks, score_contributions, InfoBlocks, ScoreSet};
