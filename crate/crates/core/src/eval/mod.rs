//! Assignment-based Soft F1 over character spans.

mod hungarian;
mod metric;

pub use hungarian::{hungarian_max, AssignmentResult};
pub use metric::{evaluate, soft_f1, LineMetric, MetricReport, SoftF1};
