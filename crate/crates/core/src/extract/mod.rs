//! Numerical asymptotics of sequence data: growth-rate estimation,
//! Cesàro averaging on the circle `|λ| = r`, least-squares fits against
//! Nilsson models, residual-ladder checks and a Gevrey-1 diagnostic.

mod average;
mod check;
mod data;
mod fit;
mod gevrey;
mod growth;

pub use average::{average_extract, AverageResult, CIRCLE_TOLERANCE};
pub use check::{check_expansion, CheckReport, CheckRow};
pub use data::SequenceData;
pub use fit::{
    condition_limit, fit_coefficients, fit_model_from_value, fit_to_expansion, FitModel,
    FitMonomial, FitResult,
};
pub use gevrey::{gevrey_diagnostic, GevreyReport};
pub use growth::{estimate_growth, GrowthEstimate, Trend, TREND_TOLERANCE};
