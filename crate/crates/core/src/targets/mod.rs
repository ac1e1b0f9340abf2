//! Target densities, dataset loading and synthetic series.

mod ar1;
mod dataset;
mod discrete;
mod gaussian;
mod logistic;
mod mog2;

pub use ar1::ar1_generate;
pub use dataset::{load_dataset, synthetic_dataset, write_dataset_csv, Dataset, KnownDataset};
pub use discrete::{GridTarget, TableTarget};
pub use gaussian::{Bivariate, DiagNormal, Exponential, StdNormal, Uniform01};
pub use logistic::LogisticPosterior;
pub use mog2::Mog2;
