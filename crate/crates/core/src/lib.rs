//! Meta-learning experiment repository: ARFF datasets, dataset and instance
//! meta-features, simple landmark learners, and a versioned results store
//! with ARFF exports.

pub mod arff;
pub mod error;
pub mod export;
pub mod hardness;
pub mod ingest;
pub mod learners;
pub mod metafeatures;
pub mod model;
pub mod runner;
pub mod store;

pub use error::{Error, Result};
