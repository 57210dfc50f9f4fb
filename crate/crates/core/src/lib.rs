//! # abdiv-core
//!
//! Alpha-Beta divergences on the positive half-line, their symmetrized
//! (ABS) and one-parameter (`d_t`) Hilbertian relatives, and everything
//! needed to use them as kernels on discrete probability measures:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`divergence`] | scalar AB / ABS / `d_t` divergences with explicit branch handling |
//! | [`measure`] | densities with a dominating measure, lifted divergences, named table rows |
//! | [`kernel`] | pd kernels (zero-measure origin, Gaussian transform), Gram matrices, spectral pd/cpd checks |
//! | [`svm`] | soft-margin SVM on precomputed Gram matrices (SMO), splits and grid cross-validation |
//! | [`segmentation`] | neighbour-divergence thresholding of RGB rasters |
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! dataset loaders live in the `abdiv` companion crate.
//!
//! ```
//! use abdiv_core::divergence::{abs_divergence, ParameterPair};
//!
//! let euclid = ParameterPair::new(1.0, 1.0).unwrap();
//! assert_eq!(abs_divergence(euclid, 2.0, 1.0).unwrap(), 1.0);
//! ```
#![no_std]

extern crate alloc;

pub mod divergence;
mod error;
pub mod kernel;
pub mod linalg;
mod math;
pub mod measure;
pub mod sampling;
pub mod segmentation;
pub mod svm;

pub use divergence::{DivergenceBranch, DivergenceSpec, EvalConfig, ParameterPair, SkewPairForm};
pub use error::{Error, Result};
pub use kernel::{GramMatrix, KernelMode, KernelSpec, SpectrumReport, Verdict};
pub use measure::{DiscreteDensity, NamedDivergence};
pub use svm::{Label, LabeledDataset, SvmModel};
