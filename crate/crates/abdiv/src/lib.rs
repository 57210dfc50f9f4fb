//! # abdiv
//!
//! Standard-library companion to [`abdiv_core`]:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`datasets`] | CSV loader, bundled cats table, feature-to-density conversion, synthetic two-class histograms |
//! | [`imageio`] | binary PPM (P6) and PNG rasters |
//! | [`report`] | `key=value` records and aligned text tables |
//! | [`bench`](mod@bench) | split / cross-validate / test harness over divergence kernels |
//! | [`cli`] | the `abdiv` command line |

pub mod bench;
pub mod cli;
pub mod datasets;
mod error;
pub mod imageio;
pub mod report;

pub use error::{DataError, ImageError, Result};
