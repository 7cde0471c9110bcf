//! Simulation and evaluation toolkit for serial IMPLY-based approximate
//! full adders.
//!
//! * [`imply`]: FALSE/IMPLY step machine over binary memristor cells.
//! * [`adders`]: exact and approximate full adders, their step programs and
//!   truth tables.
//! * [`rca`]: partially approximated ripple-carry adders and a
//!   shift-and-add multiplier.
//! * [`metrics`]: exhaustive MED / NMED / MRED statistics.
//! * [`cost`]: energy, step and memristor-count model.
//! * [`image`]: image addition, grayscale conversion and Gaussian blur with
//!   PSNR / MSSIM scoring.
//! * [`mnist`]: quantized fully connected MNIST inference.

pub mod adders;
pub mod cost;
mod error;
pub mod image;
pub mod imply;
pub mod metrics;
pub mod mnist;
pub mod rca;

pub use adders::{AdderKind, FaOutcome};
pub use error::{Error, Result};
pub use imply::LogicLevel;
pub use rca::{MulConfig, RcaConfig};
