//! Angle and angular-momentum uncertainty on the circle.
//!
//! States live in the angular-momentum basis ([`state`]); [`moments`] turns
//! them into the moments of `E = e^{-i phi}` and `L`; [`bounds`] evaluates the
//! circular-variance bound and the invariant (`V^2`) and frame-optimized
//! (`U^2`) performances. [`catalog`] builds von Mises, cat and related states,
//! and [`ladder`] handles the weighted ladder operator `X`.

pub mod bounds;
pub mod catalog;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod ladder;
pub mod moments;
pub mod special_fn;
pub mod state;

pub use bounds::{full_report, BoundsReport, SaturationFlags};
pub use catalog::VonMisesParams;
pub use error::{Error, Result};
pub use moments::{AngularMoments, CovarianceMatrix};
pub use state::{AngularGrid, CircleState, StateFile};
