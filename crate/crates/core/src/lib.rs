//! Stereo depth by minimum cuts over a volume of cross points.
//!
//! A rectified stereo pair is reparametrized by gaze lines (the sites) and
//! depth numbers along them (the labels). Every cross point of a left and a
//! right pixel ray carries a photo-consistency cost, neighboring gaze lines
//! pay a convex penalty for depth changes, and the minimum of the resulting
//! energy is found exactly with one max-flow computation, or approximately
//! by a coarse-to-fine hierarchy.

pub mod energy;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod graphcut;
pub mod hierarchy;
pub mod imaging;
pub mod selftest;
pub mod synth;

pub use error::{Error, Result};
