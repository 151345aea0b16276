//! Steady compactly supported solutions of the compressible Euler equations.
//!
//! The construction starts from a two-dimensional incompressible vortex with
//! compactly supported velocity and radial pressure (or from an externally
//! sampled three-dimensional seed field), and reprofiles density, entropy and
//! velocity as functions of the seed pressure so that the resulting state is
//! an exact steady solution of the full compressible system with prescribed
//! far-field density and entropy.
//!
//! Module map:
//!
//! * [`smoothfn`] — flat-tailed smooth profiles (bumps, steps, ramps) with
//!   analytic derivatives, plus adaptive quadrature.
//! * [`eos`] — the polytropic pressure law and its partial derivatives.
//! * [`seed2d`] — the Rankine-vortex base solution and its non-homogeneous
//!   incompressible variant.
//! * [`seed3d`] — ingestion of sampled 3D seed fields (CSV / legacy VTK).
//! * [`lift`] — reprofiling of a base solution into a compressible steady
//!   state, in both construction directions.
//! * [`verify`] — residual, virial, far-field and pressure-deficit checks.
//! * [`evolve`] — a finite-volume solver used as an independent
//!   stationarity check.
//!
//! All field math is generic over the scalar type through [`Real`]; the
//! `*64` aliases below pin the common double-precision instantiations.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

pub mod eos;
mod error;
pub mod evolve;
mod fields;
pub mod lift;
pub mod seed2d;
pub mod seed3d;
pub mod smoothfn;
pub mod verify;

pub use error::{Error, Result};
pub use fields::{AnalyticState, BaseFlow, ConstantState, FarField, FlowField, StatePoint};

/// Scalar type of all field math: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Conversion from an `f64` literal.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("literal not representable in scalar type")
    }

    /// Lossy view as `f64`, for diagnostics and error payloads.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

pub type Profile64 = smoothfn::SmoothProfile<f64>;
pub type Eos64 = eos::EosParams<f64>;
pub type Vortex64 = seed2d::VortexSpec<f64>;
pub type Rankine64 = seed2d::RankineSolution<f64>;
pub type Inhomogeneous64 = seed2d::InhomogeneousSolution2D<f64>;
pub type Seed3d64 = seed3d::SeedField3<f64>;
pub type Ramps64 = lift::RampPair<f64>;
pub type Lifted2d64 = lift::LiftedSolution<f64, 2>;
pub type Lifted3d64 = lift::LiftedSolution<f64, 3>;
pub type Grid64 = verify::Grid2D<f64>;

pub type Profile32 = smoothfn::SmoothProfile<f32>;
pub type Eos32 = eos::EosParams<f32>;
