//! Optimal controller and observer synthesis for continuous-time linear-quadratic-Gaussian
//! systems under an exponentially discounted cost `E ∫ e^{2αt} (xᵀQx + uᵀRu) dt`.
//!
//! - [`model`]: plant, initial belief and cost descriptions plus structural checks.
//! - [`solvers`]: Lyapunov and algebraic Riccati equation kernels.
//! - [`design`]: LQR, Kalman-Bucy, LQG gains and their analytic costs, discounted or not.
//! - [`oracle`]: exact expected cost of arbitrary gain pairs through the joint
//!   (state, estimation error) closed loop, used to check the designs.
//! - [`sim`]: Monte Carlo simulation of the closed loop.
//!
//! ```
//! use disc_lqg_core::{design, oracle, CostSpec, InitialBelief, LinearSystem};
//! use nalgebra::{dmatrix, dvector};
//!
//! let sys = LinearSystem::new(
//!     dmatrix![0.0], dmatrix![1.0], dmatrix![1.0], dmatrix![0.0], dmatrix![1.0], dmatrix![1.0],
//! )?;
//! let belief = InitialBelief::new(dvector![0.0], dmatrix![1.0])?;
//! let cost = CostSpec::new(dmatrix![1.0], dmatrix![1.0], -0.5)?;
//!
//! let d = design::lqg_discounted(&sys, &belief, &cost)?;
//! let gains = d.gains().unwrap();
//! let check = oracle::joint_cost(&sys, &belief, &cost, &gains)?;
//! assert!((check.total - 1.618034).abs() < 1e-6);
//! # Ok::<(), disc_lqg_core::LqgError>(())
//! ```

pub mod design;
pub mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod sim;
pub mod solvers;

pub use error::{LqgError, Result};
pub use model::{CostSpec, GainPair, InitialBelief, LinearSystem};
