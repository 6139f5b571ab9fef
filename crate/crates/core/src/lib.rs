//! Shared longitudinal control between a human driver and an assistance
//! controller: driver-state estimation from facial landmarks, a
//! reaction-time-delayed car-following model, sliding-mode gap controllers
//! and a closed-loop simulator.

pub mod authority;
pub mod config;
pub mod controllers;
pub mod driver_state;
pub mod error;
pub mod history;
pub mod sim;
pub mod vehicle;

pub use error::{Error, Result};
