//! Sliding-window surrogate networks for damped mechanical and multibody
//! systems.
//!
//! The crate covers the whole pipeline: simulate ground-truth responses
//! ([`dynamics`], [`models`]), estimate how long initial conditions take to
//! decay ([`linearization`]), train dense feedforward surrogates and error
//! estimators ([`nn`], [`engine`]), persist datasets and models ([`io`]) and
//! measure the speedup over time integration ([`bench`]).

pub mod bench;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod io;
pub mod linearization;
pub mod models;
pub mod nn;
pub mod pipeline;

pub use error::{Error, Result};
