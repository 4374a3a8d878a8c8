//! Concrete systems: linear and Duffing oscillators, a constrained two-mass
//! validation fixture and a slider-crank with a lumped flexible connecting rod.

mod director;
mod oscillator;
mod slider_crank;
mod two_mass;

pub use director::{director_encode, Director};
pub use oscillator::{make_oscillator, Oscillator, OscillatorParams};
pub use slider_crank::{
    make_slider_crank_lumped, rigid_slider_position, SliderCrank, SliderCrankInput, SliderCrankParams,
};
pub use two_mass::{make_two_mass_constrained, TwoMassConstrained};

use crate::dynamics::SystemModel;
use crate::error::{Error, Result};

/// Names accepted by [`model_by_name`].
pub const SYSTEM_NAMES: [&str; 4] = ["linear_oscillator", "duffing", "two_mass_constrained", "slider_crank_lumped"];

pub fn model_by_name(name: &str) -> Result<Box<dyn SystemModel>> {
    Ok(match name {
        "linear_oscillator" => Box::new(make_oscillator(OscillatorParams::linear())),
        "duffing" => Box::new(make_oscillator(OscillatorParams::duffing())),
        "two_mass_constrained" => Box::new(make_two_mass_constrained()),
        "slider_crank_lumped" => Box::new(make_slider_crank_lumped(SliderCrankParams::default())),
        other => {
            return Err(Error::config(
                "system",
                format!("unknown system `{other}`; expected one of {}", SYSTEM_NAMES.join(", ")),
            ))
        }
    })
}
