mod linear;
mod step;

pub use linear::{check_spectral_conditions, LinearOnSteps, SpectralVerdict};
pub use step::{StepFunction, Term};
