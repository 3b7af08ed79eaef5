//! Classical propagation in the fiber: a frequency-ladder coupled-mode
//! solver with pump depletion for gain and saturation work, and a scalar
//! split-step pulse propagator for chirp, TBP and spectra.

pub mod ladder;
pub mod ode;
pub mod splitstep;

pub use ladder::{
    coupled_mode_propagate, phase_mismatch, seeded_gain, sideband_ratios,
    undepleted_matched_gain, GainPoint, LadderError, LadderOptions, ModeLadder, PulseAveraging,
    SidebandTable, PROBE_SEED_W,
};
pub use ode::{OdeError, OdeOptions};
pub use splitstep::{
    extract_band, split_step_core, split_step_propagate, DispersionCoeffs, SplitStepError,
    StepControl,
};
