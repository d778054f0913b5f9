//! # ddtkit
//!
//! Numerical tools for the delay Doppler transform (DDT): a windowed
//! transform whose kernel e^{-j W tau t} is bilinear in the delay variable
//! and the output time, unlike the STFT's e^{-j W tau}. The crate provides
//!
//! - the transform in general-law, linear-rate grid, and constant-law forms,
//! - the STFT baseline over the same product grid,
//! - an inverse at zero rate by Tikhonov-regularized deconvolution,
//! - a delay-Doppler channel simulator (discrete taps or a continuous
//!   separable response) with seeded, order-independent AWGN,
//! - pulse-train models and identity diagnostics,
//! - CSV/PGM export and a figure-regeneration pipeline.
//!
//! All integrals are Riemann sums over the input signal's grid with weight
//! equal to the grid step, and signals are exactly zero outside their grids;
//! this makes the transform identities hold to floating-point accuracy
//! rather than only asymptotically.
//!
//! ```
//! use ddtkit::{make_grid, synthesize, ddt_map, stft_map, map_distance,
//!              SignalExpr, WindowSpec};
//!
//! let grid = make_grid(-10.0, 20.0 / 64.0, 64).unwrap();
//! let s1 = synthesize(&SignalExpr::LinearChirp { alpha: 1.0 }, &grid).unwrap();
//! let g = WindowSpec::Gaussian { a: 1.0 };
//! let axis = make_grid(-5.0, 10.0 / 32.0, 32).unwrap();
//!
//! let ddt = ddt_map(&s1, &g, &axis, &axis).unwrap();
//! let stft = stft_map(&s1, &g, &axis, &axis).unwrap();
//! // the two representations of the same chirp differ substantially
//! assert!(map_distance(&ddt, &stft).unwrap() > 0.1);
//! ```

pub mod channel;
pub mod doppler;
pub mod error;
pub mod export;
pub mod figures;
pub mod grid;
pub mod inverse;
pub mod signal;
pub mod transforms;
pub mod window;

pub use channel::{
    apply_channel, dechirp, ddt_pulse_train_sum, ddt_receive_model, pulse_train,
    read_channel_json, received_pulse_train_model, verify_channel_identity, ChannelOutput,
    ChannelSpec, NoiseSpec, PulseTrainSpec, RoundedTap, Tap,
};
pub use doppler::{eval_doppler, DopplerLaw};
pub use error::{DdtError, Result};
pub use export::{export_map_csv, export_map_pgm, fmt_g17, parse_map_csv};
pub use figures::{run_figures, FigureConfig, FigureSignal, MapFormat, RunManifest};
pub use grid::{make_grid, TimeGrid};
pub use inverse::{inverse_ddt, DeconvOptions};
pub use signal::{read_signal_csv, synthesize, write_signal_csv, ComplexSignal, SignalExpr};
pub use transforms::{
    convolve, ddt_constant, ddt_general, ddt_map, map_distance, stft_map, verify_shift_identity,
    MapKind, TFMap,
};
pub use window::{eval_window, WindowSpec};
