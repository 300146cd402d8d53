//! Word error rate and undetected error rate bounds for a bounded-distance
//! decoder on the AWGN channel, together with an exact Monte Carlo simulator
//! of the same decoder for codes small enough to enumerate.
//!
//! The numeric core ([`specfun`], [`bounds`]) is generic over [`Real`]; the
//! aliases below fix the scalar to `f64` (the default everywhere in the CLI)
//! or `f32`.
//!
//! ```
//! use bdbound::{bounds, code, ChannelParams64};
//!
//! let hamming = code::builtin_extended_hamming_8_4();
//! let ch = ChannelParams64::new(6.7, hamming.rate(), hamming.n()).unwrap();
//! let ml = bounds::ml_union_bound(&ch, hamming.weight_enumerator());
//! assert!((ml - 1.07e-4).abs() < 0.01e-4);
//! ```

pub mod bounds;
pub mod cli;
pub mod code;
pub mod codefile;
pub mod scalar;
pub mod sim;
pub mod specfun;

pub use bounds::{BoundsError, BoundsRow, ChannelParams};
pub use code::{Code, CodeError, GeneratorMatrix, LinearCode, WeightEnumerator};
pub use scalar::Real;
pub use sim::{SimConfig, SimError, SimResult};
pub use specfun::{QuadError, QuadratureSpec, SpecError};

pub type ChannelParams64 = ChannelParams<f64>;
pub type BoundsRow64 = BoundsRow<f64>;
pub type QuadratureSpec64 = QuadratureSpec<f64>;

pub type ChannelParams32 = ChannelParams<f32>;
pub type BoundsRow32 = BoundsRow<f32>;
pub type QuadratureSpec32 = QuadratureSpec<f32>;
