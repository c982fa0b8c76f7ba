//! Random binary linear codes over GF(2), typicality decoders, and capacity
//! computations for two-sender binary multiple-access channels.
//!
//! The crate is organized bottom-up:
//!
//! * [`gf2`]: bit-packed linear algebra (the single row-reduction kernel).
//! * [`info`]: entropies, log-probabilities, and typical-set machinery.
//! * [`channel`]: binary channel models and their simulation.
//! * [`point`]: point-to-point source, channel, and joint source-channel codes.
//! * [`capacity`]: sum-capacity formulas and maximizers for dependent-input
//!   multiple-access channels.
//! * [`sysmac`]: deterministic systematic constructions for the binary
//!   adder-style multiple-access channel and exact-rational region checks.
//! * [`mac`]: random-code multiple-access experiments (Slepian-Wolf, channel,
//!   joint source-channel).
//! * [`bcast`]: degraded broadcast channel experiments.
//! * [`network`]: small canned network configurations comparing separated and
//!   joint designs.
//! * [`experiment`]: trial runners, seeding, and CSV emission shared by the
//!   command-line tool.

pub mod bcast;
pub mod capacity;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod gf2;
pub mod info;
pub mod mac;
pub mod network;
pub mod point;
pub mod sysmac;

pub use error::{DecodeFailure, Error};
