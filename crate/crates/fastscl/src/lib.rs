//! Polar-code encoding and fast list decoding of high-rate special nodes.
//!
//! The crate bundles:
//! - CRC-aided code construction via the Gaussian approximation,
//! - conventional CA-SCL decoding,
//! - node-level fast list decoders (R0, REP, R1, SPC, SR0/REP, SR1/SPC)
//!   in sequential (FSL) and parallelized (FPL) variants,
//! - offline generation of minimum-combination sets (MCS) and
//!   flip-coordinate sets (FCS),
//! - a time-step latency model for the supported decoder families,
//! - a BPSK/AWGN Monte Carlo harness with paired A/B runs.

pub mod construction;
pub mod kernel;
pub mod latency;
pub mod mcs;
pub mod nodes;
pub mod scl;
pub mod sim;
pub mod sr1spc;
pub mod tree;

pub use construction::{CodeSpec, Crc, ReliabilitySequence};
pub use scl::{DecodeConfig, DecoderVariant, ListDecoder, NodeParent, PmMode, SpanOutput};
