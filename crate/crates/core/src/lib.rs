//! Deterministic two-tank SCADA plant simulator for intrusion-detection research.
//!
//! `pumphouse` models a small industrial water process — two containers, a
//! centrifugal pump and a drain valve under PLC threshold control — together
//! with the polling network that supervises it. A scenario run produces a
//! complete, labeled dataset: bit-exact packet captures of the read/write
//! protocol traffic, physically plausible side-channel signals (pump audio,
//! flow, temperature) and per-packet ground-truth labels.
//!
//! Attacks are injected two ways:
//!
//! * **synthetic** — a finished capture is rewritten post hoc (value zeroing,
//!   signal time dilation), touching nothing but the targeted value fields
//!   and checksums;
//! * **behavioral** — the simulated PLC itself misbehaves live (scan sweeps,
//!   command inversion, forged report templates, forced actuation) while the
//!   physics keeps telling the truth.
//!
//! The crate is a library first; the `pumphouse` binary in this workspace
//! wraps it in `generate` / `inject` / `detect` / `verify` subcommands. Three
//! preset scenarios (`ds1`, `ds2`, `ds3`) cover the common cases. Everything
//! is driven by a single seeded RNG stream, so a given config and seed always
//! reproduce byte-identical files.

pub mod attack;
pub mod detect;
pub mod net;
pub mod plc;
pub mod process;
pub mod protocol;
pub mod scenario;
pub mod sidechannel;

mod guide;

// pub use attack re-export pending
pub use plc::{ControlParams, Firmware, Plc, PlcImage};
pub use process::{ProcessParams, ProcessState, SensorReadings};
pub use protocol::{Frame, NodeId, NodeValue, Service};
// pub use scenario re-export pending
