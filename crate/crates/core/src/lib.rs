//! Elementary-cycle clocks: particles as periodic phenomena whose phases,
//! taken together, encode time.
//!
//! - [`constants`]: unit system and particle table.
//! - [`kinematics`]: four-momentum, four-periodicity, boosts, phase harmony.
//! - [`cycles`]: internal clocks, tick counting, helicity.
//! - [`relational_time`]: phase fingerprints, decoding, recurrences.
//! - [`modulation`]: retarded interaction events and regime detection.
//! - [`quantum`]: harmonic spectrum, winding/mode propagators, phase density.

pub mod constants;
pub mod cycles;
pub mod error;
pub mod kinematics;
pub mod modulation;
pub mod numerics;
pub mod quantum;
pub mod relational_time;

pub use error::{Error, Result};
