//! Granular-computing toolkit for tabular geomechanical data.
//!
//! The crate builds models in three layers:
//!
//! * **Granulation** — self-organizing maps ([`som`]) compress a data set
//!   into a small set of crisp granules (occupied neuron prototypes), and
//!   one-dimensional maps discretize single attributes into ordered levels.
//! * **Inference** — a Takagi–Sugeno fuzzy system ([`nfis`]) seeded by
//!   subtractive clustering and refined by hybrid least-squares/gradient
//!   training maps inputs to a numeric output, while rough-set rule
//!   induction ([`rst`]) extracts symbolic decision rules from discretized
//!   tables.
//! * **Balancing loops** — [`sonfis`] alternates granulation and fuzzy
//!   inference while growing or shrinking the map, and [`sorst`] couples
//!   granulation with rough rules over randomly sized maps, each selecting
//!   the structure that best trades accuracy against model size.
//!
//! [`data`] holds the decision-table type shared by everything else;
//! [`lattice`] evaluates trained models over regular grids and measures
//! field divergence.

pub mod config;
pub mod data;
pub mod error;
pub mod lattice;
pub mod nfis;
pub mod rst;
pub mod som;
pub mod sonfis;
pub mod sorst;

pub use error::{Error, Result};
