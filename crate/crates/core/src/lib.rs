//! Engine for a three-stage tip-of-the-tongue (TOT) retrieval model.
//!
//! Each word is a node of three auto-associative two-layer networks
//! (semantic, lexical, phonological) over bipolar spike patterns. A
//! recall episode selects a node from semantic input, drives each
//! component network with free or cued random probes, and stops when the
//! network output matches the metamemory reference.
//!
//! The crate is `no_std` (it needs `alloc`). All randomness comes from
//! explicitly passed seeded streams; see [`stream`].
#![no_std]

extern crate alloc;

pub mod assocnet;
pub mod error;
pub mod lexicon;
pub mod oracle;
pub mod pattern;
pub mod recall;
pub mod scenario;
pub mod stream;

pub use assocnet::ComponentNetwork;
pub use error::{Error, FieldError, FieldErrors, Result};
pub use lexicon::{Component, Lexicon, PrimingState, Selection, WordNode};
pub use oracle::{exact_success_prob, Probability};
pub use pattern::{BipolarPattern, SlotMap};
pub use recall::{Classification, ComponentOutcome, RecallOutcome, RecallParams};
pub use scenario::{ScenarioConfig, TrialRecord};

/// Number of units selected by a fraction of `n`, i.e. `⌊fraction·n⌋`.
///
/// A tolerance of 1e-9 absorbs representation error so that, e.g.,
/// `q = 1/3` at `n = 9` yields 3 rather than 2.
pub fn fraction_count(fraction: f64, n: usize) -> usize {
    let raw = fraction * n as f64 + 1e-9;
    if raw <= 0.0 {
        0
    } else {
        (raw as usize).min(n)
    }
}
