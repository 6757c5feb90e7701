//! Exact experiments with ideals on the natural numbers.
//!
//! The toolkit has three layers:
//!
//! * [`natsets`] — a closed algebra of decidable subsets of ω and ω² with an
//!   eventually-periodic normal form, exact statistics, and sound
//!   subset/disjointness provers;
//! * ideal decision procedures over that algebra, returning
//!   in / positive / unknown verdicts with replayable traces;
//! * tree-indexed set schemes and lazy 0/1-sequence realizers whose
//!   ideal-limit-point sets hit prescribed targets, checkable to any finite
//!   depth and horizon.
//!
//! Everything is deterministic: same inputs, same bytes out.

pub mod util;
pub mod words;
pub mod natsets;
pub mod ideals;
pub mod cantor;
