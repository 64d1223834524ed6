//! Design tool for type-II quasi-phase-matched parametric down-conversion
//! in periodically poled KTP, operated at the point where the pump group
//! slowness matches the mean of the signal and idler group slownesses.
//!
//! At that operating point a broadband pump writes its bandwidth into the
//! *sum* frequency of the photon pair while the phase-matching function
//! confines the *difference* frequency, so the pair emerges coincident in
//! frequency rather than anti-correlated. The crate computes the operating
//! point from Sellmeier data ([`phasematch`]), builds the joint spectral
//! amplitude and its entanglement measures ([`jsa`]), predicts
//! Hong-Ou-Mandel interference for cw and pulsed pumping ([`hom`]), and
//! budgets gated detection rates ([`counts`]). The [`cli`] module exposes
//! all of it as a command-line tool.

// Validation guards are written `!(x > 0.0)` on purpose: the negation is
// false for NaN, so non-numbers are rejected along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod counts;
pub mod dispersion;
pub mod error;
pub mod hom;
pub mod jsa;
pub mod phasematch;
pub mod report;
