//! Quantum-assisted linear cryptanalysis workbench for the SIMON cipher family.
//!
//! The crate has two halves that meet in the middle:
//!
//! * a dense statevector simulator ([`qsim`]) plus circuit builders for the
//!   CHSH game ([`chsh`]) and for SIMON's single-bit round update with and
//!   without an entangled key/state resource ([`qlinapprox`]);
//! * the classical cipher itself ([`simon`]) together with statistical
//!   machinery for measuring linear-approximation bias, recovering key bits
//!   and composing biases across rounds ([`analysis`]).
//!
//! The headline quantity throughout is the probability that the one-round
//! linear statistic `L_i(j) XOR L_{i+1}(j)` equals zero. Classically this is
//! 3/4 under the usual constraints; replacing the key/state bits with a Bell
//! pair measured CHSH-style lifts it to cos^2(pi/8) ~ 0.8536.

pub mod analysis;
pub mod chsh;
pub mod qlinapprox;
pub mod qsim;
pub mod simon;
