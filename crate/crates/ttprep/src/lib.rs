//! Tensor-train state preparation.
//!
//! This crate learns a tensor-train (TT) representation of a discretized
//! probability distribution from black-box density evaluations, compiles the
//! train into a staircase of multi-qubit unitaries that prepare the
//! corresponding amplitude-encoded quantum state, and verifies the result with
//! an exact statevector simulator plus a small metric suite.
//!
//! The crate is `no_std` (with `alloc`); everything that touches files,
//! clocks, or a terminal lives in the companion CLI crate.
//!
//! Pipeline at a glance:
//!
//! 1. [`quantize`] — place a density on a `2^q` grid per variable, choose a
//!    qubit ordering, and expose the amplitude function `√p`.
//! 2. [`cross`] — learn a [`tensor::TensorTrain`] of those amplitudes by cross
//!    interpolation with maxvol pivoting.
//! 3. [`tensor`] — round the train and pad bond ranks to powers of two.
//! 4. [`circuit`] — map cores to unitary gates (one gate per qubit), merge
//!    nested gates, or build a Grover-Rudolph baseline for comparison.
//! 5. [`sim`] / [`metrics`] — simulate the plan and score it (KS, KL,
//!    fidelity) against the exact discrete target.
//!
//! Bit conventions are pinned once in [`bits`]: qubit 1 carries the most
//! significant bit of a basis index, and TT core `k` corresponds to qubit `k`.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod bits;
pub mod circuit;
pub mod cross;
pub mod metrics;
pub mod quantize;
pub mod sim;
pub mod tensor;

mod linalg;

pub use tensor::{DenseTensor, TTCore, TensorTrain};

// The linear-algebra and complex types these modules traffic in.
pub use nalgebra;
pub use num_complex;
