//! Simulation of a conventional two-qubit entanglement witness, the
//! time-shift detector attack that fakes its verdict, and the
//! measurement-device-independent entanglement witness (MDIEW) that is
//! immune to it.
//!
//! The crate is organised bottom-up:
//!
//! - [`qmat`]: dense complex matrices (tensor products, partial traces, eigenvalues).
//! - [`states`]: Pauli operators, Bell states, the dephased singlet family and ancillas.
//! - [`witness`]: the witness `W = I/2 - |Ψ⁻⟩⟨Ψ⁻|` and its Pauli-correlation form.
//! - [`detection`]: coincidence timing, suppression profiles and count sampling.
//! - [`mdiew`]: Bell-state-measurement probabilities, β coefficients and `J`.
//! - [`tomography`]: linear-inversion tomography, `v` fitting and the tangle.
//! - [`sampling`]: seeded generators and random state/POVM ensembles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detection;
pub mod mdiew;
pub mod qmat;
pub mod sampling;
pub mod states;
pub mod tomography;
pub mod witness;

mod error;

pub use error::{Error, Result};
pub use qmat::{ComplexMatrix, C64};
