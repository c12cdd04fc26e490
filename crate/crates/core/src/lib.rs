//! Symmetric tensors of spin-j states and certification of classicality.
//!
//! A spin-j state with `N = 2j` is represented by an order-`N` real
//! symmetric tensor of dimension 4. The state is classical (a finite mixture
//! of spin coherent states) exactly when that tensor is a positive
//! combination of `(1, nhat)^{(x) N}` with unit `nhat`. This crate provides
//! the tensor algebra ([`symtensor`]), the map between density matrices and
//! tensors ([`spinmap`]), numerical cone-membership tests ([`certify`]) and
//! brute-force references ([`oracle`]).
//!
//! The crate is `no_std` with `alloc` when built without the `std` feature.

#![cfg_attr(not(feature = "std"), no_std)]
extern crate alloc;

pub mod certify;
pub mod error;
pub mod multiset;
pub mod oracle;
pub mod sample;
pub mod sphere;
pub mod spinmap;
pub mod symtensor;

pub use certify::{
    check_odd_regular, classify, dual_pair_sample, min_z_eig, regular_decompose, restricted_min,
    sos_check, SolverConfig, Status, Verdict,
};
pub use error::{Error, Result};
pub use multiset::MultiIndex;
pub use spinmap::{
    coherent_tensor, density_to_tensor, tensor_to_density, CoherentLabel, ComplexMatrix,
    DensityMatrix, SFrame,
};
pub use symtensor::{RegularVector, SymTensor};
