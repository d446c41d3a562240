//! Curvature-invariant engine for hyperkähler-type symplectic tensors.
//!
//! The crate has two halves:
//!
//! * a dense complex tensor-contraction engine that evaluates graph-encoded
//!   invariants (the theta family and the cubic invariant) of random
//!   curvature tensors, together with a brute-force oracle and a seeded,
//!   reproducible Monte Carlo sign-experiment harness;
//! * an exact rational calculator for the closed-form relations among
//!   Rozansky-Witten invariants, Chern numbers, Hodge numbers, and Betti
//!   numbers of hyperkähler manifolds up to complex dimension eight,
//!   including the derived Betti-number bounds.
//!
//! ```ignore
//! use rwinv::tensor::{Dimension, SymplecticForm, random_curvature};
//! use rwinv::contraction::eval_theta;
//!
//! let dim = Dimension::new(2);
//! let omega = random_curvature(dim, 42, 1.0);
//! let eps = SymplecticForm::standard(dim);
//! let theta = eval_theta(&omega, &eps).unwrap();
//! assert!(theta.real() > 0.0); // the theta invariant is a squared norm
//! ```

pub mod tensor;

pub mod tolerances;
