//! Exact solver for multi-parametric linear complementarity problems.
//!
//! Given a problem `w - Mz = q + Qθ`, `w, z ≥ 0`, `wᵀz = 0` with a sufficient
//! matrix `M` and a parameter `θ` ranging over `ℝ^d`, this crate enumerates
//! all full-dimensional critical regions, builds their adjacency graph, and
//! assembles the piecewise-affine solution map `θ ↦ (w, z)`. Degeneracy is
//! resolved by a symbolic lexicographic perturbation of the right-hand side;
//! the perturbed graph is post-processed back to the unperturbed problem.
//!
//! All arithmetic is exact rational; there is no floating point anywhere in
//! a decision path.

pub mod ratcore;

pub mod lpexact;

pub mod plcpmodel;

pub mod geomcore;

pub mod lexpert;

pub mod explorer;

pub mod frontends;
