//! Grid-based numerical laboratory for convex variational problems with a
//! convexity constraint, and for their approximation by a second boundary
//! value problem of fourth-order Abreu type.
//!
//! The crate provides two independent solution routes for the same
//! minimization problem on a planar domain pair `Ω₀ ⊂⊂ Ω`:
//!
//! * [`direct`] — a direct discrete minimizer over the cone of grid-convex
//!   functions pinned to the boundary datum outside `Ω₀`;
//! * [`abreu`] — a continuation solver (in the parameter `ε`) for the coupled
//!   system `ε Uᵢⱼ wᵢⱼ = f_ε`, `w = (det D²u)^{θ−1}`, with `u = φ`, `w = ψ`
//!   on `∂Ω`, where `U` is the cofactor matrix of the Hessian of `u`.
//!
//! Supporting modules implement the discrete calculus ([`fields`]), domain
//! geometry with embedded-boundary stencils ([`geometry`], [`stencil`]),
//! discrete convexity and envelopes ([`convexity`]), the Lagrangian families
//! ([`lagrangian`]), the scalar functionals and diagnostics
//! ([`functionals`]), and the two second-order solvers the scheme is built
//! from ([`ma`]).
//!
//! The crate is `no_std` (with `alloc`); all file formats, configuration and
//! plotting live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod abreu;
pub mod band;
pub mod convexity;
pub mod direct;
pub mod fields;
pub mod functionals;
pub mod geometry;
pub mod lagrangian;
pub mod ma;
pub mod math;
pub mod rng;
pub mod stencil;
