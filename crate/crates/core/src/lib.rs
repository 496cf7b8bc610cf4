//! Traveling-wave construction and verification for the Fisher-KPP equation
//! with repulsive chemotaxis, together with its porous-medium and hyperbolic
//! limits.
//!
//! The library is organized around three model problems posed in the moving
//! frame on the real line:
//!
//! * **TW** — the scaled chemotaxis system
//!   `−c u_x − (1/|χ|) u_xx = (u v_x)_x + u(1−u)`, `−ν v_xx = u − v`,
//!   solved on slabs `[−L, L]` with far-field data `u(−∞)=1`, `u(+∞)=0`
//!   ([`slab`], [`speed`]);
//! * **PME** — the porous-medium FKPP equation
//!   `−c u_x − (u u_x)_x = ε u_xx + u(1−u)` with its explicit minimal-speed
//!   formulas and the sharp wave `(1 − e^{x/√2})₊` ([`pme`]);
//! * **HYP** — the hyperbolic FKPP/Keller-Segel model whose waves carry a
//!   single jump discontinuity ([`hyperbolic`]).
//!
//! The screened-Poisson coupling `v = K_ν ∗ ū` with
//! `K_ν(x) = (1/(2√ν)) e^{−|x|/√ν}` is implemented in [`kernel`] with
//! closed-form far-field tails, and every quantitative identity the solvers
//! are expected to satisfy (energy identity, oscillation decay, exponential
//! decay, structural monotonicity, Hölder/L² bounds) lives in
//! [`diagnostics`] as a named check.
//!
//! The crate is `no_std` + `alloc`: all numerics run on plain `Vec<f64>`
//! with float transcendentals supplied by `num_traits`. File formats, the
//! CLI, and parallel sweep drivers live in the companion `ctwave` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

mod banded;
pub mod bessel;
pub mod diagnostics;
pub mod grid;
pub mod hyperbolic;
pub mod kernel;
pub mod ode;
pub mod pme;
pub mod slab;
pub mod speed;
mod tridiag;

pub use grid::{Field, GridError, UniformGrid};
