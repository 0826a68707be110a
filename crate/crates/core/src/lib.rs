//! Exact boundary-slope computation for length-3 Montesinos knots.
//!
//! The library walks the Hatcher–Oertel machinery end to end: it enumerates
//! allowable edgepath systems in the planar diagram, solves the gluing
//! constraint exactly, computes Euler characteristics, Euler numbers, twists,
//! and boundary slopes of the associated candidate surfaces, and applies the
//! Euler-number criterion to isolate the candidate surfaces whose capped-off
//! form is a torus. On top of that sit the classifier (the thirteen-case
//! table of toroidal solutions), an incompressibility filter, and a census
//! driver.
//!
//! All arithmetic is exact ([`rational::Rational`] over checked `i128`).

pub mod classifier;
pub mod diagram;
pub mod edgepath;
pub mod error;
pub mod invariants;
pub mod knot;
pub mod rational;
pub mod slope;
pub mod solver;

pub use error::{Error, Result};
pub use rational::{rat, Rational};
