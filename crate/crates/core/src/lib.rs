//! Dynamic multiobjective optimization with a training-free diffusion
//! response: when the environment changes, per-subspace knee points are
//! extrapolated and a closed-form denoiser pulls the previous front toward
//! them before MOEA/D resumes.
//!
//! The crate also carries the DF1–DF14 benchmark suite, IGD/HV metrics with a
//! rank-sum comparison, and the experiment runner behind the `ddmoea` binary.

pub mod ddm;
pub mod dominance;
pub mod error;
pub mod knee;
pub mod metrics;
pub mod moead;
pub mod population;
pub mod problems;
pub mod random;
pub mod response;
pub mod runner;
