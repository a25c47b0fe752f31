//! Global Lyapunov certificates for polynomial vector fields.
//!
//! Candidates are parametric polynomial templates. Before any solver runs,
//! necessary conditions for `V̇ <= 0` are turned into linear constraints on
//! the template parameters and eliminated exactly. Synthesis then goes
//! through an exists-forall SMT query or an LP-based CEGIS loop, and every
//! certificate is re-checked on exact rational coefficients.

pub mod cli;
pub mod instab;
pub mod lasalle;
pub mod lie;
pub mod poly;
pub mod rational;
pub mod smt;
pub mod symred;
pub mod synth;
pub mod system;
pub mod template;
pub mod verify;
