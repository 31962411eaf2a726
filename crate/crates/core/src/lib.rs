//! Exact combinatorics of fringed gentle quivers: routes and bands, the
//! flow algorithm, turbulence polyhedra, g-polyhedra and framed graphs.

pub mod complexes;
pub mod dag_bridge;
pub mod error;
pub mod fixtures;
pub mod flows;
pub mod io;
pub mod par;
pub mod polyhedra;
pub mod quiver;
pub mod rational;
pub mod trails;

pub use error::{Error, Result};
pub use flows::{ArrowFlow, BundleCombination, Flow};
pub use quiver::{Arrow, FringedQuiver, GentleQuiver, Pairing, Sa};
pub use rational::Q;
pub use trails::{MarkedTrail, Trail};
