//! Farey subgraphs `F_N`, their well directed paths, and `F_N`-continued fractions.
//!
//! All arithmetic is exact: big integers, rationals, and quadratic surds.

pub mod arith;
pub mod cf;
pub mod checks;
pub mod diagram;
pub mod enumerate;
pub mod error;
pub mod expand;
pub mod graph;
pub mod path;

pub use arith::{ExtendedRational, FormalFraction, Real};
pub use cf::{CfExpansion, Condition, Convergents, Term, Violation};
pub use enumerate::{brute_force_paths, count_cross_check, enumerate_expansions, Enumerator, ExpansionSet};
pub use error::{Error, Result};
pub use expand::{choose_gate, expand_dyadic, expand_rational, expand_real, CfStream, ExpanderState, RealExpansion};
pub use graph::{Edge, Mobius, Modulus, Vertex};
pub use path::{EdgeClass, Path};
