//! Tripartite entanglement and Svetlichny non-locality of three-qubit states
//! when one qubit is seen by a uniformly accelerated observer.
//!
//! Qubits are ordered `A, B, C` and `|abc>` sits at index `4a + 2b + c`.

pub mod analysis;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod optimize;
pub mod states;
pub mod svetlichny;
pub mod unruh;

pub use entanglement::{
    convex_roof_min, hyperdeterminant, negativity, pi_tangle, pi_tangle_closed,
    three_tangle_pure, three_tangle_rank2_closed, Bipartition, ConvexRoofOptions,
    Rank2Decomposition,
};
pub use error::{Error, Result};
pub use states::{DensityMatrix3, Family, PureState3};
pub use svetlichny::{
    s_max_closed, s_max_numeric, s_max_vs_tangle, MeasurementSettings, SmaxOptions, SmaxResult,
    CLASSICAL_BOUND, VIOLATION_TOL,
};
pub use unruh::{apply_fermionic_unruh, r_from_acceleration, Acceleration, AccelParam, Party};
