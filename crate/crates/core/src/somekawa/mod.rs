//! Truncated presentations of Somekawa K-groups `K(k; G_1, ..., G_r)` over a
//! finite field: generators are symbols over extensions of degree at most
//! `d`, relations are the projection formula (R1) and the function-field
//! relations (R2) from a bounded family of curves and functions.

mod bloch;
mod build;
mod config;
mod cycles;
mod independent;
mod lattice;
mod relations;

pub use bloch::{bloch_v_approx, BlochComparison, BlochReport, BlochV, Stabilization};
pub use build::{BuildStats, CollapseReport, SomekawaApprox, SourceStats, SymbolTerm};
pub use config::{ChoiceStrategy, ConfigFile, Enumeration, TruncationConfig, DEFAULT_SEED};
pub use cycles::{
    cycle_round_trip, cycle_symbol, phi_homotopy_check, random_homotopy_shapes, CurvePoint, CycleRoundTrip, FiberPoint,
    HomotopyReport, HomotopyShape, SecondMap,
};
pub use relations::{RejectReason, Rejection, RelationKind, RelationRow};
