//! Exact minimum broadcast (connected dominating set containing a source)
//! on unit-disk graphs restricted to strips, plus a planar two-hop solver
//! and a brute-force oracle.

pub mod error;
pub mod geom;
pub mod hopdp;
pub mod io;
pub mod model;
pub mod narrow;
pub mod oracle;
pub mod twohop;
pub mod wide;

pub use error::{BroadcastError, Result};
pub use model::{
    build_graph, compute_levels, core_region, validate_broadcast, BroadcastSet, LevelPartition,
    Point, Side, StripInstance, UnitDiskGraph, ValidationReport, NARROW_LIMIT,
};
pub use hopdp::{solve_hop, HopConfig};
pub use narrow::{solve_narrow, solve_narrow_detailed};
pub use wide::{solve_wide, solve_wide_cds, WideConfig};
pub use oracle::{brute_min_broadcast, brute_min_cds, OracleConfig};
