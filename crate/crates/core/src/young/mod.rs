//! Complementary Young functions.

mod general;
mod pair;
mod table;

pub use general::GeneralYoungPair;
pub use pair::{build_young_pair, Bridge, YoungPair, YoungTables, NODES_PER_DECADE, TABLE_MAX, TABLE_MIN, T_SMALL};
pub use table::LogLogTable;
