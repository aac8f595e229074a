//! Numerical tolerances shared across the toolkit.

/// Constraint satisfaction for simplex solutions.
pub const LP_FEASIBILITY: f64 = 1e-9;

/// Smallest tableau entry accepted as a pivot.
pub const LP_PIVOT: f64 = 1e-12;

/// Reduced costs above `-LP_REDUCED_COST` are treated as nonnegative.
pub const LP_REDUCED_COST: f64 = 1e-11;

/// Weight vectors must sum to one within this slack.
pub const WEIGHT_SUM: f64 = 1e-9;

/// Agreement between a BWM solution and the grid-search oracle.
pub const ORACLE_MATCH: f64 = 1e-3;

/// Decimal places used when printing weights and validity indices.
pub const REPORT_DECIMALS: usize = 3;
