pub mod arith;
pub mod factor;
pub mod format;
pub mod fuchs;
pub mod laurent;
pub mod linalg;
pub mod minkowski;
pub mod pf;
pub mod polytope;
pub mod quantum;
pub mod upoly;
