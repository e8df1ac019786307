pub mod error;
pub mod eval;
pub mod lattice;
pub mod lp;
pub mod model;
pub mod monotone;
pub mod optimize;
pub mod quad;
pub mod rat;
pub mod scenarios;
