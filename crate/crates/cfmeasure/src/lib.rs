pub mod admissible;
pub mod cf;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod harness;
pub mod hp;
pub mod ledger;
pub mod measure;
pub mod profile;
