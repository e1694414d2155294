//! Fourier analysis of the pushed-forward measure.

pub mod diag;
pub mod eval;
pub mod fxi;
pub mod normality;
pub mod qr;
pub mod quad;
pub mod vdc;
