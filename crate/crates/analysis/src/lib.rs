//! Numerical analysis of integer series: ratio methods, log fits and
//! differential approximants.

pub mod diffapprox;
pub mod hp;
pub mod linalg;
pub mod poly;
pub mod report;
pub mod series;
pub mod seriesanalysis;
