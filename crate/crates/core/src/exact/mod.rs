//! Exact rationals, cyclotomic numbers and certified complex enclosures.

pub mod cyclo;
pub mod interval;
pub mod rational;

pub use cyclo::CycloNum;
pub use interval::{ComplexInterval, Interval};
pub use rational::Rational;
