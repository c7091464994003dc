//! Function fields of `P^1` and of constant elliptic curves over a finite
//! field: elements, places, valuations, reductions and divisors.

mod curve;
mod divisor;
mod place;
mod rational;
mod sample;
mod series;

pub use curve::{element_string, format_poly, Curve, CurveKind, FuncElement};
pub use divisor::Divisor;
pub use place::{Place, PlaceKind};
pub use rational::RatFunc;
