//! Polynomial symbols `p(x, xi)`: parsing, evaluation, critical points and
//! the sampled range (the semiclassical pseudospectrum).

mod critical;
mod parse;
mod poly;
mod range;

pub use critical::{find_real_critical_points, CriticalPoint};
pub use parse::{parse_symbol, parse_symbol_with_cap};
pub use poly::{PolySymbol, DEFAULT_MAX_DEGREE};
pub use range::{exterior_cone_check, sample_range, wrap_angle, ConeSpec, RangeSample, SAMPLE_BUDGET};
