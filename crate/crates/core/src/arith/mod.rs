pub mod integer;
pub mod rational;
pub mod real;

pub use integer::{ext_gcd, factorize, is_coprime, mod_inverse};
pub use rational::{farey_diff, farey_sum, reduce, ExtendedRational, FormalFraction};
pub use real::{parse_decimal, QuadraticSurd, Real};
