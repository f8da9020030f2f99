pub mod character;
pub mod cyclotomic;
pub mod error;
pub mod group_ring;
pub mod half_logs;
pub mod json;
pub mod padic;
pub mod pollack;
pub mod qpn;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod verify;
