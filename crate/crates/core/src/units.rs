//! Interface-unit conversions.
//!
//! Angular frequencies are rad/µs, so `2π · f[MHz]` converts directly, and
//! times are µs. These helpers are the only place the factor `2π` enters.

use std::f64::consts::TAU;

/// Ordinary frequency in MHz to angular frequency in rad/µs.
#[inline]
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    TAU * f_mhz
}

/// Angular frequency in rad/µs to ordinary frequency in MHz.
#[inline]
pub fn angular_to_mhz(omega: f64) -> f64 {
    omega / TAU
}

#[inline]
pub fn ns_to_us(t_ns: f64) -> f64 {
    t_ns * 1e-3
}

#[inline]
pub fn us_to_ns(t_us: f64) -> f64 {
    t_us * 1e3
}
