// SPDX-License-Identifier: Apache-2.0

//! CODATA 2018 values, SI units.

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// 2π, for converting between ordinary and angular frequency.
pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
