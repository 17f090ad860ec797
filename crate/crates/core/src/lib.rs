// SPDX-License-Identifier: Apache-2.0

// Parameter checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod estimation;
pub mod ion_cavity;
pub mod lindblad;
pub mod optics;
pub mod spatial;
