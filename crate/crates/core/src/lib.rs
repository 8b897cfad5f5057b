//! Symmetry, equivalence and preliminary group classification of the
//! first-order quasilinear equation `u_t + g(x,u) u_x = f(x,u)`.

pub mod numcheck;
pub mod symkernel;
pub mod jetfield;
pub mod linalg;
pub mod detsys;
pub mod equiv;
pub mod liealg;
pub mod paperdata;
pub mod classify;
