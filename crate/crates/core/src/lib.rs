//! Exact piecewise algebras on rational fans.

pub mod exactalg;
pub mod facering;
pub mod intlat;
pub mod fan;
pub mod gkm;
pub mod piecewise;
pub mod transforms;
pub mod verify;
