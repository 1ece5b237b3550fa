//! Round Taylor integration with certified global error bounds, and the
//! machinery to re-check a computer-assisted periodicity proof for a
//! symmetric three-body orbit in exact rational arithmetic.

pub mod exact;
pub mod fields;
pub mod bounds;
pub mod topology;
pub mod integrator;
pub mod pipeline;
