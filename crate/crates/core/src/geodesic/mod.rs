//! Geodesic flow, the symplectic form on the space of geodesics, and the
//! integral-geometric checks that rest on them.

mod checks;
mod flow;
mod symplectic;

pub use checks::{
    busemann_prime_length, crofton_area_check, great_circle_deviation, hausdorff_distance, line_deviation,
    reversal_trace, reversibility_check, santalo_check, verdict_below, ReversalTrace, INTEGRAL_GEOMETRY_TOL,
    REVERSIBILITY_TOL,
};
pub use flow::{
    geodesic_trace, hamiltonian_vector, initial_state, integrate, GeodesicOptions, GeodesicTrajectory,
    TrajectorySample,
};
pub use symplectic::{
    euler_defect, flow_invariance, great_circle_pole, hilbert_form, motion_integral_flow_spread,
    motion_integral_ratio, section_symplectic_form, MotionRatio, PatchMap, SectionForm, TransversalPatch,
};
