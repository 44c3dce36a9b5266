//! Lax pairs of the five reductions and exact zero-curvature checks.

mod ds;
mod lax;
mod verify;

pub use ds::{
    canonical_to_ds, constraint_residuals, ds_names, ds_to_canonical, raw_parameters, t11_of_t, t_of_t11, DSState,
};
pub use lax::{
    assemble_b11, assemble_m, curvature, flow_tangents, grading, lax_matrices, zero_curvature_residual,
    zero_curvature_residual_with, Curvature, GaugeFlow, LaxPair,
};
pub use verify::{
    admissible_sample, check_constraints, check_normalization, draw_rational, draw_sample, sample_failures, sample_rng, verify_partition,
    verify_without_gauge_flow, Sample, MAX_RETRIES,
};

#[cfg(test)]
mod tests;
