//! Benchmark problems: SDOF cases, nonlinear oscillators, rod and membrane meshes.

pub mod fem;
pub mod nonlinear;
pub mod sdof;

pub use fem::{
    dissipation_metric, dissipation_metric_samples, isotropy_defect, membrane_assembly,
    membrane_rays, modal_basis, rod_assembly, semidiscrete_modal_oracle, DissipationMetric,
    FemLoad, FemProblem, MeshInfo,
};
pub use nonlinear::{spring_pendulum, van_der_pol, SpringPendulum, VanDerPol};
pub use sdof::{sdof_case, Harmonic, SdofCase, SdofKind};
