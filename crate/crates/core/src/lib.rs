//! Geometric constants of finite-dimensional normed spaces computed over
//! inscribed equilateral triangles `||x|| = ||y|| = ||x - y|| = 1`, and an
//! audit of the inequalities relating them.

pub mod audit;
pub mod constants;
pub mod error;
pub mod manifold;
pub mod norm;
pub mod polytope;
pub mod sig;

pub use audit::{hilbert_identity_probe, run_audit, AuditReport, CheckResult, Flag, FlagKind, Relation, Verdict};
pub use constants::{
    estimate, estimate_many, estimate_on_dual, refine_convergence, ConstantEstimate, ConstantId, DeltaForm, Direction,
    EstimateParams, Estimator, Witness,
};
pub use error::{Error, Result};
pub use manifold::{
    boundary_point, sample_T, sample_sphere_pairs, third_constraint_roots, AdmissiblePair, PairConstraint,
    SamplingParams, SectionBasis,
};
pub use norm::{AxiomReport, DualVector, Family, NormSpec, VectorF};
pub use polytope::Polytope;
