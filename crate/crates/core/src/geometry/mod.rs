//! Planar symplectic geometry: fields, Poisson and Lie brackets, and the
//! finite-difference oracles used to check them.

pub mod field;
pub mod oracle;
pub mod special;
pub mod symplectic;

pub use field::{
    Domain, JetFn, ScalarField, ScalarField2D, ScalarField3D, TwoCopyField, VectorField,
    VectorField2D,
};
pub use oracle::{fd_bracket_oracle, fd_gradient, fd_jacobian, fd_lie_bracket, fd_tensor_bracket};
pub use special::{ch, shc};
pub use symplectic::{
    hamiltonian_vector_field, lie_bracket, poisson_bracket, PoissonTensor, SymplecticForm,
    SymplecticForm2D,
};

/// Default guard band: points closer than this to a coordinate singularity are
/// treated as outside the domain.
pub const DEFAULT_GUARD: f64 = 1e-8;
