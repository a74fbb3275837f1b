use thiserror::Error;

/// Errors raised by the geometric and combinatorial checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid angle class: denominator {0} is not positive")]
    InvalidAngle(i64),
    #[error("angle {radians} rad is not a multiple of pi/{max_den} within tolerance")]
    AngleNotRepresentable { radians: f64, max_den: i64 },
    #[error("vector has norm {norm}, expected a unit vector")]
    NonUnit { norm: f64 },
    #[error("torus datum is not surjective onto Z^n (gcd of maximal minors is {gcd})")]
    NonSurjective { gcd: String },
    #[error("torus datum needs d >= n (n = {n}, d = {d})")]
    TooFewHyperplanes { n: usize, d: usize },
    #[error("refusing to enumerate {count} subsets of {d} hyperplanes (limit {limit})")]
    CombinatorialBlowup { d: usize, count: u128, limit: u128 },
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NonUnitary { deviation: f64 },
    #[error("planes are not transverse (smallest eigenvalue argument {argument:e})")]
    NonTransverse { argument: f64 },
    #[error("angle sum {sum_over_pi} * pi is not an integer multiple of pi in [1, m-1]")]
    NonIntegerType { sum_over_pi: f64 },
    #[error("simultaneous diagonalization failed (off-diagonal residual {residual:e})")]
    Diagonalization { residual: f64 },
    #[error("closed-form and numeric angles disagree by {deviation:e}")]
    AngleMismatch { deviation: f64 },
    #[error("subspace is degenerate: {0}")]
    DegenerateSubspace(String),
    #[error("subspace is not torus invariant: {0}")]
    NotInvariant(String),
    #[error("subspace is not sigma-holomorphic Lagrangian (form residuals {first:e}, {second:e})")]
    NotHolomorphicLagrangian { first: f64, second: f64 },
    #[error("projection onto factor {factor} matches neither V(sigma) nor V(-sigma)")]
    ProjectionMismatch { factor: usize },
    #[error("malformed polytope: {0}")]
    MalformedPolytope(String),
    #[error("point is not a vertex of the polytope")]
    NotAVertex,
    #[error("edge index {edge} out of range for quiver with {count} edges")]
    EdgeOutOfRange { edge: usize, count: usize },
    #[error("malformed quiver: {0}")]
    MalformedQuiver(String),
    #[error("quiver has {components} connected components; expected a connected quiver")]
    DisconnectedQuiver { components: usize },
    #[error("angle {angle} of vertex {vertex} is not a multiple of pi/{n}")]
    AngleNotMultiple {
        vertex: String,
        angle: String,
        n: usize,
    },
    #[error("first Betti number of shape {0} is unknown")]
    UnknownShape(String),
    #[error("ambient half-dimension {0} is below 3")]
    DimensionTooSmall(usize),
    #[error("orientation sign {sign} is inconsistent with k = {k}")]
    InconsistentSign { k: i64, sign: i8 },
    #[error("volume {0} is not positive")]
    NonPositiveVolume(f64),
    #[error("summand list is empty")]
    EmptySummands,
    #[error("identity check failed: {0}")]
    IdentityViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
