use thiserror::Error;

/// Crate-wide error type. Variants carry enough context to render a useful
/// one-line diagnostic; machine-readable codes come from [`Error::code`].
#[derive(Debug, Error)]
pub enum Error {
    // group actions
    #[error("group closure exceeded max_order = {max_order}")]
    OrderExceeded { max_order: usize },
    #[error("matrix of element {index} is not orthogonal (max deviation {deviation:.3e})")]
    NotOrthogonal { index: usize, deviation: f64 },
    #[error("elements {a} and {b} share a vertex permutation; the combinatorial action is not faithful")]
    NonFaithfulAction { a: usize, b: usize },
    #[error("element {element} has fixed space of dimension {fixed_dim} in ambient dimension {ambient}; non-identity isotropy must fix only codimension >= 2")]
    CodimensionViolation {
        element: usize,
        fixed_dim: usize,
        ambient: usize,
    },

    // simplicial complexes
    #[error("group element {element} does not permute the simplices of the complex")]
    NotSimplicial { element: usize },
    #[error("action is still not regular after {subdivisions} barycentric subdivisions")]
    RegularizationFailed { subdivisions: usize },
    #[error("operation requires a regular presentation; call regularize first")]
    RequiresRegular,
    #[error("complex is not a manifold presentation: face {face:?} lies in {count} top simplices")]
    NotManifold { face: Vec<usize>, count: usize },
    #[error("operation requires a nonempty boundary")]
    EmptyBoundary,

    // expressions and fields
    #[error("parse error at byte {at}: {message}")]
    ExprParse { at: usize, message: String },
    #[error("evaluation error: {message}")]
    Eval { message: String },
    #[error("field has a zero within {tol:.1e} of the boundary at {location:?}")]
    ZeroOnBoundary { location: Vec<f64>, tol: f64 },
    #[error("Jacobian is singular at zero {location:?} (|det| = {det:.3e})")]
    DegenerateZero { location: Vec<f64>, det: f64 },
    #[error("field vanishes on the sampling circle (min |F| = {min_norm:.3e})")]
    FieldVanishesOnCircle { min_norm: f64 },
    #[error("zero set is not invariant under the group action: image of {location:?} under element {element} matches no computed zero")]
    ZeroSetNotInvariant { location: Vec<f64>, element: usize },
    #[error("field is not equivariant: |F(gx) - gF(x)| = {deviation:.3e} at sample {sample} for element {element}")]
    NotEquivariant {
        element: usize,
        sample: usize,
        deviation: f64,
    },

    // exit chains
    #[error("generic contact violated: {reason} at {location:?}")]
    NotGeneric { reason: String, location: Vec<f64> },
    #[error("field vanishes on the boundary (min |F| = {min_norm:.3e} at {location:?})")]
    FieldVanishesOnBoundary { location: Vec<f64>, min_norm: f64 },
    #[error("exit chains are implemented for dimensions 1 and 2 only (got n = {n})")]
    UnsupportedDimension { n: usize },

    // doubling
    #[error("tangential boundary field is degenerate: {reason}")]
    BoundaryZeroDegenerate { reason: String },
    #[error("support width s = {s:.3e} admits a spurious collar zero near {location:?}")]
    SupportTooWide { s: f64, location: Vec<f64> },
    #[error("collar construction requires {requirement}")]
    UnsupportedCollar { requirement: String },
    #[error("identity `{identity}` failed: {lhs} != {rhs}")]
    MismatchDetected {
        identity: String,
        lhs: String,
        rhs: String,
    },

    // inertia
    #[error("inertia characteristic {inertia} differs from underlying characteristic {underlying}")]
    InertiaMismatch { inertia: String, underlying: String },
    #[error("field is not tangent to the fixed locus of element {element}: normal residue {residue:.3e} at {location:?}")]
    TangencyViolation {
        element: usize,
        location: Vec<f64>,
        residue: f64,
    },

    // scenario files
    #[error("scenario parse error: {message}")]
    ParseError { message: String },
    #[error("invalid scenario at `{path}`: {message}")]
    ValidationError { path: String, message: String },
}

impl Error {
    /// Stable machine-readable code, used by reports and exit-code mapping.
    pub fn code(&self) -> &'static str {
        match self {
            Error::OrderExceeded { .. } => "order-exceeded",
            Error::NotOrthogonal { .. } => "not-orthogonal",
            Error::NonFaithfulAction { .. } => "non-faithful-action",
            Error::CodimensionViolation { .. } => "codimension-violation",
            Error::NotSimplicial { .. } => "not-simplicial",
            Error::RegularizationFailed { .. } => "regularization-failed",
            Error::RequiresRegular => "requires-regular",
            Error::NotManifold { .. } => "not-manifold",
            Error::EmptyBoundary => "empty-boundary",
            Error::ExprParse { .. } => "expr-parse",
            Error::Eval { .. } => "eval",
            Error::ZeroOnBoundary { .. } => "zero-on-boundary",
            Error::DegenerateZero { .. } => "degenerate-zero",
            Error::FieldVanishesOnCircle { .. } => "field-vanishes-on-circle",
            Error::ZeroSetNotInvariant { .. } => "zero-set-not-invariant",
            Error::NotEquivariant { .. } => "not-equivariant",
            Error::NotGeneric { .. } => "not-generic",
            Error::FieldVanishesOnBoundary { .. } => "field-vanishes-on-boundary",
            Error::UnsupportedDimension { .. } => "unsupported-dimension",
            Error::BoundaryZeroDegenerate { .. } => "boundary-zero-degenerate",
            Error::SupportTooWide { .. } => "support-too-wide",
            Error::UnsupportedCollar { .. } => "unsupported-collar",
            Error::MismatchDetected { .. } => "mismatch-detected",
            Error::InertiaMismatch { .. } => "inertia-mismatch",
            Error::TangencyViolation { .. } => "tangency-violation",
            Error::ParseError { .. } => "parse-error",
            Error::ValidationError { .. } => "validation-error",
        }
    }

    /// True for errors caused by malformed or inadmissible input rather than
    /// a failed verification.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::ParseError { .. }
                | Error::ValidationError { .. }
                | Error::ExprParse { .. }
                | Error::OrderExceeded { .. }
                | Error::NotOrthogonal { .. }
                | Error::NonFaithfulAction { .. }
                | Error::CodimensionViolation { .. }
                | Error::NotSimplicial { .. }
                | Error::NotManifold { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
