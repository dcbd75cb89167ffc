use thiserror::Error;

/// Errors raised while constructing or combining the library's values.
///
/// Construction errors are reported eagerly: every poset, complex, map and
/// diagram validates its own invariants when built.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate element id `{0}`")]
    DuplicateElement(String),
    #[error("unknown element id `{0}`")]
    UnknownElement(String),
    #[error("relation mentions ids out of range: ({0}, {1})")]
    RelationOutOfRange(usize, usize),
    #[error("order relation is not reflexive at `{0}`")]
    NotReflexive(String),
    #[error("order relation is not antisymmetric on `{0}`, `{1}`")]
    NotAntisymmetric(String, String),
    #[error("order relation is not transitive: `{0}` <= `{1}` <= `{2}`")]
    NotTransitive(String, String, String),
    #[error("set size {0} exceeds supported bound {1}")]
    SizeOverflow(usize, usize),
    #[error("multi-index must be nonempty")]
    EmptyMultiIndex,
    #[error("multi-index entry {0} below -1")]
    MultiIndexEntry(i64),
    #[error("expected nonnegative multi-index, got entry {0}")]
    NegativeEntry(i64),
    #[error("punctured cube needs a nonempty index set")]
    EmptyCubeIndex,
    #[error("matrix shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("differential shape in degree {degree} is {got_rows}x{got_cols}, ranks require {want_rows}x{want_cols}")]
    DiffShape {
        degree: i64,
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("d o d != 0 between degrees {0} and {1}")]
    DifferentialSquare(i64, i64),
    #[error("label count {got} does not match rank {want} in degree {degree}")]
    LabelCount {
        degree: i64,
        got: usize,
        want: usize,
    },
    #[error("chain map does not commute with differentials in degree {0}")]
    NotChainMap(i64),
    #[error("chain map degree {degree} has shape {got_rows}x{got_cols}, expected {want_rows}x{want_cols}")]
    MapShape {
        degree: i64,
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("coefficient rings differ: {0} vs {1}")]
    RingMismatch(&'static str, &'static str),
    #[error("diagram is missing the arrow `{0}` <= `{1}`")]
    MissingArrow(String, String),
    #[error("diagram arrow `{0}` <= `{1}` has wrong source or target")]
    ArrowEndpoints(String, String),
    #[error("diagram does not compose along `{0}` <= `{1}` <= `{2}`")]
    NotFunctorial(String, String, String),
    #[error("subset is not an ideal: contains `{0}` but not `{1}` <= `{0}`")]
    NotAnIdeal(String, String),
    #[error("ideals do not cover the poset: `{0}` uncovered")]
    NotACover(String),
    #[error("shape is not the expected poset: {0}")]
    WrongShape(String),
    #[error("cone legs are not compatible with the diagram at `{0}` <= `{1}`")]
    NotACone(String, String),
    #[error("ambient dimension must be at least 3, got {0}")]
    AmbientDimension(usize),
    #[error("too many components: {0} (at most 26 supported)")]
    TooManyComponents(usize),
    #[error("point {0} is not part of the ambient point set")]
    UnknownPoint(String),
    #[error("cube dimension {0} too large for totalization (bound {1})")]
    CubeTooLarge(usize, usize),
    #[error("cannot parse coefficient `{0}`")]
    BadEntry(String),
    #[error("polynomial syntax error at offset {0}: {1}")]
    PolySyntax(usize, String),
    #[error("variable x{0} exceeds declared variable count {1}")]
    VariableRange(usize, usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
