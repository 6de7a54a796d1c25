use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("divisor class belongs to a different surface (expected {expected}, got {found})")]
    SurfaceMismatch { expected: String, found: String },

    #[error("effective part ambiguous: {class} adds an exceptional divisor; split it off first")]
    AmbiguousEffectivePart { class: String },

    #[error("odd adjunction product {product} for {class}: not the class of a reduced curve")]
    AdjunctionParity { class: String, product: i64 },

    #[error("intersection number {numerator}/{denominator} is not integral for {class}")]
    NonIntegral {
        class: String,
        numerator: i64,
        denominator: i64,
    },

    #[error("point type {0} violates the parity constraints")]
    InvalidPointType(String),

    #[error("expected {expected} entries, got {found}")]
    Length { expected: usize, found: usize },

    #[error("group rank must be between 1 and {max}, got {found}")]
    GroupRank { max: u32, found: u32 },

    #[error("no cover exists: the branch sum for {character} has odd coordinates {sum}")]
    NoCover { character: String, sum: String },

    #[error("branch component D{index} = {class} is not effective")]
    NotEffective { index: usize, class: String },

    #[error("tower step characters do not generate the character group")]
    DegenerateTower,

    #[error("cannot contract {class}: self-intersection {self_intersection}, expected -1")]
    NotMinusOneCurve {
        class: String,
        self_intersection: i64,
    },

    #[error("contraction of {count} curve(s) is inconsistent: K^2 {k2} + {count} != {expected}")]
    InconsistentContraction { k2: i64, count: i64, expected: i64 },

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("family id must be in 1..=9, got {0}")]
    FamilyOutOfRange(u32),

    #[error("parameter n = {n} is out of range {min}..={max}")]
    ParameterOutOfRange { n: i64, min: i64, max: i64 },
}
