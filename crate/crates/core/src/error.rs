use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate lattice: the Gram matrix is singular")]
    DegenerateLattice,
    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),
    #[error("invalid quadratic module: {0}")]
    InvalidModule(String),
    #[error("order {order} exceeds the search bound {bound}")]
    SizeLimit { order: u64, bound: u64 },
    #[error("the quadratic module is not anisotropic")]
    NotAnisotropic,
    #[error("structural classification of 2-groups is not supported")]
    UnsupportedClassification,
    #[error("signature {given} mod 8 is inconsistent with the Milgram signature {milgram}")]
    InconsistentSignature { given: i64, milgram: u8 },
    #[error("Gauss sum does not have absolute value sqrt|A|")]
    GaussSumModulus,
    #[error("matrix has determinant {0}, expected 1")]
    NotInSl2(i64),
    #[error("modulus {0} must be odd and positive")]
    InvalidModulus(i64),
    #[error("({k}, {l}) is not a dominant pair (need 0 <= k <= l, k + l even)")]
    NotDominant { k: i64, l: i64 },
    #[error("local factor has a pole")]
    Pole,
    #[error("inconclusive: enclosure contains zero at {0} bits")]
    Inconclusive(u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("missing input: {0}")]
    MissingInput(&'static str),
    #[error("n_max = {given} is too small for the requested precision; need n_max >= {required}")]
    InsufficientNMax { given: String, required: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
