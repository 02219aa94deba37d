use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("value is not rational: {0}")]
    NotRational(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cyclotomic moduli differ: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("exponent {exponent} is not invertible modulo {modulus}")]
    NotInvertibleExponent { modulus: u32, exponent: i64 },
    #[error("element is not invertible")]
    NotInvertible,
    #[error("element is not invariant under the canonical involution")]
    NotIotaInvariant,
    #[error("matrix is not hermitian")]
    NotHermitian,
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("trace form entry {0} is not integral over o_K")]
    BasisNotIntegral(String),
    #[error("character parity does not match weight {n}")]
    ParityMismatch { n: u32 },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("rotation is not primitive: {0}")]
    NotPrimitive(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("normal eigenvalue equals one")]
    EigenvalueOne,
    #[error("dimension sum is not a non-negative integer: {0}")]
    NotAnInteger(String),
    #[error("more than one Kodaira dimension survives: {0:?}")]
    Ambiguous(Vec<String>),
    #[error("no Kodaira dimension is consistent with the invariants")]
    Inconsistent,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{id}: {source}")]
    Entry { id: String, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
