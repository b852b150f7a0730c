use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    BadPrime(u64),
    #[error("{a} is divisible by {p}")]
    NotAUnit { a: i64, p: u64 },
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(String, String),
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("zero has no inverse")]
    DivisionByZero,
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("auxiliary prime l = {0} must differ from p")]
    AuxiliaryEqualsP(u64),
    #[error("residue field of size {q} exceeds the supported bound {bound}")]
    FieldTooLarge { q: u128, bound: u64 },
    #[error("denominator divisible by l = {0}")]
    DenominatorAtL(u64),
    #[error("precision exhausted after raising Hensel precision to {0}")]
    PrecisionExhausted(u32),
    #[error("no generator found within height bound {0}")]
    GeneratorNotFound(u32),
    #[error("(p, n) = ({p}, {n}) is outside the class-number-one whitelist")]
    NotWhitelisted { p: u64, n: u32 },
    #[error("element has non-integral coefficients")]
    NotIntegral,
    #[error("element is not in S'_n")]
    NotInSPrime,
    #[error("Galois invariance failed: {0}")]
    GaloisInvariance(String),
    #[error("invalid character: {0}")]
    InvalidCharacter(String),
    #[error("insufficient p-adic precision: {0}")]
    InsufficientPrecision(String),
    #[error("level must be at least 1 for {0}")]
    LevelZero(&'static str),
    #[error("no defect decomposition found: {0}")]
    NoDefect(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}
