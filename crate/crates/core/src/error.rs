use thiserror::Error;

/// Errors surfaced by the library. Most algebra operations are total on
/// valid inputs; errors arise at construction, deserialization, parameter
/// validation and in the statistical harness.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("images {0:?} do not form a permutation of 0..5")]
    NotAPermutation([u8; 5]),
    #[error("permutation {0:?} is odd; only even permutations are allowed")]
    OddPermutation([u8; 5]),
    #[error("coefficient {value} at index {index} is not a residue mod 7")]
    CoefficientOutOfRange { index: usize, value: u8 },
    #[error("expected {expected} bytes, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("exponent must be positive")]
    ZeroExponent,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("base {g} is not a unit mod {p}")]
    InvalidBase { g: u64, p: u64 },
    #[error("endomorphism exponent k must be greater than 1, got {0}")]
    InvalidEndomorphismExponent(u64),
    #[error("element is divisible by the modulus")]
    ZeroElement,
    #[error("H * H_inv is not the identity matrix")]
    NotInverse,
    #[error("matrix M has an entry with nonzero augmentation")]
    AugmentationNonzero,
    #[error("H and H*M commute; parameters are insecure")]
    CommutingParameters,
    #[error("security parameter t must be at least 2, got {0}")]
    SecurityParameterTooSmall(u16),
    #[error("factor count must be at least 1")]
    NoFactors,
    #[error("could not sample non-commuting parameters within {0} attempts")]
    ResampleBudgetExhausted(u32),
    #[error("exponent range is empty (low must be less than high)")]
    EmptyExponentRange,
    #[error("experiment needs at least one trial")]
    NoTrials,
    #[error("frequency tables aggregate different trial counts: {0} vs {1}")]
    TrialCountMismatch(u32, u32),
    #[error("table too sparse for a chi-square test even after pooling")]
    UnderpopulatedTable,
    #[error("bad magic bytes in parameter file")]
    BadMagic,
    #[error("unsupported parameter file version {0}")]
    BadVersion(u8),
}

pub type Result<T> = std::result::Result<T, Error>;
