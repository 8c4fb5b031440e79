use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by a series that vanishes within its window")]
    ZeroDivisor,
    #[error("inverse of a non-monomial Laurent polynomial needs an explicit truncation order")]
    UnboundedInverse,
    #[error("series constant term is not zero")]
    NonzeroConstant,
    #[error("series constant term is not the unit")]
    NonUnitConstant,
    #[error("operands live on different lattices")]
    LatticeMismatch,
    #[error("degree bounds differ ({0} vs {1})")]
    DegreeBoundMismatch(u32, u32),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("class {0:?} is not effective in the target lattice")]
    NotEffective(Vec<i64>),
    #[error("class {class:?} changes degree under the lattice map ({from} -> {to})")]
    DegreeMismatch { class: Vec<i64>, from: i64, to: i64 },
    #[error("the zero class has no divisors")]
    ZeroClass,
    #[error("class {0:?} has negative c1 pairing")]
    NegativeC1(Vec<i64>),
    #[error("window too small: need truncation order >= {required}, have {available}")]
    WindowTooSmall { required: i64, available: i64 },
    #[error("coefficient of class {class:?} in channel {channel} is not in the kernel span (first offending exponent {exponent})")]
    NotInKernelSpan { class: Vec<i64>, channel: String, exponent: i64 },
    #[error("coefficient of class {class:?} in channel {channel} is not divisible by (1+q)^{power}")]
    NonDivisible { class: Vec<i64>, channel: String, power: i64 },
    #[error("channel {channel} is inconsistent at class {class:?}: {reason}")]
    InconsistentChannel { class: Vec<i64>, channel: String, reason: String },
    #[error("insertion monomial {0} is not reduced (contains degree 0 or 2 labels)")]
    InsertionNotReduced(String),
    #[error("unknown insertion label {0}")]
    UnknownLabel(String),
    #[error("label {0} has no declared dual")]
    UnpairedLabel(String),
    #[error("missing table entry: {0}")]
    MissingEntry(String),
    #[error("invalid flop data: {0}")]
    InvalidFlop(String),
    #[error("invalid widths: {0}")]
    InvalidWidths(String),
    #[error("kernel forms with different multi-cover index cannot be combined in the s-basis ({0} vs {1})")]
    MixedKernelIndex(u32, u32),
    #[error("raw truncated q-series cannot be substituted q = -e^(iu); supply a kernel form")]
    NotRationalForm,
    #[error("descendant insertion on non-point label {0}")]
    DescendantOnNonPoint(String),
    #[error("window mismatch: {0}")]
    WindowMismatch(String),
    #[error("{0}")]
    Invalid(String),
}
