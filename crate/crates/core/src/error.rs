use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree {0} is outside 1..={max}", max = crate::fields::MAX_DEGREE)]
    DegreeOutOfRange(u32),
    #[error("field of order {p}^{k} exceeds the supported order bound")]
    FieldTooLarge { p: u64, k: u32 },
    #[error("cannot embed GF({p}^{from}) into GF({q}^{to})")]
    IncompatibleFields { p: u32, from: u32, q: u32, to: u32 },
    #[error("operands live in different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("polynomial is constant")]
    ConstantPolynomial,
    #[error("splitting extension would need total degree {0}, above the cap")]
    ExtensionCap(u32),
    #[error("matrix is singular")]
    Singular,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("characteristic {p} does not match label class {class}")]
    CharacteristicMismatch { p: u32, class: String },
    #[error("unknown family {0}")]
    UnknownFamily(String),
    #[error("family {family} takes {expected} parameters, got {got}")]
    Arity {
        family: u8,
        expected: usize,
        got: usize,
    },
    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },
    #[error("GF({q}) exceeds the enumeration bound {bound}")]
    EnumerationBound { q: u64, bound: u64 },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn parse(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Parse {
            what,
            detail: detail.into(),
        }
    }
}
