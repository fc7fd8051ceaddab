use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("literal {0} has a denominator that vanishes modulo {1}")]
    RationalOverPrimeField(String, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("syntax error on line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: reference to unknown gate `{gate}`")]
    UnknownGateRef { line: usize, gate: String },
    #[error("line {line}: gate `{gate}` references itself")]
    CycleDetected { line: usize, gate: String },
    #[error("line {line}: gate `{gate}` defined twice")]
    DuplicateGateId { line: usize, gate: String },
    #[error("invalid field literal `{0}`")]
    FieldLiteralInvalid(String),
    #[error("budget exceeded: estimated {estimated} exceeds limit {limit}")]
    BudgetExceeded { estimated: u128, limit: u128 },
    #[error("polynomial is not multilinear")]
    NotMultilinear,
    #[error("variable blocks do not partition the polynomial's variables")]
    BlocksNotPartition,
    #[error("polynomial has non-integer coefficients")]
    NonIntegerCoefficients,
    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("degree bound {bound} is smaller than the degree {degree}")]
    DegreeBoundTooSmall { bound: u64, degree: u64 },
    #[error("circuit is not a formula")]
    NotAFormula,
    #[error("circuit is not weakly skew: {0}")]
    NotWeaklySkew(String),
    #[error("characteristic {p} is too small for n = {n}")]
    CharacteristicTooSmall { p: u64, n: usize },
    #[error("construction requires characteristic different from two")]
    CharacteristicTwo,
    #[error("coupled edges share an endpoint")]
    SharedEndpoints,
    #[error("edge {0} -> {1} already present")]
    DuplicateEdge(String, String),
    #[error("summed variable `{0}` does not occur in the formula")]
    UnusedYVariable(String),
    #[error("size bound violated: {actual} > {bound}")]
    SizeBoundViolated { actual: usize, bound: usize },
    #[error("field too small: sample set of size {size} does not exceed degree {degree}")]
    FieldTooSmall { size: u64, degree: u64 },
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("too many variables: {count} > {limit}")]
    TooManyVariables { count: usize, limit: usize },
    #[error("circuit uses constants other than -1, 0, 1")]
    NotConstantFree,
    #[error("circuit is not multiplicatively disjoint")]
    NotMultDisjoint,
    #[error("unknown artifact kind: {0}")]
    UnknownArtifactKind(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
