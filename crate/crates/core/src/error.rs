use thiserror::Error;

use crate::group_ring::GroupRingElement;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("conductor must be positive")]
    ZeroConductor,
    #[error("conductor {0} is congruent to 2 mod 4")]
    ConductorTwoModFour(u64),
    #[error("{0} is not a unit modulo {1}")]
    NotAUnit(u64, u64),
    #[error("subgroup is not closed under multiplication modulo {0}")]
    NonSubgroup(u64),
    #[error("conductor {given} is not minimal; the field already has conductor {minimal}")]
    NonMinimalConductor { given: u64, minimal: u64 },
    #[error("group-ring elements live over different fields")]
    FieldMismatch,
    #[error("target field is not a subfield of the source field")]
    NotASubfield,
    #[error("{0} does not divide {1}")]
    DivisibilityViolation(u64, u64),
    #[error("{what}: {value} is not coprime to {modulus}")]
    NotCoprime {
        what: &'static str,
        value: u64,
        modulus: u64,
    },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime 2 is not allowed here; an odd prime is required")]
    EvenPrime,
    #[error("character of modulus {modulus} is not primitive (conductor {conductor})")]
    NonPrimitive { modulus: u64, conductor: u64 },
    #[error("character does not factor through the Galois group of the field")]
    CharacterFieldMismatch,
    #[error("field is not CM")]
    NotCM,
    #[error("field is not totally real")]
    NotTotallyReal,
    #[error("non-integral result: {0}")]
    NonIntegralResult(String),
    #[error("Hasse unit index cannot be decided by the implemented criteria for conductor {0}")]
    UnitIndexUndetermined(u64),
    #[error("the two routes for the Stickelberger element disagree (f = {f}, n = {n}, b = {b})")]
    RouteMismatch { f: u64, n: u32, b: u64 },
    #[error("tower restriction incompatible at level {level}")]
    CompatibilityFailure {
        level: usize,
        restricted: Box<GroupRingElement>,
        expected: Box<GroupRingElement>,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}
