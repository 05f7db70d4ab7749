//! Higher Stickelberger elements for abelian extensions of Q.
//!
//! Fields are subfields of Q(μ_f) given by a conductor and the subgroup H of (Z/fZ)^× fixing them.
//! All arithmetic is exact.

pub mod arith;
pub mod bernoulli;
pub mod characters;
pub mod cyclotomic;
pub mod error;
pub mod group_ring;
pub mod lattice;
pub mod oracles;
pub mod stickelberger;
pub mod sweep;
pub mod tower;
pub mod zeta;

pub use arith::{format_rational, parse_rational, Valuation};
pub use characters::{enumerate_characters, DirichletCharacter};
pub use cyclotomic::CyclotomicNumber;
pub use error::{Error, Result};
pub use group_ring::{AbelianFieldSpec, GaloisElement, GroupRingElement};
pub use oracles::{birch_tate_order, minus_class_number, stickelberger_index};
pub use stickelberger::{theta, StickelbergerElement};
pub use tower::{build_theta_tower, k_of_v, w_invariant, ThetaTowerFamily, TowerSpec};
pub use zeta::{PartialZetaProvider, RationalPartialZeta};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
