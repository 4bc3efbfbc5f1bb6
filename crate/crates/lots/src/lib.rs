//! A workbench for countable linearly ordered topological spaces.
//!
//! The pieces: ordinal arithmetic in Cantor normal form ([`ordinal`]), exact
//! set algebra over ordinal segments ([`ordset`]), an expression language for
//! spaces built from segments by sums, products, lexicographic products,
//! reversal, point removal, and block reordering ([`space`]), order-topology
//! queries and classification invariants ([`topology`]), local base
//! generation ([`basis`]), the constructions that exchange a product order
//! for a lexicographic one ([`construct`]), machine checks that certify a
//! claimed piecewise homeomorphism on finite exhaustions ([`verify`]), and a
//! deliberately slow arithmetic cross-check ([`oracle`]).

pub mod basis;
pub mod construct;
pub mod oracle;
pub mod ordinal;
pub mod ordset;
pub mod parse;
pub mod space;
pub mod topology;
pub mod verify;

pub use ordinal::{Kind, Ordinal, OrdinalError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("point {point} is not in the space")]
    NotAMember { point: String },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
