//! Half-line wavemaker problems for linear dispersive equations.

pub mod asymptotics;
pub mod dispersion;
pub mod dnmap;
pub mod error;
pub mod fokas;
pub mod modulation;
pub mod oracle;
pub mod quadrature;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
pub mod chapter0 {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/dispersion.md")]
pub mod chapter1 {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/dnmap.md")]
pub mod chapter2 {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/fokas.md")]
pub mod chapter3 {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/asymptotics.md")]
pub mod chapter4 {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/modulation.md")]
pub mod chapter5 {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/oracle.md")]
pub mod chapter6 {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub mod chapter7 {}
