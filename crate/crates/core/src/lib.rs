//! Exact resolution of basic objects over `Q[eps]/(eps^m)`.
//!
//! The crate is layered bottom-up:
//!
//! * [`scalar`], [`poly`], [`groebner`], [`ideal`]: exact arithmetic and ideal theory.
//! * [`delta`]: derivative ideals and singular loci.
//! * [`geometry`], [`locus`]: charts, coordinate centers, blow-ups, fiber loci.
//! * [`basic_object`]: basic objects, permissibility and transforms.
//! * [`invariants`], [`contact`]: resolution invariants and maximal contact.
//! * [`driver`]: the fiber resolution, the equiresolution conditions and the wrappers.
//! * [`io`], [`catalog`]: JSON schemas and the built-in worked examples.

pub mod basic_object;
pub mod catalog;
pub mod contact;
pub mod delta;
pub mod driver;
pub mod error;
pub mod geometry;
pub mod groebner;
pub mod ideal;
pub mod invariants;
pub mod io;
pub mod locus;
pub mod poly;
pub mod scalar;

pub use basic_object::{BasicObject, IdTriple};
pub use driver::{equiresolve, principalize, resolve_embedded, resolve_fiber, DriverConfig, EquiresReport};
pub use error::{CoreError, Result};
pub use geometry::{CenterComponent, CenterSpec, Chart, SPair};
pub use ideal::{Ideal, Level};
pub use poly::{Mono, Poly, Ring};
pub use scalar::ArtinScalar;
