//! Exact encoding and indexing for nested lattice codes whose shaping
//! lattice need not be a scaled copy of the coding lattice.
//!
//! All lattice arithmetic is exact over arbitrary-precision rationals; only
//! the Monte Carlo shaping-gain estimate uses floating point.
//!
//! ```
//! use lattice_codes::prelude::*;
//!
//! let coding = Lattice::from_generator(
//!     RMatrix::from_i64(&[&[2, 0], &[-1, 3]]),
//!     QuantizerSpec::BruteForce,
//! ).unwrap();
//! let scheme = HypercubeScheme::new(&coding, rat(12, 1)).unwrap();
//! let x = scheme.encode(&[int(5), int(3)]).unwrap();
//! assert_eq!(scheme.index(&x).unwrap(), vec![int(5), int(3)]);
//! ```

pub mod arith;
pub mod builders;
pub mod cli;
pub mod config;
pub mod encoder;
pub mod error;
pub mod full;
pub mod lattice;
pub mod matrix;
pub mod quantizer;
pub mod serial;
pub mod shaping;
pub mod triangular;

pub mod prelude {
    pub use crate::arith::{int, rat, Integer, Rational};
    pub use crate::encoder::{Encoder, EncoderChoice};
    pub use crate::error::{Error, Result};
    pub use crate::full::{build_scheme, FullScheme};
    pub use crate::lattice::{encode_mod, CodePair, Lattice, Ranges};
    pub use crate::matrix::RMatrix;
    pub use crate::quantizer::QuantizerSpec;
    pub use crate::shaping::HypercubeScheme;
    pub use crate::triangular::{derive_ranges, TriangularScheme};
}
