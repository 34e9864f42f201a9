//! Exact construction of maximal p-cyclically monotone operators from finite
//! seeds, with every intermediate claim checked in rational arithmetic.
//!
//! ```
//! use pcm_core::operator::{is_p_mono, FiniteOperator, PointPair};
//! use pcm_core::qv;
//!
//! let op = FiniteOperator::from_pairs([
//!     PointPair::new(qv![1], qv![-1]).unwrap(),
//!     PointPair::new(qv![-1], qv![1]).unwrap(),
//! ])
//! .unwrap();
//! let report = is_p_mono(&op, 1).unwrap();
//! assert!(!report.verdict);
//! assert_eq!(report.max_sum, pcm_core::rational::int(4));
//! ```

pub mod construct;
pub mod error;
pub mod linalg;
pub mod operator;
pub mod polar;
pub mod polyhedra;
pub mod rational;
pub mod verify;

pub use error::{Error, Result};
pub use rational::{QVector, Rational};
