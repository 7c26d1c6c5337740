//! Domains of linear orders constrained by never conditions on triples
//! (Condorcet domains) and by forbidden patterns on `k`-tuples
//! (pattern-avoiding permutations).
//!
//! The building blocks are:
//! - [`types`]: orders, tuples, patterns, never rules, laws, constraint lists
//!   and domains;
//! - [`domain`]: breadth-first construction, depth-first counting and rule
//!   recovery;
//! - [`orderings`]: tuple orders, rule assignment and schemes;
//! - [`subsets`]: numeric states and restriction to subsets;
//! - [`iso`]: relabelling, normal forms and minimality;
//! - [`search`]: best-first and depth-first search for large domains;
//! - [`formats`]: the text file formats used by the command-line tool.
//!
//! Counting is generic over the [`Counter`] type and search scores over
//! [`num_traits::Float`]; [`Count`] and [`Score`] are the default choices.
//!
//! ```
//! use cdomain::{orderings, domain};
//!
//! let trs = orderings::alternating_trs(8);
//! assert_eq!(domain::size(&trs).unwrap(), 222);
//! ```

pub mod count;
pub mod domain;
pub mod error;
pub mod formats;
pub mod iso;
pub mod orderings;
pub mod search;
pub mod subsets;
pub mod types;

pub use count::Counter;
pub use error::{Error, Result};
pub use subsets::State;
pub use types::{ConstraintEntry, ConstraintList, Domain, KTuple, Law, LinearOrder, NeverRule, Pattern};

/// Default counter for domain sizes.
pub type Count = u64;

/// Default score type for searches.
pub type Score = f64;
