//! Typed syntax with binding and reduction, generated from 2-signatures.
//!
//! A [`TwoSignature`] lists sort constructors, term arities of some degree
//! (constructors that may bind variables and are parameterised by sort
//! variables) and reduction rules written as templates. From it the crate
//! derives well-sorted de Bruijn terms with substitution ([`syntax`]), the
//! reduction preorder generated by the rules ([`reduction`]), and
//! translations into other languages given a representation of every
//! arity ([`representation`]).
//!
//! ```
//! use twosig::lang_std;
//! use twosig::syntax::{text::{parse_term, print_term, Notation}, Context};
//!
//! let pcf = lang_std::pcf();
//! let rep = lang_std::pcf_to_ulc_representation();
//! let t = parse_term(&pcf, &Context::empty(), "ttt", Notation::Plain).unwrap();
//! let u = rep.translate(&Context::empty(), &t).unwrap();
//! assert_eq!(print_term(&u, Notation::Paper), "Abs (Abs 2)");
//! ```

pub mod cli;
pub mod lang_std;
pub mod laws;
pub mod reduction;
pub mod representation;
pub mod signature;
pub mod syntax;

pub use reduction::{normalize, reduces_to, step_all, Bounds, Reach, ReductionStep, Trace};
pub use representation::Representation;
pub use signature::{validate_signature, Language, TwoSignature};
pub use syntax::{subst, subst_one, typecheck, Context, Sort, Term};
