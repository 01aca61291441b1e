//! Baer invariants of two-generator abelian groups for the varieties of
//! nilpotent groups, and the (non-)existence of their stem covers.
//!
//! * [`hall`]: basic commutators and Witt counts.
//! * [`collect`]: the free nilpotent group `F_k / gamma_{w+1}` in Hall normal form.
//! * [`lattice`]: Smith normal form and finitely generated abelian groups.
//! * [`baer`]: the invariant `N_cM(Z_r + Z_s)` by formula and by computation.
//! * [`fingroup`]: finite groups from tables and power-commutator presentations.
//! * [`cover`]: stem-cover verdicts, the class-1 construction, exhaustive search.

pub mod baer;
pub mod collect;
pub mod cover;
pub mod error;
pub mod fingroup;
pub mod hall;
pub mod lattice;

pub use baer::{baer_engine, baer_formula, BaerEngine, BaerInput};
pub use collect::{make_context, NilElement, NilGroupCtx};
pub use cover::{exhaustive_search, stem_cover_verdict, CoverVerdict, Verdict};
pub use error::{Error, Result};
pub use fingroup::{FiniteGroup, Pcp, Subgroup};
pub use hall::{generate_hall_basis, witt_count, HallBasis};
pub use lattice::{smith_normal_form, AbelianType, IntMatrix};
