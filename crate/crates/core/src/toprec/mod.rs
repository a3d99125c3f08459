//! Topological recursion on `x = z + 1/z`, `y = log z`.

pub mod curve;
pub mod form;
pub mod recursion;

pub use curve::{catalan_inverse, w01, w02_eval, w02_simplified, x_of_z};
pub use form::{Pole, PoleSum};
pub use recursion::{toprec_wgn, toprec_wgn_bounded, DEFAULT_BOUND};
pub mod expansion;
pub use expansion::{ns_check, wgn_x_expansion, ExpansionReport};
pub mod theta;
pub use theta::{eta, s_matrix, theta, theta_expansion_check, SMatrix, ThetaPrimitive};
pub mod primitive;
pub use primitive::{fgn_check, fgn_x_expansion, primitive_fgn, PrimitiveExpansionReport, PrimitiveReport};
pub mod ancestors;
pub use ancestors::{ancestor_decomposition, ancestor_descendant_check, primitive_from_ancestors, AncestorReport, AncestorTable};
pub mod unstable;
pub use unstable::{s0_s1_closed_forms, UnstableFormsReport};
