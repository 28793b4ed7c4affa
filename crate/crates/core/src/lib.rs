//! Exact invariants of the tower `M_0 ⊂ M_1 ⊂ ...` of moduli spaces of
//! Calabi-Yau hypersurface pairs built from the Sylvester sequence.

pub mod error;
pub mod fibers;
pub mod hodge;
pub mod linalg;
pub mod lp;
pub mod moduli;
pub mod newton;
pub mod poly;
pub mod rational;
pub mod sylvester;
pub mod toric;
pub mod unipoly;

pub use error::{Error, Result};
pub use moduli::ModuliPoint;
pub use poly::MultiPoly;
pub use sylvester::{ExponentTuple, SylvesterContext};
pub use unipoly::UniPoly;
