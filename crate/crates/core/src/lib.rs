//! Exact computations with the bigraded Steenrod algebra of syntomic cohomology:
//! admissible normal forms and the dual, Poincaré-duality rings with Steenrod actions,
//! Stiefel–Whitney and Wu calculus, chain-level Bocksteins and power operations,
//! and graded F-gauge modules over W(k)[u,t]/(ut−p).

pub mod scalar;
pub mod steenrod;
pub mod dual;
pub mod linalg;
pub mod action;
pub mod charclass;
pub mod bockstein;
pub mod fgauge;
