//! Geometry and algebra of diagonal Hopf manifolds.
//!
//! - [`manifold`]: contraction data, the potential and the fundamental domain.
//! - [`forms`]: pointwise (1,1)-form algebra and finite-difference exterior calculus.
//! - [`lck`]: the locally conformally Kähler structure in closed form.
//! - [`moment`]: the holomorphic flow and the moment-map identity.
//! - [`bundles`]: degree integrals, the weight bundle and the admissibility series.
//! - [`equivariant`]: torus weights, graded monomial modules and their filtrations.

pub mod bundles;
pub mod equivariant;
pub mod forms;
pub mod lck;
pub mod manifold;
pub mod moment;
