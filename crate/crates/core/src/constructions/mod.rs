//! The network compiler: every explicit construction, with exact dyadic
//! weights, and the network algebra used to assemble them.

mod algebra;
mod draft;
mod hat;
mod product;
mod sawtooth;

pub use algebra::{add_affine, compose_shift, net_add, net_compose_modified, skip_to_mlp};
pub use hat::{
    build_fem2d, build_fem2d_with, build_hat2d, build_hat2d_unguarded, build_psi_ell,
    fem_to_placements, HatPlacement, HAT_WIDTH,
};
pub use product::{
    build_monomial, build_polynomial, build_polynomial_with, build_xy_hat, Monomial, Polynomial,
    MONOMIAL_WIDTH,
};
pub use sawtooth::{build_g, build_g_ell, build_relu1, build_x2_hat};
