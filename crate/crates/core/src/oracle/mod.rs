//! Independent reference implementations used to validate the production
//! code paths. Slow and simple on purpose.

mod dense;
mod quadrature;
mod racah;

pub use dense::{dense_expm_i, dense_train};
pub use quadrature::{
    caseb_element_product_basis, cos2beta_element_quadrature, gauss_legendre, spherical_harmonic,
};
pub use racah::{racah_3j_naive, racah_6j_naive};
