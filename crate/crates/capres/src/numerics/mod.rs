//! Quadrature, special functions, contour integration, circle Fourier
//! analysis and test-function factories shared by the other modules.

pub mod bessel;
pub mod contour;
pub mod fourier;
pub mod pw;
pub mod quadrature;
pub mod testfn;

pub use bessel::{bessel_j, bessel_j_integral};
pub use contour::{contour_integrate, residue_on_circle, Contour, ContourKind, Orientation};
pub use fourier::{circle_fourier, FourierCoeffs};
pub use pw::{make_even_pw, EvenPWFunction};
pub use quadrature::{gauss_legendre, integrate_1d, FixedRule, QuadratureConfig};
pub use testfn::{make_bump_at, make_bump_radial, mollifier, smooth_step, Parity, TestFunction2D};
