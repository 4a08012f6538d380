//! L² torsion machinery over finite-dimensional von Neumann algebras.

pub mod complex;
pub mod det_line;
pub mod error;
pub mod forms;
pub mod hyperbolic;
pub mod instances;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod vn;
pub mod zeta;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = scalar::C<f64>;
pub type Matrix = linalg::CMatrix<f64>;
pub type Algebra = vn::Algebra<f64>;
pub type Module = vn::Module<f64>;
pub type CommutantOp = vn::CommutantOp<f64>;
pub type SpectralTolerances = vn::SpectralTolerances<f64>;
pub type SpectralDensity = vn::SpectralDensity<f64>;
pub type FkDeterminant = vn::FkDeterminant<f64>;
pub type DetLineElement = det_line::DetLineElement<f64>;
pub type GradedDetLine = det_line::GradedDetLine<f64>;
pub type Holonomy = det_line::Holonomy<f64>;
pub type FiniteComplex = complex::FiniteComplex<f64>;
pub type MetricFamily = complex::MetricFamily<f64>;
pub type HodgeProjectors = complex::HodgeProjectors<f64>;
pub type ThetaSeries = zeta::ThetaSeries<f64>;
pub type TorsionElement = zeta::TorsionElement<f64>;
pub type TorsionPoint = zeta::TorsionPoint<f64>;
pub type VariationReport = zeta::VariationReport<f64>;
pub type RelativeTorsion = zeta::RelativeTorsion<f64>;
pub type QuadratureSpec = hyperbolic::QuadratureSpec<f64>;
pub type QuadratureResult = hyperbolic::QuadratureResult<f64>;
pub type FormElement = forms::FormElement<f64>;
pub type FormMatrix = forms::FormMatrix<f64>;
pub type AdiabaticDensity = forms::AdiabaticDensity<f64>;
