//! Bath spectra, thermal weights, CKD coupling constants and chaos
//! diagnostics.

mod coupling;
mod diag;
mod lanczos;
mod nnsd;
mod thermal;

pub use coupling::{coupling_diagonals, offdiag_suppression, CkdEnsemble, CouplingDiagonals, DEGENERACY_TOL};
pub use diag::{diagonalize_bath, diagonalize_bath_with, full_spectrum, BathSpectrum, EigenMethod};
pub use lanczos::{lanczos_lowest, LanczosOptions};
pub use nnsd::{nnsd, poisson_pdf, unfolded_spacings, wigner_surmise, NnsdHistogram, NNSD_BINS, NNSD_MAX_SPACING, UNFOLDING_WINDOW};
pub use thermal::{thermal_populations, ThermalWeights};
