//! Alias-free resampling building blocks and diffusion samplers.
//!
//! - [`special`]: `J₁`, `I₀` and `jinc`.
//! - [`filter`]: Kaiser-windowed jinc kernels.
//! - [`resample`]: convolution and naive / filtered 2× resampling.
//! - [`activation`]: pointwise nonlinearities and their oversampled wrapper.
//! - [`rotation`]: center rotation with bilinear sampling.
//! - [`diffusion`]: noise schedule, training objective and reverse samplers.
//! - [`spectral`]: DFT measurements and pipeline configurations.
//! - [`io`]: binary PGM/PPM.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod activation;
pub mod diffusion;
pub mod error;
pub mod filter;
pub mod io;
pub mod resample;
pub mod rng;
pub mod rotation;
pub mod special;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
pub use filter::{design_kernel, FilterSpec, Kernel2D};
pub use resample::PaddingMode;
pub use rng::Rng;
pub use tensor::{ImageTensor, Shape};
