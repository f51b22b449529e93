//! Transfer of states between the end qubits of a spin-1/2 XY chain: the
//! transfer tensor of the line, sender-receiver correlation measures, and
//! their statistics over the initial-state parameters.
//!
//! The lower layers are generic over the real scalar; the aliases below fix it
//! to `f64`, which is what the statistics and analysis layers use.

pub mod analysis;
pub mod chain_evolution;
pub mod error;
pub mod measures;
pub mod scalar;
pub mod states;
pub mod statistics;
pub mod transfer_tensor;

pub use chain_evolution::{ChainSpec, HamiltonianKind};
pub use error::{Error, Result};
pub use scalar::Real;
pub use states::Angle;
pub use transfer_tensor::TIndex;

pub type TransferTensor = transfer_tensor::TransferTensor<f64>;
pub type ControlParams = states::ControlParams<f64>;
pub type QubitDensity = states::QubitDensity<f64>;
pub type BlochX = states::BlochX<f64>;
pub type ReceiverAffineMap = states::ReceiverAffineMap<f64>;
pub type Propagator = chain_evolution::Propagator<f64>;
pub type FreeFermionModes = chain_evolution::FreeFermionModes<f64>;
pub type DeterminantPair = measures::DeterminantPair<f64>;
