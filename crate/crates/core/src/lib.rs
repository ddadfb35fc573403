//! Precision limits for estimating an optical loss `α` with two-mode squeezed
//! light.
//!
//! The Gaussian layer ([`gaussian`]) propagates first and second moments
//! through squeezers and loss. On top of it sit the quantum Fisher
//! information of Gaussian families ([`qfi`]), exact photon-counting
//! statistics ([`counting`]), the time-reversal readout ([`su11`]), impurity
//! loss ([`resilience`]), a Monte Carlo maximum-likelihood lab
//! ([`estimator`]) and the sweep tables behind the plots ([`figures`]).
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common double-precision instantiations.
//!
//! ```
//! use tmsv_metrology::{qfi, LimitSchedule, QfiProblem, Squeezing64, TmsvLossFamily64};
//!
//! let family = TmsvLossFamily64 { squeezing: Squeezing64::from_nbar(10.0)?, phi: 0.0 };
//! let f = qfi(&QfiProblem::auto(&family, 0.05)?, &LimitSchedule::default())?;
//! assert!((f - 10.0 / (0.05 * 0.95)).abs() < 1e-6 * f);
//! # Ok::<(), tmsv_metrology::Error>(())
//! ```

pub mod counting;
pub mod error;
pub mod estimator;
pub mod figures;
pub mod gaussian;
pub mod linalg;
pub mod qfi;
pub mod resilience;
pub mod scalar;
pub mod squeezing;
pub mod su11;

pub use counting::{
    ancilla_bound, binomial_loss, fisher_information, fock_qfi, joint_distribution, mixture_fisher, standard_limit,
    tmsv_weights, JointCounting, JointPhotonDistribution, PhotonCorrelatedMixture, TmsvCoefficients,
};
pub use error::{Error, Result};
pub use estimator::{crlb_check, mle, sample_counts, CountRecord, CrlbReport, ExperimentConfig};
pub use gaussian::{Covariance, Displacement, GaussianState, Loss, Mode, Squeezer};
pub use linalg::Mat4;
pub use qfi::{
    qfi, qfi_with_displacement, CoherentLossFamily, DerivativeMode, LimitMethod, LimitSchedule, QfiProblem,
    StateFamily, Su11OutputFamily, TmsvLossFamily,
};
pub use resilience::{coherent_baseline, qfi_ratio_db, tr_sensitivity_with_loss, LossyProtocolConfig};
pub use scalar::Scalar;
pub use squeezing::Squeezing;
pub use su11::{Su11Coefficients, Su11Report};

pub type GaussianState64 = GaussianState<f64>;
pub type GaussianState32 = GaussianState<f32>;
pub type Squeezing64 = Squeezing<f64>;
pub type Squeezing32 = Squeezing<f32>;
pub type Squeezer64 = Squeezer<f64>;
pub type Loss64 = Loss<f64>;
pub type Mat4x64 = Mat4<f64>;
pub type TmsvLossFamily64 = TmsvLossFamily<f64>;
pub type Su11OutputFamily64 = Su11OutputFamily<f64>;
pub type LossyProtocolConfig64 = LossyProtocolConfig<f64>;
pub type TmsvCoefficients64 = TmsvCoefficients<f64>;
pub type JointPhotonDistribution64 = JointPhotonDistribution<f64>;
pub type Su11Coefficients64 = Su11Coefficients<f64>;
