//! Extra loss `α₀` on both beams before the sample.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::gaussian::{GaussianState, Loss, Mode, Squeezer};
use crate::linalg::{Mat4, C};
use crate::qfi::{
    correlated_derivative, difference_step, qfi, qfi_displaced_family, CoherentLossFamily, LimitSchedule, QfiProblem,
    StateFamily,
};
use crate::scalar::Scalar;
use crate::squeezing::Squeezing;

/// Source photons per beam `nbar`, sample loss `alpha` and impurity loss
/// `alpha0` applied equally to both beams.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossyProtocolConfig<T> {
    squeezing: Squeezing<T>,
    alpha: T,
    alpha0: T,
    phi: T,
}

impl<T: Scalar> LossyProtocolConfig<T> {
    pub fn new(nbar: T, alpha: T, alpha0: T, phi: T) -> Result<Self> {
        let squeezing = Squeezing::from_nbar(nbar)?;
        if !(alpha > T::zero() && alpha < T::one()) {
            return invalid("alpha", alpha.to_f64_lossy(), "sample loss must lie strictly inside (0, 1)");
        }
        if !(alpha0 >= T::zero() && alpha0 <= T::one()) {
            return invalid("alpha0", alpha0.to_f64_lossy(), "extra loss must lie in [0, 1]");
        }
        if !phi.is_finite() {
            return invalid("phi", phi.to_f64_lossy(), "phase must be finite");
        }
        Ok(Self {
            squeezing,
            alpha,
            alpha0,
            phi,
        })
    }

    pub fn nbar(&self) -> T {
        self.squeezing.nbar()
    }

    pub fn r(&self) -> T {
        self.squeezing.r()
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn alpha0(&self) -> T {
        self.alpha0
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn family(&self) -> LossyTmsvFamily<T> {
        LossyTmsvFamily {
            squeezing: self.squeezing,
            phi: self.phi,
            alpha0: self.alpha0,
        }
    }
}

/// Two-mode squeezed vacuum, impurity loss on both beams, then the sample on the probe.
#[derive(Clone, Copy, Debug)]
pub struct LossyTmsvFamily<T> {
    pub squeezing: Squeezing<T>,
    pub phi: T,
    pub alpha0: T,
}

impl<T: Scalar> LossyTmsvFamily<T> {
    fn before_sample(&self) -> Result<GaussianState<T>> {
        let sq = Squeezer::forward(self.squeezing.r(), self.phi)?;
        Ok(GaussianState::vacuum()
            .squeeze(&sq)
            .lose(&Loss::new(Mode::Probe, self.alpha0)?)
            .lose(&Loss::new(Mode::Ancilla, self.alpha0)?))
    }
}

impl<T: Scalar> StateFamily<T> for LossyTmsvFamily<T> {
    fn state(&self, alpha: T) -> Result<GaussianState<T>> {
        Ok(self.before_sample()?.lose(&Loss::new(Mode::Probe, alpha)?))
    }

    fn dsigma(&self, alpha: T) -> Option<Mat4<T>> {
        let kept = T::one() - self.alpha0;
        let dna = -kept * self.squeezing.nbar();
        let dpair: C<T> = Complex::from_polar(
            -kept * self.squeezing.sinh_cosh() / (T::two() * (T::one() - alpha).sqrt()),
            self.phi,
        );
        Some(correlated_derivative(dna, T::zero(), dpair))
    }
}

pub fn lossy_tmsv_state<T: Scalar>(config: &LossyProtocolConfig<T>) -> Result<GaussianState<T>> {
    config.family().state(config.alpha)
}

/// QFI of the lossy squeezed-vacuum probe.
pub fn lossy_tmsv_qfi<T: Scalar>(config: &LossyProtocolConfig<T>) -> Result<T> {
    let family = config.family();
    qfi(&QfiProblem::auto(&family, config.alpha)?, &LimitSchedule::default())
}

/// QFI of a coherent probe with the same source photons and impurity loss.
pub fn lossy_coherent_qfi<T: Scalar>(config: &LossyProtocolConfig<T>) -> Result<T> {
    let family = CoherentLossFamily {
        beta: Complex::from(config.nbar().sqrt()),
        extra_loss: config.alpha0,
    };
    qfi_displaced_family(&QfiProblem::auto(&family, config.alpha)?, &LimitSchedule::default())
}

/// `10 log₁₀(F_TMSV / F_coherent)`; 0 dB when both informations vanish.
pub fn qfi_ratio_db<T: Scalar>(config: &LossyProtocolConfig<T>) -> Result<T> {
    let squeezed = lossy_tmsv_qfi(config)?;
    let coherent = lossy_coherent_qfi(config)?;
    let floor = T::min_positive_value().sqrt();
    if coherent <= floor {
        if squeezed <= floor {
            return Ok(T::zero());
        }
        return Err(Error::NotEstimable("coherent reference carries no information"));
    }
    Ok(T::lit(10.0) * (squeezed / coherent).log10())
}

/// Total output photons of the time-reversal readout after impurity loss.
pub fn tr_output_state<T: Scalar>(config: &LossyProtocolConfig<T>, alpha: T) -> Result<GaussianState<T>> {
    let sq = Squeezer::forward(config.r(), config.phi)?;
    Ok(config.family().state(alpha)?.squeeze(&sq.inverse()))
}

/// `Δα = ΔN_out / |dN̄_out/dα|` for the time-reversal readout with impurity
/// loss; the slope is a central difference in `α`.
pub fn tr_sensitivity_with_loss<T: Scalar>(config: &LossyProtocolConfig<T>) -> Result<T> {
    let alpha = config.alpha;
    let h = difference_step(alpha).min(alpha * T::half()).min((T::one() - alpha) * T::half());
    let moments = tr_output_state(config, alpha)?.photon_number_moments();
    let up = tr_output_state(config, alpha + h)?.photon_number_moments().mean;
    let down = tr_output_state(config, alpha - h)?.photon_number_moments().mean;
    let slope = (up - down) / (T::two() * h);
    if !slope.is_finite() {
        return Err(Error::NonFiniteDerivative);
    }
    if slope == T::zero() {
        return Err(Error::NotEstimable("output photon number does not depend on the loss"));
    }
    Ok(moments.variance.max(T::zero()).sqrt() / slope.abs())
}

/// Coherent-probe precision `√((1−α)/((1−α₀)n̄))`.
pub fn coherent_baseline<T: Scalar>(config: &LossyProtocolConfig<T>) -> Result<T> {
    let reaching = (T::one() - config.alpha0) * config.nbar();
    if !(reaching > T::zero()) {
        return Err(Error::NotEstimable("no photons reach the sample"));
    }
    Ok(((T::one() - config.alpha) / reaching).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfi::{dsigma_dalpha, DerivativeMode};
    use crate::su11;
    use approx::assert_relative_eq;

    fn cfg(nbar: f64, alpha: f64, alpha0: f64) -> LossyProtocolConfig<f64> {
        LossyProtocolConfig::new(nbar, alpha, alpha0, 0.0).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(LossyProtocolConfig::new(-1.0, 0.5, 0.0, 0.0).is_err());
        assert!(LossyProtocolConfig::new(1.0, 0.0, 0.0, 0.0).is_err());
        assert!(LossyProtocolConfig::new(1.0, 0.5, 1.1, 0.0).is_err());
        assert!(LossyProtocolConfig::new(1.0, 0.5, 1.0, 0.0).is_ok());
    }

    #[test]
    fn no_extra_loss_is_plain_tmsv() {
        let c = cfg(10.0, 0.05, 0.0);
        let a = lossy_tmsv_state(&c).unwrap();
        let b = crate::gaussian::tmsv_after_loss(c.r(), 0.0, 0.05).unwrap();
        assert!(a.covariance().matrix().max_abs_diff(b.covariance().matrix()) < 1e-12);
        assert_relative_eq!(lossy_tmsv_qfi(&c).unwrap(), 10.0 / (0.05 * 0.95), max_relative = 1e-6);
    }

    #[test]
    fn total_extra_loss_leaves_vacuum() {
        let c = cfg(7.0, 0.3, 1.0);
        let s = lossy_tmsv_state(&c).unwrap();
        assert!(s.covariance().matrix().max_abs_diff(&Mat4::identity()) < 1e-12);
        assert_eq!(lossy_tmsv_qfi(&c).unwrap(), 0.0);
        assert_eq!(qfi_ratio_db(&c).unwrap(), 0.0);
        assert!(coherent_baseline(&c).is_err());
    }

    #[test]
    fn probe_photons_before_sample() {
        let c = cfg(25.0, 0.05, 0.25);
        let s = c.family().before_sample().unwrap();
        assert_relative_eq!(s.mean_photons(Mode::Probe), 18.75, max_relative = 1e-12);
    }

    #[test]
    fn analytic_derivative_matches_difference() {
        let fam = cfg(25.0, 0.3, 0.25).family();
        let a = dsigma_dalpha(&QfiProblem::new(&fam, 0.3, DerivativeMode::Analytic).unwrap(), 0.3).unwrap();
        let d = dsigma_dalpha(&QfiProblem::new(&fam, 0.3, DerivativeMode::CentralDifference).unwrap(), 0.3).unwrap();
        assert!(a.max_abs_diff(&d) < 1e-6);
    }

    #[test]
    fn ratio_without_extra_loss() {
        for nbar in [1.0, 10.0, 25.0] {
            let db = qfi_ratio_db(&cfg(nbar, 0.05, 0.0)).unwrap();
            assert!((db - 10.0 * (1.0f64 / 0.05).log10()).abs() < 0.01, "{db}");
        }
    }

    #[test]
    fn extra_loss_landmark_value() {
        // Fock-space SLD evaluation of the same configuration gives 2.9945 dB.
        let db = qfi_ratio_db(&cfg(25.0, 0.05, 0.25)).unwrap();
        assert!((db - 2.9945).abs() < 1e-3, "{db}");
    }

    #[test]
    fn ratio_non_increasing_in_extra_loss() {
        let mut last = f64::INFINITY;
        for k in 0..=90 {
            let db = qfi_ratio_db(&cfg(25.0, 0.05, k as f64 / 100.0)).unwrap();
            assert!(db <= last + 1e-6, "k {k}");
            last = db;
        }
    }

    #[test]
    fn ratio_turns_back_toward_zero_db() {
        // Both informations approach the Poisson value once few photons survive.
        // Reference QFIs from a truncated Fock-space SLD computation.
        for (a0, fock) in [(0.8, 0.199_777_878_257), (0.9, 0.099_400_041_002), (0.95, 0.050_692_648_356)] {
            let q = lossy_tmsv_qfi(&cfg(1.0, 0.05, a0)).unwrap();
            assert_relative_eq!(q, fock, max_relative = 1e-6);
        }
        let mid = qfi_ratio_db(&cfg(10.0, 0.05, 0.86)).unwrap();
        let late = qfi_ratio_db(&cfg(10.0, 0.05, 0.95)).unwrap();
        assert!(mid < late && late < 0.0);
    }

    #[test]
    fn baseline_matches_displacement_qfi() {
        for (n, a, a0) in [(10.0, 0.05, 0.0), (25.0, 0.05, 0.25), (4.0, 0.6, 0.5)] {
            let c = cfg(n, a, a0);
            let closed = coherent_baseline(&c).unwrap();
            let numeric = 1.0 / lossy_coherent_qfi(&c).unwrap().sqrt();
            assert_relative_eq!(closed, numeric, max_relative = 1e-8);
        }
        assert_relative_eq!(coherent_baseline(&cfg(10.0, 0.05, 0.0)).unwrap(), 0.308_220_700_148_448_8, max_relative = 1e-12);
        assert_relative_eq!(
            coherent_baseline(&cfg(10.0, 0.05, 0.5)).unwrap(),
            2f64.sqrt() * coherent_baseline(&cfg(10.0, 0.05, 0.0)).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn reduces_to_time_reversal_protocol() {
        for (n, a) in [(10.0, 0.05), (1.0, 0.3), (25.0, 0.01), (5.0, 0.8)] {
            let c = cfg(n, a, 0.0);
            let x = tr_sensitivity_with_loss(&c).unwrap();
            let y = su11::sensitivity(c.r(), a).unwrap();
            assert!((x - y).abs() / y < 1e-6, "n {n} a {a}: {x} {y}");
        }
    }

    #[test]
    fn time_reversal_beats_coherent_with_matched_impurity() {
        for k in 0..=20 {
            let c = cfg(5.0 + k as f64, 0.05, 0.05);
            assert!(tr_sensitivity_with_loss(&c).unwrap() < coherent_baseline(&c).unwrap());
        }
    }

    #[test]
    fn heavy_impurity_degrades_time_reversal() {
        let clean = tr_sensitivity_with_loss(&cfg(10.0, 0.05, 0.0)).unwrap();
        let dirty = tr_sensitivity_with_loss(&cfg(10.0, 0.05, 0.9)).unwrap();
        assert!(dirty > clean);
    }

    #[test]
    fn slope_matches_pushed_forward_derivative() {
        // dN̄/dα from the analytic ∂σ carried through the reversed squeezer.
        let c = cfg(10.0, 0.05, 0.3);
        let fam = c.family();
        let s = Squeezer::forward(c.r(), 0.0).unwrap().inverse().bogoliubov();
        let d = s * fam.dsigma(0.05).unwrap() * s.adjoint();
        let slope = (d[(0, 0)].re + d[(1, 1)].re) / 2.0;
        let h = 1e-6;
        let up = tr_output_state(&c, 0.05 + h).unwrap().photon_number_moments().mean;
        let down = tr_output_state(&c, 0.05 - h).unwrap().photon_number_moments().mean;
        assert_relative_eq!((up - down) / (2.0 * h), slope, max_relative = 1e-7);
    }
}
