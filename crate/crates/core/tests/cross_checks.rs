use approx::assert_relative_eq;
use tmsv_metrology::counting::{fisher_information, DEFAULT_TAIL_TOL};
use tmsv_metrology::qfi::{qfi_displaced_family, FnFamily};
use tmsv_metrology::*;

#[test]
fn counting_and_gaussian_qfi_agree() {
    for (nbar, alpha) in [(0.5, 0.2), (3.0, 0.05), (12.0, 0.4)] {
        let s = Squeezing64::from_nbar(nbar).unwrap();
        let counting = fisher_information(&JointCounting::tmsv(&tmsv_weights(s.r(), DEFAULT_TAIL_TOL).unwrap()), alpha).unwrap();
        let family = TmsvLossFamily64 { squeezing: s, phi: 0.4 };
        let gaussian = qfi(&QfiProblem::auto(&family, alpha).unwrap(), &LimitSchedule::default()).unwrap();
        assert_relative_eq!(counting, gaussian, max_relative = 1e-8);
    }
}

#[test]
fn channel_list_matches_builder_calls() {
    let fwd = Squeezer64::forward(0.9, 0.2).unwrap();
    let steps = [
        gaussian::ChannelStep::Squeeze(fwd),
        gaussian::ChannelStep::Loss(Loss64::new(Mode::Probe, 0.3).unwrap()),
        gaussian::ChannelStep::Squeeze(fwd.inverse()),
    ];
    let a = GaussianState64::vacuum().apply_all(&steps);
    let b = Su11OutputFamily64 { squeezing: Squeezing64::from_r(0.9).unwrap(), phi: 0.2 }.state(0.3).unwrap();
    assert!(a.covariance().matrix().max_abs_diff(b.covariance().matrix()) < 1e-12);
}

#[test]
fn coherent_probe_through_generic_family() {
    let family = FnFamily(|a: f64| {
        Ok(GaussianState64::coherent(num_complex::Complex::new(3.0, -1.0)).lose(&Loss64::new(Mode::Probe, a)?))
    });
    let p = QfiProblem::new(&family, 0.25, DerivativeMode::CentralDifference).unwrap();
    let f = qfi_displaced_family(&p, &LimitSchedule::default()).unwrap();
    assert_relative_eq!(f, 10.0 / 0.75, max_relative = 1e-7);
}

#[test]
fn single_precision_pipeline() {
    let family = TmsvLossFamily { squeezing: Squeezing32::from_nbar(4.0).unwrap(), phi: 0.0 };
    let f = qfi(&QfiProblem::auto(&family, 0.2f32).unwrap(), &LimitSchedule::default()).unwrap();
    assert!((f - 25.0).abs() / 25.0 < 1e-3, "{f}");
    let s = su11::sensitivity(Squeezing32::from_nbar(10.0).unwrap().r(), 0.05f32).unwrap();
    let d = su11::sensitivity(Squeezing64::from_nbar(10.0).unwrap().r(), 0.05f64).unwrap();
    assert!((s as f64 - d).abs() / d < 1e-4);
}
