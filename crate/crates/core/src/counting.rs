//! Photon-counting statistics of the two-mode squeezed probe and their
//! classical Fisher information.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::linalg::C;
use crate::scalar::Scalar;
use crate::squeezing::Squeezing;

/// Outcomes with probability below this are left out of Fisher sums.
pub const PROBABILITY_FLOOR: f64 = 1e-300;
/// Largest tolerated gap between the declared and the summed mass.
pub const MASS_DEFICIT_TOL: f64 = 1e-9;
/// Default geometric-tail tolerance for truncating photon-number sums.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
const LOG_DOMAIN_ABOVE: usize = 50;

/// Fock expansion `c_n = e^{inφ} tanhⁿr / cosh r` of the two-mode squeezed
/// vacuum, truncated where the geometric tail becomes negligible.
#[derive(Clone, Debug, PartialEq)]
pub struct TmsvCoefficients<T> {
    r: T,
    phi: T,
    weights: Vec<T>,
    tail_mass: T,
    tail_mean: T,
}

impl<T: Scalar> TmsvCoefficients<T> {
    pub fn r(&self) -> T {
        self.r
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    /// `|c_n|²` for `n = 0..=n_max`.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn n_max(&self) -> usize {
        self.weights.len() - 1
    }

    /// Probability carried by `n > n_max`.
    pub fn tail_mass(&self) -> T {
        self.tail_mass
    }

    /// `Σ_{n>n_max} n|c_n|²`.
    pub fn tail_mean(&self) -> T {
        self.tail_mean
    }

    pub fn amplitude(&self, n: usize) -> C<T> {
        let tanh = self.r.tanh();
        Complex::from_polar(tanh.powi(n as i32) / self.r.cosh(), self.phi * T::from_count(n as u64))
    }

    /// Mean photon number of the retained weights.
    pub fn truncated_mean(&self) -> T {
        self.weights
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (m, w)| acc + T::from_count(m as u64) * *w)
    }
}

/// Photon-number weights with `φ = 0`.
pub fn tmsv_weights<T: Scalar>(r: T, tail_tol: T) -> Result<TmsvCoefficients<T>> {
    tmsv_coefficients(r, T::zero(), tail_tol)
}

/// Picks the smallest `n_max` for which both the tail mass `t^{N+1}` and the
/// tail mean `t^{N+1}(N+1 + t/(1−t))` fall below `tail_tol`, `t = tanh²r`.
pub fn tmsv_coefficients<T: Scalar>(r: T, phi: T, tail_tol: T) -> Result<TmsvCoefficients<T>> {
    let s = Squeezing::from_r(r)?;
    if !(tail_tol > T::zero()) {
        return invalid("tail_tol", tail_tol.to_f64_lossy(), "tail tolerance must be positive");
    }
    let t = s.tanh2();
    let head = T::one() / s.cosh2();
    if t == T::zero() {
        return Ok(TmsvCoefficients {
            r,
            phi,
            weights: vec![T::one()],
            tail_mass: T::zero(),
            tail_mean: T::zero(),
        });
    }
    let excess = t / head;
    let tail = |n: usize| t.powi(n as i32 + 1);
    let tail_mean = |n: usize| tail(n) * (T::from_count(n as u64 + 1) + excess);
    let start = (tail_tol.ln() / t.ln()).floor().to_usize().unwrap_or(0).saturating_sub(1);
    let mut n = start;
    while n > 0 && tail(n - 1) < tail_tol && tail_mean(n - 1) < tail_tol {
        n -= 1;
    }
    while !(tail(n) < tail_tol && tail_mean(n) < tail_tol) {
        n += 1;
    }
    let weights = (0..=n).map(|m| head * t.powi(m as i32)).collect();
    Ok(TmsvCoefficients {
        r,
        phi,
        weights,
        tail_mass: tail(n),
        tail_mean: tail_mean(n),
    })
}

/// Distribution of surviving photons `n` when `m` photons cross a sample
/// with loss fraction `alpha`.
pub fn binomial_loss<T: Scalar>(m: usize, alpha: T) -> Result<Vec<T>> {
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return invalid("alpha", alpha.to_f64_lossy(), "loss fraction must lie in [0, 1]");
    }
    let mut p = vec![T::zero(); m + 1];
    if alpha == T::zero() {
        p[m] = T::one();
        return Ok(p);
    }
    if alpha == T::one() {
        p[0] = T::one();
        return Ok(p);
    }
    let keep = T::one() - alpha;
    if m <= LOG_DOMAIN_ABOVE {
        let mut binom = T::one();
        for (n, slot) in p.iter_mut().enumerate() {
            if n > 0 {
                binom = binom * T::from_count((m - n + 1) as u64) / T::from_count(n as u64);
            }
            *slot = binom * keep.powi(n as i32) * alpha.powi((m - n) as i32);
        }
        return Ok(p);
    }
    let (ln_keep, ln_alpha) = (keep.ln(), alpha.ln());
    let mut ln_binom = T::zero();
    for (n, slot) in p.iter_mut().enumerate() {
        if n > 0 {
            ln_binom = ln_binom + (T::from_count((m - n + 1) as u64) / T::from_count(n as u64)).ln();
        }
        *slot = (ln_binom + T::from_count(n as u64) * ln_keep + T::from_count((m - n) as u64) * ln_alpha).exp();
    }
    Ok(p)
}

/// Joint counts `p_{nm}`: `m` ancilla photons and `n ≤ m` surviving probe photons.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPhotonDistribution<T> {
    rows: Vec<Vec<T>>,
    alpha: T,
    tail_mass: T,
}

impl<T: Scalar> JointPhotonDistribution<T> {
    /// Builds `p_{nm} = w_m p_n^{(m)}` from pair-number weights `w_m`.
    pub fn from_pair_weights(weights: &[T], tail_mass: T, alpha: T) -> Result<Self> {
        if !(alpha >= T::zero() && alpha <= T::one()) {
            return invalid("alpha", alpha.to_f64_lossy(), "loss fraction must lie in [0, 1]");
        }
        let rows = weights
            .par_iter()
            .enumerate()
            .map(|(m, &w)| binomial_loss(m, alpha).map(|row| row.into_iter().map(|p| w * p).collect()))
            .collect::<Result<Vec<Vec<T>>>>()?;
        Ok(Self { rows, alpha, tail_mass })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn tail_mass(&self) -> T {
        self.tail_mass
    }

    pub fn m_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// `p_{nm}`; zero when `n > m` or outside the table.
    pub fn get(&self, n: usize, m: usize) -> T {
        self.rows.get(m).and_then(|row| row.get(n)).copied().unwrap_or(T::zero())
    }

    /// Row `m`: `p_{0m}, …, p_{mm}`.
    pub fn row(&self, m: usize) -> &[T] {
        &self.rows[m]
    }

    pub fn total_mass(&self) -> T {
        self.rows.iter().flatten().fold(T::zero(), |a, &p| a + p)
    }

    /// `Σ_n p_{nm}`.
    pub fn ancilla_marginal(&self, m: usize) -> T {
        self.rows[m].iter().fold(T::zero(), |a, &p| a + p)
    }

    pub fn mean_probe_photons(&self) -> T {
        self.rows.iter().fold(T::zero(), |acc, row| {
            row.iter()
                .enumerate()
                .fold(acc, |a, (n, &p)| a + T::from_count(n as u64) * p)
        })
    }

    /// All table entries in row-major `(m, n)` order.
    pub fn flatten(&self) -> Vec<T> {
        self.rows.iter().flatten().copied().collect()
    }
}

pub fn joint_distribution<T: Scalar>(coeffs: &TmsvCoefficients<T>, alpha: T) -> Result<JointPhotonDistribution<T>> {
    JointPhotonDistribution::from_pair_weights(&coeffs.weights, coeffs.tail_mass, alpha)
}

/// A parametric family of discrete outcome distributions.
pub trait OutcomeModel<T: Scalar>: Sync {
    fn probabilities(&self, alpha: T) -> Result<Vec<T>>;

    /// Closed-form `dP_j/dα` in the same order as [`probabilities`](Self::probabilities).
    fn derivatives(&self, _alpha: T) -> Option<Vec<T>> {
        None
    }

    /// Probability mass known to lie outside the returned outcomes.
    fn tail_mass(&self) -> T {
        T::zero()
    }
}

/// Adapts a closure into an [`OutcomeModel`].
pub struct FnModel<F>(pub F);

impl<T, F> OutcomeModel<T> for FnModel<F>
where
    T: Scalar,
    F: Fn(T) -> Result<Vec<T>> + Sync,
{
    fn probabilities(&self, alpha: T) -> Result<Vec<T>> {
        (self.0)(alpha)
    }
}

/// Joint photon counting on a probe/ancilla pair with given pair-number weights.
#[derive(Clone, Debug)]
pub struct JointCounting<T> {
    weights: Vec<T>,
    tail_mass: T,
}

impl<T: Scalar> JointCounting<T> {
    pub fn tmsv(coeffs: &TmsvCoefficients<T>) -> Self {
        Self {
            weights: coeffs.weights.clone(),
            tail_mass: coeffs.tail_mass,
        }
    }

    pub fn mixture(mixture: &PhotonCorrelatedMixture<T>) -> Self {
        Self {
            weights: mixture.weights.clone(),
            tail_mass: T::zero(),
        }
    }

    pub fn distribution(&self, alpha: T) -> Result<JointPhotonDistribution<T>> {
        JointPhotonDistribution::from_pair_weights(&self.weights, self.tail_mass, alpha)
    }
}

impl<T: Scalar> OutcomeModel<T> for JointCounting<T> {
    fn probabilities(&self, alpha: T) -> Result<Vec<T>> {
        Ok(self.distribution(alpha)?.flatten())
    }

    // dp_{nm}/dα = p_{nm}·((m−n)/α − n/(1−α))
    fn derivatives(&self, alpha: T) -> Option<Vec<T>> {
        if !(alpha > T::zero() && alpha < T::one()) {
            return None;
        }
        let table = self.distribution(alpha).ok()?;
        let keep = T::one() - alpha;
        let mut out = Vec::with_capacity(table.rows.iter().map(Vec::len).sum());
        for (m, row) in table.rows.iter().enumerate() {
            for (n, &p) in row.iter().enumerate() {
                let g = T::from_count((m - n) as u64) / alpha - T::from_count(n as u64) / keep;
                out.push(p * g);
            }
        }
        Some(out)
    }

    fn tail_mass(&self) -> T {
        self.tail_mass
    }
}

/// Classical Fisher information with bookkeeping of dropped outcomes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FisherReport<T> {
    pub value: T,
    /// Outcomes skipped for falling below [`PROBABILITY_FLOOR`].
    pub dropped_outcomes: usize,
    pub dropped_mass: T,
}

/// `F(α) = Σ_j (dP_j/dα)² / P_j`.
pub fn fisher_information<T: Scalar>(model: &dyn OutcomeModel<T>, alpha: T) -> Result<T> {
    fisher_information_report(model, alpha).map(|r| r.value)
}

pub fn fisher_information_report<T: Scalar>(model: &dyn OutcomeModel<T>, alpha: T) -> Result<FisherReport<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return invalid("alpha", alpha.to_f64_lossy(), "Fisher information is evaluated strictly inside (0, 1)");
    }
    let p = model.probabilities(alpha)?;
    check_distribution(&p, model.tail_mass())?;
    let dp = match model.derivatives(alpha) {
        Some(d) => d,
        None => {
            let h = T::lit(1e-7) * alpha.max(T::one());
            let plus = model.probabilities(alpha + h)?;
            let minus = model.probabilities(alpha - h)?;
            if plus.len() != p.len() || minus.len() != p.len() {
                return Err(Error::InvalidDistribution("outcome count changes with alpha".into()));
            }
            plus.iter().zip(&minus).map(|(a, b)| (*a - *b) / (T::two() * h)).collect()
        }
    };
    if dp.len() != p.len() {
        return Err(Error::InvalidDistribution("derivative and distribution lengths differ".into()));
    }
    let floor = T::lit(PROBABILITY_FLOOR);
    let mut report = FisherReport {
        value: T::zero(),
        dropped_outcomes: 0,
        dropped_mass: T::zero(),
    };
    for (pj, dj) in p.iter().zip(&dp) {
        if *pj > floor {
            report.value = report.value + *dj * *dj / *pj;
        } else {
            report.dropped_outcomes += 1;
            report.dropped_mass = report.dropped_mass + *pj;
        }
    }
    if !report.value.is_finite() {
        return Err(Error::NonFiniteDerivative);
    }
    Ok(report)
}

fn check_distribution<T: Scalar>(p: &[T], tail: T) -> Result<()> {
    if let Some((j, v)) = p.iter().enumerate().find(|(_, v)| !(**v >= T::zero())) {
        return Err(Error::InvalidDistribution(format!("outcome {j} has probability {}", v.to_f64_lossy())));
    }
    let total = p.iter().fold(T::zero(), |a, &v| a + v) + tail;
    let deficit = (T::one() - total).abs();
    if deficit > T::lit(MASS_DEFICIT_TOL).max(T::epsilon() * T::lit(1e3)) {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {} with declared tail {}",
            total.to_f64_lossy(),
            tail.to_f64_lossy()
        )));
    }
    Ok(())
}

fn check_interior<T: Scalar>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha < T::one() {
        Ok(())
    } else {
        invalid("alpha", alpha.to_f64_lossy(), "must lie strictly inside (0, 1)")
    }
}

/// QFI of the Fock state `|m⟩` for the loss fraction: `m/(α(1−α))`.
pub fn fock_qfi<T: Scalar>(m: usize, alpha: T) -> Result<T> {
    check_interior(alpha)?;
    Ok(T::from_count(m as u64) / (alpha * (T::one() - alpha)))
}

/// Best precision with an entangled ancilla: `√(α(1−α)/n̄)`.
pub fn ancilla_bound<T: Scalar>(nbar: T, alpha: T) -> Result<T> {
    if !(nbar > T::zero()) {
        return invalid("nbar", nbar.to_f64_lossy(), "mean photon number must be positive");
    }
    check_interior(alpha)?;
    Ok((alpha * (T::one() - alpha) / nbar).sqrt())
}

/// Coherent-probe precision with `n̄₁` photons reaching the sample: `√((1−α)/n̄₁)`.
pub fn standard_limit<T: Scalar>(nbar1: T, alpha: T) -> Result<T> {
    if !(nbar1 > T::zero()) {
        return invalid("nbar1", nbar1.to_f64_lossy(), "mean photon number must be positive");
    }
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return invalid("alpha", alpha.to_f64_lossy(), "loss fraction must lie in [0, 1]");
    }
    Ok(((T::one() - alpha) / nbar1).sqrt())
}

/// Classical mixture `Σ_n p_n |n,n⟩⟨n,n|` of perfectly correlated pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonCorrelatedMixture<T> {
    weights: Vec<T>,
}

impl<T: Scalar> PhotonCorrelatedMixture<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("mixture has no components".into()));
        }
        check_distribution(&weights, T::zero())?;
        Ok(Self { weights })
    }

    /// Uniform over `|k,k⟩` for `k = 1..=d`.
    pub fn uniform(d: usize) -> Result<Self> {
        if d == 0 {
            return invalid("d", 0.0, "need at least one component");
        }
        let w = T::one() / T::from_count(d as u64);
        let mut weights = vec![w; d + 1];
        weights[0] = T::zero();
        Self::new(weights)
    }

    pub fn point(m: usize) -> Self {
        let mut weights = vec![T::zero(); m + 1];
        weights[m] = T::one();
        Self { weights }
    }

    /// The photon-number distribution of a two-mode squeezed vacuum,
    /// renormalized over the retained terms.
    pub fn geometric(coeffs: &TmsvCoefficients<T>) -> Self {
        let total = coeffs.weights.iter().fold(T::zero(), |a, &w| a + w);
        Self {
            weights: coeffs.weights.iter().map(|&w| w / total).collect(),
        }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn mean(&self) -> T {
        self.weights
            .iter()
            .enumerate()
            .fold(T::zero(), |a, (m, &w)| a + T::from_count(m as u64) * w)
    }
}

/// Counting Fisher information of a photon-correlated mixture: `⟨m⟩/(α(1−α))`.
pub fn mixture_fisher<T: Scalar>(mixture: &PhotonCorrelatedMixture<T>, alpha: T) -> Result<T> {
    check_interior(alpha)?;
    Ok(mixture.mean() / (alpha * (T::one() - alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn coeffs_for_nbar(nbar: f64) -> TmsvCoefficients<f64> {
        tmsv_weights(Squeezing::from_nbar(nbar).unwrap().r(), DEFAULT_TAIL_TOL).unwrap()
    }

    fn kahan(xs: impl IntoIterator<Item = f64>) -> f64 {
        let (mut s, mut c) = (0.0, 0.0);
        for x in xs {
            let y = x - c;
            let t = s + y;
            c = (t - s) - y;
            s = t;
        }
        s
    }

    #[test]
    fn vacuum_weights() {
        let c = tmsv_weights(0.0, 1e-12).unwrap();
        assert_eq!(c.weights(), &[1.0]);
        assert_eq!(c.tail_mass(), 0.0);
        assert_eq!(c.truncated_mean(), 0.0);
    }

    #[test]
    fn unit_photon_weights_are_halving() {
        let c = coeffs_for_nbar(1.0);
        for (m, w) in c.weights().iter().enumerate() {
            assert_relative_eq!(*w, 0.5f64.powi(m as i32 + 1), max_relative = 1e-13);
        }
        // Σ m 2^{-(m+1)} = 1
        assert!((c.truncated_mean() + c.tail_mean() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn weights_normalized_and_mean_matches() {
        for nbar in [0.1, 1.0, 5.0, 10.0, 25.0] {
            let c = coeffs_for_nbar(nbar);
            let total = kahan(c.weights().iter().copied()) + c.tail_mass();
            assert!((total - 1.0).abs() < 1e-14, "nbar {nbar}: {}", total - 1.0);
            assert!(c.tail_mass() < 1e-12 && c.tail_mean() < 1e-12);
            assert!((c.truncated_mean() - nbar).abs() <= 1e-10);
            let t = nbar / (nbar + 1.0);
            for pair in c.weights().windows(2) {
                assert_relative_eq!(pair[1] / pair[0], t, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn truncation_is_minimal() {
        let c = coeffs_for_nbar(10.0);
        let t: f64 = 10.0 / 11.0;
        let n = c.n_max();
        let prev_tail = t.powi(n as i32);
        let prev_mean = prev_tail * (n as f64 + 10.0);
        assert!(prev_tail >= 1e-12 || prev_mean >= 1e-12);
    }

    #[test]
    fn amplitudes_square_to_weights() {
        let r = 0.7;
        let c = tmsv_coefficients(r, 0.3, 1e-12).unwrap();
        for n in [0, 1, 5] {
            let a = c.amplitude(n);
            assert_relative_eq!(a.norm_sqr(), c.weights()[n], max_relative = 1e-12);
            assert_relative_eq!(a.arg(), (0.3 * n as f64 + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI, epsilon = 1e-12);
        }
    }

    #[test]
    fn invalid_weights_inputs() {
        assert!(tmsv_weights(-0.1, 1e-12).is_err());
        assert!(tmsv_weights(0.1, 0.0).is_err());
    }

    #[test]
    fn binomial_examples() {
        let p = binomial_loss(1, 0.05).unwrap();
        assert_relative_eq!(p[1], 0.95, max_relative = 1e-15);
        assert_relative_eq!(p[0], 0.05, max_relative = 1e-15);
        assert_eq!(binomial_loss(7, 0.0).unwrap(), vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(binomial_loss(3, 1.0).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        let p = binomial_loss(20, 0.3).unwrap();
        let mean: f64 = p.iter().enumerate().map(|(n, q)| n as f64 * q).sum();
        let var: f64 = p.iter().enumerate().map(|(n, q)| (n as f64 - mean).powi(2) * q).sum();
        assert_relative_eq!(mean, 14.0, max_relative = 1e-13);
        assert_relative_eq!(var, 4.2, max_relative = 1e-12);
        assert!(binomial_loss(3, 1.5).is_err());
    }

    #[test]
    fn log_domain_binomials_normalized() {
        for m in [51, 100, 400, 900] {
            for alpha in [0.01, 0.3, 0.97] {
                let p = binomial_loss(m, alpha).unwrap();
                let total = kahan(p.iter().copied());
                assert!((total - 1.0).abs() < 1e-13, "m {m} a {alpha}: {}", total - 1.0);
                let mean = kahan(p.iter().enumerate().map(|(n, q)| n as f64 * q));
                assert_relative_eq!(mean, m as f64 * (1.0 - alpha), max_relative = 1e-12);
            }
        }
        // both branches meet at the switch
        let direct = binomial_loss(50, 0.2f64).unwrap();
        let logd = binomial_loss(51, 0.2f64).unwrap();
        assert!(direct.iter().all(|p| p.is_finite()) && logd.iter().all(|p| p.is_finite()));
    }

    #[test]
    fn joint_table_structure() {
        let c = coeffs_for_nbar(2.0);
        let j = joint_distribution(&c, 0.0).unwrap();
        for m in 0..5 {
            for n in 0..5 {
                let expect = if n == m { c.weights()[m] } else { 0.0 };
                assert_eq!(j.get(n, m), expect);
            }
        }
        let j = joint_distribution(&c, 0.1).unwrap();
        assert_relative_eq!(j.mean_probe_photons(), 1.8, max_relative = 1e-11);
        for m in [0, 3, 10] {
            assert_relative_eq!(j.ancilla_marginal(m), c.weights()[m], max_relative = 1e-13);
        }
        assert_eq!(j.get(4, 3), 0.0);
        assert!((j.total_mass() + j.tail_mass() - 1.0).abs() < 1e-12);
        let j = joint_distribution(&tmsv_weights(0.0, 1e-12).unwrap(), 0.4).unwrap();
        assert_eq!(j.get(0, 0), 1.0);
    }

    #[test]
    fn bernoulli_fisher() {
        let model = FnModel(|a: f64| Ok(vec![1.0 - a, a]));
        for a in [0.1, 0.5, 0.8] {
            assert_relative_eq!(fisher_information(&model, a).unwrap(), 1.0 / (a * (1.0 - a)), max_relative = 1e-7);
        }
        let flat = FnModel(|_a: f64| Ok(vec![0.25, 0.75]));
        assert_eq!(fisher_information(&flat, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn fisher_signals_bad_distributions() {
        let neg = FnModel(|_a: f64| Ok(vec![-0.1, 1.1]));
        assert!(matches!(fisher_information(&neg, 0.3), Err(Error::InvalidDistribution(_))));
        let short = FnModel(|_a: f64| Ok(vec![0.5, 0.4]));
        assert!(matches!(fisher_information(&short, 0.3), Err(Error::InvalidDistribution(_))));
        let ok = FnModel(|a: f64| Ok(vec![1.0 - a, a]));
        assert!(fisher_information(&ok, 1.0).is_err());
    }

    #[test]
    fn floor_drops_tiny_outcomes() {
        let model = FnModel(|a: f64| Ok(vec![1.0 - a, a, 0.0]));
        let r = fisher_information_report(&model, 0.5).unwrap();
        assert_eq!(r.dropped_outcomes, 1);
        assert_relative_eq!(r.value, 4.0, max_relative = 1e-7);
    }

    #[test]
    fn fock_brute_force() {
        assert_eq!(fock_qfi(1, 0.5).unwrap(), 4.0);
        assert_eq!(fock_qfi(0, 0.3).unwrap(), 0.0);
        assert!(fock_qfi(2, 0.0f64).is_err());
        let model = FnModel(|a: f64| binomial_loss(1, a));
        assert_relative_eq!(fisher_information(&model, 0.5).unwrap(), 4.0, max_relative = 1e-7);
        let model = FnModel(|a: f64| binomial_loss(7, a));
        assert_relative_eq!(fisher_information(&model, 0.2).unwrap(), fock_qfi(7, 0.2).unwrap(), max_relative = 1e-7);
    }

    #[test]
    fn counting_saturates_qfi_landmark() {
        let model = JointCounting::tmsv(&coeffs_for_nbar(10.0));
        let f = fisher_information(&model, 0.05).unwrap();
        assert_relative_eq!(f, 10.0 / (0.05 * 0.95), max_relative = 1e-8);
    }

    #[test]
    fn analytic_derivatives_match_difference() {
        let model = JointCounting::tmsv(&coeffs_for_nbar(3.0));
        let fd = FnModel(|a: f64| model.probabilities(a));
        let f1 = fisher_information(&model, 0.3).unwrap();
        let f2 = fisher_information(&fd, 0.3).unwrap();
        assert_relative_eq!(f1, f2, max_relative = 1e-6);
    }

    #[test]
    fn decomposition_over_photon_number() {
        let c = coeffs_for_nbar(5.0);
        let alpha = 0.2;
        let direct = fisher_information(&JointCounting::tmsv(&c), alpha).unwrap();
        let by_m: f64 = c
            .weights()
            .iter()
            .enumerate()
            .map(|(m, w)| w * fock_qfi(m, alpha).unwrap())
            .sum();
        assert!((direct - by_m).abs() / by_m < 1e-10);
    }

    #[test]
    fn bounds_landmarks() {
        assert_relative_eq!(ancilla_bound(10.0, 0.05).unwrap(), 0.068_920_243_760_451_1, max_relative = 1e-12);
        assert_relative_eq!(standard_limit(10.0, 0.05).unwrap(), 0.308_220_700_148_448_8, max_relative = 1e-12);
        assert_relative_eq!(ancilla_bound(3.0, 0.2).unwrap(), ancilla_bound(3.0, 0.8).unwrap(), max_relative = 1e-14);
        assert_eq!(standard_limit(10.0, 1.0).unwrap(), 0.0);
        assert_relative_eq!(
            standard_limit(10.0, 0.05).unwrap() / ancilla_bound(10.0, 0.05).unwrap(),
            1.0 / 0.05f64.sqrt(),
            max_relative = 1e-12
        );
        assert!(ancilla_bound(0.0, 0.5).is_err());
        assert!(ancilla_bound(1.0, 0.0).is_err());
        assert!(standard_limit(0.0, 0.5).is_err());
        let f = fisher_information(&JointCounting::tmsv(&coeffs_for_nbar(10.0)), 0.05).unwrap();
        assert!((1.0 / f.sqrt() - ancilla_bound(10.0, 0.05).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn mixtures() {
        let u = PhotonCorrelatedMixture::uniform(4).unwrap();
        assert_relative_eq!(mixture_fisher(&u, 0.3).unwrap(), 2.5 / 0.21, max_relative = 1e-14);
        let direct = fisher_information(&JointCounting::mixture(&u), 0.3).unwrap();
        assert_relative_eq!(direct, 2.5 / 0.21, max_relative = 1e-10);
        let p = PhotonCorrelatedMixture::point(6);
        assert_relative_eq!(mixture_fisher(&p, 0.4).unwrap(), fock_qfi(6, 0.4).unwrap(), max_relative = 1e-14);
        // two different mixtures with the same mean
        let a = PhotonCorrelatedMixture::new(vec![0.5, 0.0, 0.0, 0.0, 0.5]).unwrap();
        let b = PhotonCorrelatedMixture::point(2);
        let fa = fisher_information(&JointCounting::mixture(&a), 0.15).unwrap();
        let fb = fisher_information(&JointCounting::mixture(&b), 0.15).unwrap();
        assert_relative_eq!(fa, fb, max_relative = 1e-10);
        assert!(PhotonCorrelatedMixture::new(vec![0.5, 0.4]).is_err());
        assert!(PhotonCorrelatedMixture::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn geometric_mixture_matches_squeezed_vacuum() {
        let c = coeffs_for_nbar(10.0);
        let g = PhotonCorrelatedMixture::geometric(&c);
        assert_relative_eq!(mixture_fisher(&g, 0.05).unwrap(), 10.0 / (0.05 * 0.95), max_relative = 1e-10);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn joint_counting_equals_closed_form(nbar in 0.05..25.0f64, alpha in 0.01..0.95f64) {
                let f = fisher_information(&JointCounting::tmsv(&coeffs_for_nbar(nbar)), alpha).unwrap();
                let exact = nbar / (alpha * (1.0 - alpha));
                prop_assert!((f - exact).abs() / exact < 1e-8);
            }

            #[test]
            fn phase_does_not_enter_weights(r in 0.0..2.0f64, phi in -3.0..3.0f64) {
                let a = tmsv_coefficients(r, phi, 1e-12).unwrap();
                let b = tmsv_weights(r, 1e-12).unwrap();
                prop_assert_eq!(a.weights(), b.weights());
            }

            #[test]
            fn binomials_nonnegative(m in 0usize..200, alpha in 0.0..=1.0f64) {
                let p = binomial_loss(m, alpha).unwrap();
                prop_assert!(p.iter().all(|x| *x >= 0.0));
                prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }
}
