//! Quantum Fisher information of a one-parameter family of Gaussian states.
//!
//! The covariance contribution is
//! `F = lim_{v→1} ½ vec(∂σ)† M(v)⁻¹ vec(∂σ)` with `M(v) = v² σ̄⊗σ − K⊗K`,
//! and a displaced family adds `2 ∂d† σ⁻¹ ∂d`.
//!
//! `M(1)` is singular whenever a symplectic eigenvalue of `σ` equals one,
//! which already happens for a pure two-mode squeezed vacuum after loss on
//! a single mode. For derivatives orthogonal to `ker M(1)` the limit equals
//! `½ x† M(1)⁺ x`, so the default [`LimitMethod::Spectral`] evaluates the
//! pseudo-inverse from a Hermitian eigendecomposition. A component of the
//! derivative inside the kernel makes the limit diverge and is reported.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{invalid, Error, Result};
use crate::gaussian::{tmsv_after_loss, two_mode_correlated_sigma, Covariance, Displacement, GaussianState, Loss, Mode};
use crate::linalg::{inner, kron, norm, vec_columns, DMat, Mat4, C};
use crate::scalar::Scalar;
use crate::squeezing::Squeezing;

/// A family `α ↦ ρ(α)` of Gaussian states.
pub trait StateFamily<T: Scalar>: Sync {
    fn state(&self, alpha: T) -> Result<GaussianState<T>>;

    /// Closed-form `∂σ/∂α`, when the family has one.
    fn dsigma(&self, _alpha: T) -> Option<Mat4<T>> {
        None
    }

    /// Closed-form `∂d/∂α`, when the family has one.
    fn ddisplacement(&self, _alpha: T) -> Option<[C<T>; 4]> {
        None
    }
}

/// Adapts a closure into a [`StateFamily`] without analytic derivatives.
pub struct FnFamily<F>(pub F);

impl<T, F> StateFamily<T> for FnFamily<F>
where
    T: Scalar,
    F: Fn(T) -> Result<GaussianState<T>> + Sync,
{
    fn state(&self, alpha: T) -> Result<GaussianState<T>> {
        (self.0)(alpha)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeMode {
    Analytic,
    CentralDifference,
}

/// A QFI evaluation request at one value of `α`.
pub struct QfiProblem<'a, T> {
    family: &'a dyn StateFamily<T>,
    alpha: T,
    derivative: DerivativeMode,
}

impl<'a, T: Scalar> QfiProblem<'a, T> {
    /// `α` must lie strictly inside `(0, 1)`; the analytic mode requires the
    /// family to provide `∂σ/∂α`.
    pub fn new(family: &'a dyn StateFamily<T>, alpha: T, derivative: DerivativeMode) -> Result<Self> {
        if !(alpha > T::zero() && alpha < T::one()) {
            return invalid("alpha", alpha.to_f64_lossy(), "QFI is evaluated strictly inside (0, 1)");
        }
        if derivative == DerivativeMode::Analytic && family.dsigma(alpha).is_none() {
            return invalid("alpha", alpha.to_f64_lossy(), "analytic mode needs a family with a closed-form derivative");
        }
        Ok(Self {
            family,
            alpha,
            derivative,
        })
    }

    /// Uses the analytic derivative when the family offers one.
    pub fn auto(family: &'a dyn StateFamily<T>, alpha: T) -> Result<Self> {
        let mode = if family.dsigma(alpha).is_some() {
            DerivativeMode::Analytic
        } else {
            DerivativeMode::CentralDifference
        };
        Self::new(family, alpha, mode)
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn derivative_mode(&self) -> DerivativeMode {
        self.derivative
    }

    pub fn family(&self) -> &'a dyn StateFamily<T> {
        self.family
    }
}

/// Step of the central differences taken in `α`: `10⁻⁶·max(1, α)` in double
/// precision, widened for lower-precision scalars.
pub fn difference_step<T: Scalar>(alpha: T) -> T {
    let base = T::lit(1e-6).max(T::epsilon().cbrt() * T::lit(0.1));
    base * alpha.max(T::one())
}

/// `∂σ/∂α` at `alpha` using the problem's derivative mode.
pub fn dsigma_dalpha<T: Scalar>(problem: &QfiProblem<'_, T>, alpha: T) -> Result<Mat4<T>> {
    match problem.derivative {
        DerivativeMode::Analytic => problem.family.dsigma(alpha).ok_or(Error::InvalidParameter {
            name: "alpha",
            value: alpha.to_f64_lossy(),
            reason: "family has no closed-form derivative",
        }),
        DerivativeMode::CentralDifference => {
            let h = difference_step(alpha);
            let plus = problem.family.state(alpha + h)?;
            let minus = problem.family.state(alpha - h)?;
            let d = (*plus.covariance().matrix() - *minus.covariance().matrix()).scale(T::one() / (T::two() * h));
            if d.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite()) {
                Ok(d)
            } else {
                Err(Error::NonFiniteDerivative)
            }
        }
    }
}

/// `∂d/∂α` at `alpha`, analytic when available.
pub fn ddisplacement_dalpha<T: Scalar>(problem: &QfiProblem<'_, T>, alpha: T) -> Result<[C<T>; 4]> {
    if let Some(d) = problem.family.ddisplacement(alpha) {
        return Ok(d);
    }
    let h = difference_step(alpha);
    let plus = *problem.family.state(alpha + h)?.displacement().entries();
    let minus = *problem.family.state(alpha - h)?.displacement().entries();
    let mut out = [C::zero(); 4];
    for k in 0..4 {
        out[k] = (plus[k] - minus[k]) / (T::two() * h);
    }
    Ok(out)
}

/// `M = v² σ̄⊗σ − K⊗K`.
pub fn build_m<T: Scalar>(sigma: &Mat4<T>, v: T) -> DMat<T> {
    let k = Covariance::<T>::symplectic_form();
    let a = kron(&sigma.conj(), sigma).scale(v * v);
    &a - &kron(&k, &k)
}

/// How the `v → 1` limit is taken when `M(1)` is ill-conditioned.
#[derive(Clone, Debug, PartialEq)]
pub enum LimitMethod<T> {
    /// Pseudo-inverse of `M(1)`; eigenvalues below `null_tol·max|λ|` are
    /// treated as the kernel.
    Spectral { null_tol: T },
    /// Evaluate at each `v < 1` and extrapolate polynomially to `v = 1`.
    Richardson { v_values: Vec<T> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitSchedule<T> {
    pub method: LimitMethod<T>,
    /// `M(1)` is inverted directly when its condition number is below this.
    pub condition_cap: T,
}

impl<T: Scalar> LimitSchedule<T> {
    fn default_cap() -> T {
        T::lit(1e10).min(T::one() / (T::epsilon() * T::lit(1e4)))
    }

    pub fn spectral() -> Self {
        Self {
            method: LimitMethod::Spectral {
                null_tol: T::epsilon() * T::lit(1e4),
            },
            condition_cap: Self::default_cap(),
        }
    }

    pub fn richardson(v_values: Vec<T>) -> Result<Self> {
        let mut seen: Vec<T> = Vec::new();
        for &v in &v_values {
            if !(v > T::zero() && v < T::one()) {
                return invalid("v", v.to_f64_lossy(), "regularization values must lie in (0, 1)");
            }
            if seen.contains(&v) {
                return invalid("v", v.to_f64_lossy(), "regularization values must be distinct");
            }
            seen.push(v);
        }
        if v_values.len() < 2 {
            return invalid("v_values", v_values.len() as f64, "extrapolation needs at least two points");
        }
        Ok(Self {
            method: LimitMethod::Richardson { v_values },
            condition_cap: Self::default_cap(),
        })
    }
}

impl<T: Scalar> Default for LimitSchedule<T> {
    fn default() -> Self {
        Self::spectral()
    }
}

fn quadratic_form<T: Scalar>(m: &DMat<T>, x: &[C<T>]) -> Option<T> {
    m.solve(x).map(|y| inner(x, &y).re)
}

/// `½ vec(∂σ)† M⁻¹ vec(∂σ)` in the `v → 1` limit.
pub fn covariance_term<T: Scalar>(sigma: &Mat4<T>, dsigma: &Mat4<T>, schedule: &LimitSchedule<T>) -> Result<T> {
    let x = vec_columns(dsigma);
    let x_norm = norm(&x);
    if x_norm == T::zero() {
        return Ok(T::zero());
    }
    let m1 = build_m(sigma, T::one());
    let eig = m1.hermitian_eigen();
    let condition = eig.condition_number();
    if condition < schedule.condition_cap {
        if let Some(q) = quadratic_form(&m1, &x) {
            return Ok((q * T::half()).max(T::zero()));
        }
    }

    let value = match &schedule.method {
        LimitMethod::Spectral { null_tol } => {
            let scale = eig.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            let cut = *null_tol * scale;
            let y = eig.project(&x);
            let mut total = T::zero();
            let mut null_sq = T::zero();
            for (lambda, yk) in eig.values.iter().zip(&y) {
                if lambda.abs() > cut {
                    total = total + yk.norm_sqr() / *lambda;
                } else {
                    null_sq = null_sq + yk.norm_sqr();
                }
            }
            let null_fraction = null_sq.sqrt() / x_norm;
            if null_fraction > T::epsilon().sqrt() * T::lit(100.0) {
                return Err(Error::DivergentLimit(null_fraction.to_f64_lossy()));
            }
            total * T::half()
        }
        LimitMethod::Richardson { v_values } => {
            let mut points: Vec<(T, T)> = Vec::new();
            let mut best_condition = T::infinity();
            for &v in v_values {
                let m = build_m(sigma, v);
                let c = m.hermitian_eigen().condition_number();
                best_condition = best_condition.min(c);
                if c >= schedule.condition_cap {
                    continue;
                }
                if let Some(q) = quadratic_form(&m, &x) {
                    points.push((T::one() - v, q * T::half()));
                }
            }
            if points.len() < 2 {
                return Err(Error::SingularM {
                    condition: best_condition.to_f64_lossy(),
                });
            }
            points.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
            let latest = neville_at_zero(&points);
            let previous = neville_at_zero(&points[..points.len() - 1]);
            let tol = T::lit(1e-6) * latest.abs().max(T::min_positive_value());
            if (latest - previous).abs() > tol {
                return Err(Error::NonConvergence {
                    previous: previous.to_f64_lossy(),
                    latest: latest.to_f64_lossy(),
                });
            }
            latest
        }
    };
    Ok(value.max(T::zero()))
}

/// Value at `h = 0` of the polynomial through `(h_i, f_i)`.
fn neville_at_zero<T: Scalar>(points: &[(T, T)]) -> T {
    let mut p: Vec<T> = points.iter().map(|&(_, f)| f).collect();
    let n = points.len();
    for level in 1..n {
        for i in 0..n - level {
            let (hi, hj) = (points[i].0, points[i + level].0);
            p[i] = (hi * p[i + 1] - hj * p[i]) / (hi - hj);
        }
    }
    p[0]
}

/// QFI of a family whose displacement does not depend on `α`.
pub fn qfi<T: Scalar>(problem: &QfiProblem<'_, T>, schedule: &LimitSchedule<T>) -> Result<T> {
    let state = problem.family.state(problem.alpha)?;
    let dsigma = dsigma_dalpha(problem, problem.alpha)?;
    covariance_term(state.covariance().matrix(), &dsigma, schedule)
}

/// QFI including the displacement term `2 ∂d† σ⁻¹ ∂d`.
pub fn qfi_with_displacement<T: Scalar>(
    problem: &QfiProblem<'_, T>,
    ddisp: &[C<T>; 4],
    schedule: &LimitSchedule<T>,
) -> Result<T> {
    let state = problem.family.state(problem.alpha)?;
    let sigma = state.covariance().matrix();
    let cov = qfi(problem, schedule)?;
    if ddisp.iter().all(|z| z.is_zero()) {
        return Ok(cov);
    }
    let y = sigma.to_dmat().solve(ddisp).ok_or(Error::SingularSystem)?;
    Ok(cov + T::two() * inner(ddisp, &y).re)
}

/// QFI of a displaced family, taking `∂d/∂α` from the family.
pub fn qfi_displaced_family<T: Scalar>(problem: &QfiProblem<'_, T>, schedule: &LimitSchedule<T>) -> Result<T> {
    let dd = ddisplacement_dalpha(problem, problem.alpha)?;
    qfi_with_displacement(problem, &dd, schedule)
}

/// Two-mode squeezed vacuum whose probe crosses the sample.
#[derive(Clone, Copy, Debug)]
pub struct TmsvLossFamily<T> {
    pub squeezing: Squeezing<T>,
    pub phi: T,
}

impl<T: Scalar> StateFamily<T> for TmsvLossFamily<T> {
    fn state(&self, alpha: T) -> Result<GaussianState<T>> {
        tmsv_after_loss(self.squeezing.r(), self.phi, alpha)
    }

    fn dsigma(&self, alpha: T) -> Option<Mat4<T>> {
        let n = self.squeezing.nbar();
        let dpair = Complex::from_polar(-self.squeezing.sinh_cosh() / (T::two() * (T::one() - alpha).sqrt()), self.phi);
        Some(correlated_derivative(-n, T::zero(), dpair))
    }
}

/// Output of the full SU(1,1) interferometer: squeezer, sample, reversed squeezer.
#[derive(Clone, Copy, Debug)]
pub struct Su11OutputFamily<T> {
    pub squeezing: Squeezing<T>,
    pub phi: T,
}

impl<T: Scalar> Su11OutputFamily<T> {
    fn eta(alpha: T) -> T {
        alpha / (T::one() + (T::one() - alpha).sqrt())
    }
}

impl<T: Scalar> StateFamily<T> for Su11OutputFamily<T> {
    fn state(&self, alpha: T) -> Result<GaussianState<T>> {
        if !(alpha >= T::zero() && alpha <= T::one()) {
            return invalid("alpha", alpha.to_f64_lossy(), "loss fraction must lie in [0, 1]");
        }
        let (n, c2, sc) = (self.squeezing.nbar(), self.squeezing.cosh2(), self.squeezing.sinh_cosh());
        let eta = Self::eta(alpha);
        let na = sc * sc * eta * eta;
        let nb = na + alpha * n;
        let pair = Complex::from_polar(-sc * eta * (c2 - n * (T::one() - alpha).sqrt()), self.phi);
        Ok(GaussianState::new(
            Displacement::zero(),
            Covariance::from_matrix(two_mode_correlated_sigma(na, nb, pair)),
        ))
    }

    fn dsigma(&self, alpha: T) -> Option<Mat4<T>> {
        let (n, sc) = (self.squeezing.nbar(), self.squeezing.sinh_cosh());
        let eta = Self::eta(alpha);
        let deta = T::one() / (T::two() * (T::one() - alpha).sqrt());
        let dna = T::two() * sc * sc * eta * deta;
        let dpair = Complex::from_polar(-sc * deta * (T::one() + T::two() * eta * n), self.phi);
        Some(correlated_derivative(dna, dna + n, dpair))
    }
}

/// Coherent probe `|β⟩` with an optional extra loss before the sample.
#[derive(Clone, Copy, Debug)]
pub struct CoherentLossFamily<T> {
    pub beta: C<T>,
    pub extra_loss: T,
}

impl<T: Scalar> StateFamily<T> for CoherentLossFamily<T> {
    fn state(&self, alpha: T) -> Result<GaussianState<T>> {
        Ok(GaussianState::coherent(self.beta)
            .lose(&Loss::new(Mode::Probe, self.extra_loss)?)
            .lose(&Loss::new(Mode::Probe, alpha)?))
    }

    fn dsigma(&self, _alpha: T) -> Option<Mat4<T>> {
        Some(Mat4::zeros())
    }

    fn ddisplacement(&self, alpha: T) -> Option<[C<T>; 4]> {
        let k = -(T::one() - self.extra_loss).sqrt() / (T::two() * (T::one() - alpha).sqrt());
        let d = self.beta * k;
        Some(*Displacement::from_amplitudes(d, C::zero()).entries())
    }
}

/// `∂σ` for the correlated two-mode structure given the derivatives of
/// `⟨a†a⟩`, `⟨b†b⟩` and `⟨ab⟩`.
pub(crate) fn correlated_derivative<T: Scalar>(dna: T, dnb: T, dpair: C<T>) -> Mat4<T> {
    let shifted = two_mode_correlated_sigma(dna, dnb, dpair);
    shifted - Mat4::identity()
}
