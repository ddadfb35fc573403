//! Two-mode Gaussian states in the complex `(a, b, a†, b†)` ordering.
//!
//! First moments are `d_m = ⟨A_m⟩` and second moments are the symmetrized
//! covariances `σ_mn = ⟨{ΔA_m, ΔA_n†}⟩`, so the two-mode vacuum has `σ = I`.
//! Channels act on the moments only: a Bogoliubov map `A → T A` sends
//! `σ → T σ T†` and `d → T d`; a loss channel mixes in a vacuum noise mode.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};
use crate::linalg::{cr, Mat4, C};
use crate::scalar::Scalar;

/// The two optical modes: the probe (signal) that crosses the sample and the
/// ancilla (idler) that does not.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Probe,
    Ancilla,
}

impl Mode {
    /// Index of the annihilation operator in the `(a, b, a†, b†)` vector.
    pub fn index(self) -> usize {
        match self {
            Mode::Probe => 0,
            Mode::Ancilla => 1,
        }
    }
}

/// Displacement vector `(d_a, d_b, d_a*, d_b*)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Displacement<T>([C<T>; 4]);

impl<T: Scalar> Displacement<T> {
    pub fn zero() -> Self {
        Self([C::zero(); 4])
    }

    pub fn from_amplitudes(probe: C<T>, ancilla: C<T>) -> Self {
        Self([probe, ancilla, probe.conj(), ancilla.conj()])
    }

    pub fn probe(&self) -> C<T> {
        self.0[0]
    }

    pub fn ancilla(&self) -> C<T> {
        self.0[1]
    }

    pub fn entries(&self) -> &[C<T>; 4] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.is_zero())
    }

    /// Largest deviation from the conjugate-pair structure.
    pub fn conjugate_defect(&self) -> T {
        (self.0[2] - self.0[0].conj()).norm().max((self.0[3] - self.0[1].conj()).norm())
    }
}

/// Symmetrized covariance matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Covariance<T>(Mat4<T>);

impl<T: Scalar> Covariance<T> {
    pub fn vacuum() -> Self {
        Self(Mat4::identity())
    }

    /// Wraps a raw matrix. The caller is responsible for physicality; use
    /// [`Covariance::physicality_margin`] to check.
    pub fn from_matrix(m: Mat4<T>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Mat4<T> {
        &self.0
    }

    /// The symplectic form `K = diag(1, 1, −1, −1)`.
    pub fn symplectic_form() -> Mat4<T> {
        Mat4::from_real_diagonal([T::one(), T::one(), -T::one(), -T::one()])
    }

    /// Smallest eigenvalue of `σ + K`; physical states have a nonnegative margin.
    pub fn physicality_margin(&self) -> T {
        let shifted = self.0 + Self::symplectic_form();
        shifted.to_dmat().hermitian_eigen().values[0]
    }

    /// Largest deviation from the block structure implied by the operator
    /// ordering (`σ_{m+2,n+2} = σ̄_{mn}`, `σ_{m+2,n} = σ̄_{m,n+2}`).
    pub fn conjugate_block_defect(&self) -> T {
        let s = &self.0;
        let mut worst = T::zero();
        for m in 0..2 {
            for n in 0..2 {
                worst = worst.max((s[(m + 2, n + 2)] - s[(m, n)].conj()).norm());
                worst = worst.max((s[(m + 2, n)] - s[(m, n + 2)].conj()).norm());
            }
        }
        worst
    }

    /// Normally ordered number-type correlations `⟨Δa_i† Δa_j⟩`.
    pub fn number_correlations(&self) -> [[C<T>; 2]; 2] {
        let s = &self.0;
        let mut n = [[C::zero(); 2]; 2];
        for (i, row) in n.iter_mut().enumerate() {
            for (j, nij) in row.iter_mut().enumerate() {
                let delta = if i == j { C::one() } else { C::zero() };
                *nij = (s[(j, i)] - delta) * T::half();
            }
        }
        n
    }

    /// Anomalous correlations `⟨Δa_i Δa_j⟩`.
    pub fn pair_correlations(&self) -> [[C<T>; 2]; 2] {
        let s = &self.0;
        let mut m = [[C::zero(); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, mij) in row.iter_mut().enumerate() {
                *mij = s[(i, j + 2)] * T::half();
            }
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    /// Time-reversed squeezer, `ξ → −ξ`.
    Reversed,
}

/// Two-mode squeezer `S(ξ)`, `ξ = r e^{iφ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Squeezer<T> {
    r: T,
    phi: T,
    direction: Direction,
}

impl<T: Scalar> Squeezer<T> {
    pub fn new(r: T, phi: T, direction: Direction) -> Result<Self> {
        if !(r >= T::zero()) || !r.is_finite() {
            return invalid("r", r.to_f64_lossy(), "squeezing strength must be finite and >= 0");
        }
        if !phi.is_finite() {
            return invalid("phi", phi.to_f64_lossy(), "phase must be finite");
        }
        Ok(Self { r, phi, direction })
    }

    pub fn forward(r: T, phi: T) -> Result<Self> {
        Self::new(r, phi, Direction::Forward)
    }

    pub fn reversed(r: T, phi: T) -> Result<Self> {
        Self::new(r, phi, Direction::Reversed)
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn inverse(&self) -> Self {
        let direction = match self.direction {
            Direction::Forward => Direction::Reversed,
            Direction::Reversed => Direction::Forward,
        };
        Self { direction, ..*self }
    }

    /// Bogoliubov matrix acting on `(a, b, a†, b†)`:
    /// `a → a cosh r ± b† e^{iφ} sinh r`, `b → b cosh r ± a† e^{iφ} sinh r`.
    pub fn bogoliubov(&self) -> Mat4<T> {
        let c = cr(self.r.cosh());
        let sign = match self.direction {
            Direction::Forward => T::one(),
            Direction::Reversed => -T::one(),
        };
        let se = Complex::from_polar(sign * self.r.sinh(), self.phi);
        let z = C::zero();
        Mat4([
            [c, z, z, se],
            [z, c, se, z],
            [z, se.conj(), c, z],
            [se.conj(), z, z, c],
        ])
    }
}

/// Pure loss on one mode, `a → √(1−α) a + √α c` with `c` in vacuum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Loss<T> {
    mode: Mode,
    alpha: T,
}

impl<T: Scalar> Loss<T> {
    pub fn new(mode: Mode, alpha: T) -> Result<Self> {
        if !(alpha >= T::zero() && alpha <= T::one()) {
            return invalid("alpha", alpha.to_f64_lossy(), "loss fraction must lie in [0, 1]");
        }
        Ok(Self { mode, alpha })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    fn attenuation(&self) -> [T; 4] {
        let t = (T::one() - self.alpha).sqrt();
        let mut g = [T::one(); 4];
        g[self.mode.index()] = t;
        g[self.mode.index() + 2] = t;
        g
    }
}

/// One transformation in a channel pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChannelStep<T> {
    Squeeze(Squeezer<T>),
    Loss(Loss<T>),
}

/// Total photon-number statistics over both modes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhotonMoments<T> {
    pub mean: T,
    pub variance: T,
}

/// Two-mode Gaussian state, immutable once built.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianState<T> {
    displacement: Displacement<T>,
    covariance: Covariance<T>,
}

impl<T: Scalar> GaussianState<T> {
    pub fn new(displacement: Displacement<T>, covariance: Covariance<T>) -> Self {
        Self {
            displacement,
            covariance,
        }
    }

    pub fn vacuum() -> Self {
        Self::new(Displacement::zero(), Covariance::vacuum())
    }

    /// Coherent state `|β⟩` in the probe, vacuum in the ancilla.
    pub fn coherent(beta: C<T>) -> Self {
        Self::new(Displacement::from_amplitudes(beta, C::zero()), Covariance::vacuum())
    }

    pub fn displacement(&self) -> &Displacement<T> {
        &self.displacement
    }

    pub fn covariance(&self) -> &Covariance<T> {
        &self.covariance
    }

    pub fn squeeze(&self, p: &Squeezer<T>) -> Self {
        let t = p.bogoliubov();
        let sigma = t * *self.covariance.matrix() * t.adjoint();
        Self::new(
            Displacement(t.mul_vec(self.displacement.entries())),
            Covariance(sigma),
        )
    }

    /// `σ → G σ G† + (I − G G†)`, `d → G d` with `G` the diagonal attenuation.
    pub fn lose(&self, p: &Loss<T>) -> Self {
        let g = p.attenuation();
        let s = self.covariance.matrix();
        let sigma = Mat4::from_fn(|i, j| {
            let noise = if i == j { cr(T::one() - g[i] * g[i]) } else { C::zero() };
            s[(i, j)] * (g[i] * g[j]) + noise
        });
        let mut d = *self.displacement.entries();
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = *dk * g[k];
        }
        Self::new(Displacement(d), Covariance(sigma))
    }

    pub fn apply(&self, step: &ChannelStep<T>) -> Self {
        match step {
            ChannelStep::Squeeze(s) => self.squeeze(s),
            ChannelStep::Loss(l) => self.lose(l),
        }
    }

    pub fn apply_all<'a>(&self, steps: impl IntoIterator<Item = &'a ChannelStep<T>>) -> Self {
        steps.into_iter().fold(*self, |state, step| state.apply(step))
    }

    /// Mean photon number `⟨a†a⟩` of one mode.
    pub fn mean_photons(&self, mode: Mode) -> T {
        let i = mode.index();
        let centered = (self.covariance.matrix()[(i, i)].re - T::one()) * T::half();
        centered + self.displacement.entries()[i].norm_sqr()
    }

    /// Mean and variance of `N = a†a + b†b`.
    ///
    /// With `δ = a − d`, `n_ij = ⟨δ_i†δ_j⟩` and `m_ij = ⟨δ_iδ_j⟩`, Wick pairing
    /// of the centered fourth moments gives
    /// `Cov(δ_i†δ_i, δ_j†δ_j) = |m_ij|² + n_ij (δ_ij + n_ji)`, which summed over
    /// both modes is `Σ|m_ij|² + Σ|n_ij|² + Σ n_ii`. The displacement enters
    /// through the linear part `L = Σ d_i*δ_i + d_iδ_i†`, whose variance is
    /// added; odd moments of a Gaussian vanish so `Cov(L, δN) = 0`.
    pub fn photon_number_moments(&self) -> PhotonMoments<T> {
        let n = self.covariance.number_correlations();
        let m = self.covariance.pair_correlations();
        let d = [self.displacement.entries()[0], self.displacement.entries()[1]];

        let mut mean = T::zero();
        let mut variance = T::zero();
        for i in 0..2 {
            mean = mean + n[i][i].re + d[i].norm_sqr();
            // δ_ij part of ⟨δ_i†δ_j⟩⟨δ_iδ_j†⟩
            variance = variance + n[i][i].re;
            for j in 0..2 {
                // ⟨δ_i†δ_j†⟩⟨δ_iδ_j⟩
                variance = variance + m[i][j].norm_sqr();
                // ⟨δ_i†δ_j⟩⟨δ_j†δ_i⟩
                variance = variance + n[i][j].norm_sqr();
            }
        }

        let mut linear = C::zero();
        for i in 0..2 {
            for j in 0..2 {
                let delta = if i == j { T::one() } else { T::zero() };
                // d_i* d_j* ⟨δ_iδ_j⟩ plus its conjugate; only the real part is kept below
                linear = linear + d[i].conj() * d[j].conj() * m[i][j] * T::two();
                // d_i* d_j ⟨δ_iδ_j†⟩ + d_i d_j* ⟨δ_i†δ_j⟩
                linear = linear + d[i].conj() * d[j] * (n[j][i] + delta);
                linear = linear + d[i] * d[j].conj() * n[i][j];
            }
        }
        variance = variance + linear.re;

        PhotonMoments { mean, variance }
    }
}

/// Closed-form moments of a two-mode squeezed vacuum whose probe suffered
/// loss `α`: `⟨a†a⟩ = (1−α) sinh²r`, `⟨b†b⟩ = sinh²r`,
/// `⟨ab⟩ = e^{iφ} sinh r cosh r √(1−α)`.
pub fn tmsv_after_loss<T: Scalar>(r: T, phi: T, alpha: T) -> Result<GaussianState<T>> {
    if !(r >= T::zero()) || !r.is_finite() {
        return invalid("r", r.to_f64_lossy(), "squeezing strength must be finite and >= 0");
    }
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return invalid("alpha", alpha.to_f64_lossy(), "loss fraction must lie in [0, 1]");
    }
    let s2 = r.sinh().powi(2);
    let transmitted = T::one() - alpha;
    let na = transmitted * s2;
    let nb = s2;
    let pair = Complex::from_polar(r.sinh() * r.cosh() * transmitted.sqrt(), phi);
    Ok(GaussianState::new(
        Displacement::zero(),
        Covariance(two_mode_correlated_sigma(na, nb, pair)),
    ))
}

/// Covariance of a zero-mean state whose only nonzero correlations are
/// `⟨a†a⟩ = na`, `⟨b†b⟩ = nb` and `⟨ab⟩ = pair`.
pub(crate) fn two_mode_correlated_sigma<T: Scalar>(na: T, nb: T, pair: C<T>) -> Mat4<T> {
    let two = T::two();
    let mut s = Mat4::from_real_diagonal([two * na + T::one(), two * nb + T::one(), two * na + T::one(), two * nb + T::one()]);
    s[(0, 3)] = pair * two;
    s[(1, 2)] = pair * two;
    s[(2, 1)] = pair.conj() * two;
    s[(3, 0)] = pair.conj() * two;
    s
}
