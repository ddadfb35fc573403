//! Time-reversal (SU(1,1)) readout: squeeze, probe the sample, unsqueeze and
//! count all output photons.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::linalg::C;
use crate::scalar::Scalar;
use crate::squeezing::Squeezing;

/// Output operators in terms of the inputs and the sample's vacuum port `ĉ`:
/// `a_out = c11 a + c12 b† + c13 c`, `b_out = c21 a† + c22 b + c23 c†`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su11Coefficients<T> {
    pub c11: C<T>,
    pub c12: C<T>,
    pub c13: C<T>,
    pub c21: C<T>,
    pub c22: C<T>,
    pub c23: C<T>,
}

impl<T: Scalar> Su11Coefficients<T> {
    /// Deviations of `[a_out, a_out†]` and `[b_out, b_out†]` from one.
    pub fn commutator_defects(&self) -> (T, T) {
        let a = self.c11.norm_sqr() - self.c12.norm_sqr() + self.c13.norm_sqr() - T::one();
        let b = self.c22.norm_sqr() - self.c21.norm_sqr() - self.c23.norm_sqr() - T::one();
        (a, b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su11Report<T> {
    pub mean_out: T,
    pub variance_out: T,
    pub dmean_dalpha: T,
    pub delta_alpha: T,
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if alpha >= T::zero() && alpha <= T::one() {
        Ok(())
    } else {
        invalid("alpha", alpha.to_f64_lossy(), "loss fraction must lie in [0, 1]")
    }
}

/// `η = 1 − √(1−α)`, written to avoid cancellation at small `α`.
pub fn eta<T: Scalar>(alpha: T) -> T {
    alpha / (T::one() + (T::one() - alpha).sqrt())
}

pub fn coefficients<T: Scalar>(r: T, phi: T, alpha: T) -> Result<Su11Coefficients<T>> {
    let s = Squeezing::from_r(r)?;
    check_alpha(alpha)?;
    let (ch, sh) = (r.cosh(), r.sinh());
    let root = (T::one() - alpha).sqrt();
    let e = Complex::from_polar(T::one(), phi);
    let pair = e * (eta(alpha) * ch * sh);
    Ok(Su11Coefficients {
        c11: Complex::from(root * s.cosh2() - s.nbar()),
        c12: -pair,
        c13: Complex::from(ch * alpha.sqrt()),
        c21: pair,
        c22: Complex::from(s.cosh2() - root * s.nbar()),
        c23: -e * (sh * alpha.sqrt()),
    })
}

/// `N̄_out = 2 sinh²r cosh²r η² + α sinh²r`.
pub fn mean_photons<T: Scalar>(r: T, alpha: T) -> Result<T> {
    let s = Squeezing::from_r(r)?;
    check_alpha(alpha)?;
    let e = eta(alpha);
    Ok(T::two() * s.nbar() * s.cosh2() * e * e + alpha * s.nbar())
}

/// `N̄_out = |c12|² + |c21|² + |c23|²`.
pub fn mean_photons_from_coefficients<T: Scalar>(c: &Su11Coefficients<T>) -> T {
    c.c12.norm_sqr() + c.c21.norm_sqr() + c.c23.norm_sqr()
}

/// Output photon-number variance from the mode coefficients.
pub fn variance_photons<T: Scalar>(r: T, alpha: T) -> Result<T> {
    let c = coefficients(r, T::zero(), alpha)?;
    Ok(variance_from_coefficients(&c))
}

pub fn variance_from_coefficients<T: Scalar>(c: &Su11Coefficients<T>) -> T {
    let v = c.c12.norm_sqr() * (c.c11.norm_sqr() + c.c13.norm_sqr() + c.c22.norm_sqr())
        + c.c22.norm_sqr() * c.c23.norm_sqr()
        + T::two() * (c.c12 * c.c22 * (c.c11 * c.c21 + c.c13 * c.c23)).norm();
    v.max(T::zero())
}

/// The bracket `A(n̄, η)`; the variance is `sinh²r · A`.
pub fn noise_bracket<T: Scalar>(nbar: T, alpha: T) -> T {
    let e = eta(alpha);
    let (n, n1) = (nbar, nbar + T::one());
    let g = T::one() + e * n;
    e * e * n1 * (T::two() * e - T::one() + T::lit(3.0) * e * e * n1 * n)
        + T::two() * alpha * e * n1 * g
        + g * g * (T::two() * e * n1 - alpha * n)
}

/// Output variance from the `η` parameterization.
pub fn variance_photons_eta<T: Scalar>(r: T, alpha: T) -> Result<T> {
    let s = Squeezing::from_r(r)?;
    check_alpha(alpha)?;
    Ok((s.nbar() * noise_bracket(s.nbar(), alpha)).max(T::zero()))
}

/// `dN̄_out/dα = 2 cosh²r sinh²r η/(1−η) + sinh²r`.
pub fn dmean_dalpha<T: Scalar>(r: T, alpha: T) -> Result<T> {
    let s = Squeezing::from_r(r)?;
    check_alpha(alpha)?;
    if alpha == T::one() {
        return invalid("alpha", 1.0, "derivative of the mean diverges at full loss");
    }
    let root = (T::one() - alpha).sqrt();
    Ok(T::two() * s.cosh2() * s.nbar() * eta(alpha) / root + s.nbar())
}

fn check_open<T: Scalar>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha < T::one() {
        Ok(())
    } else {
        invalid("alpha", alpha.to_f64_lossy(), "sensitivity is defined strictly inside (0, 1)")
    }
}

/// `Δα = ΔN_out / |dN̄_out/dα|`.
pub fn sensitivity<T: Scalar>(r: T, alpha: T) -> Result<T> {
    check_open(alpha)?;
    let slope = dmean_dalpha(r, alpha)?;
    if slope == T::zero() {
        return Err(Error::NotEstimable("output photon number does not depend on the loss"));
    }
    Ok(variance_photons(r, alpha)?.sqrt() / slope.abs())
}

/// `Δα = √A / B` with `B = √n̄ [1 + 2η(n̄+1)/√(1−α)]`.
pub fn sensitivity_ab<T: Scalar>(r: T, alpha: T) -> Result<T> {
    let s = Squeezing::from_r(r)?;
    check_open(alpha)?;
    if s.nbar() == T::zero() {
        return Err(Error::NotEstimable("output photon number does not depend on the loss"));
    }
    let n = s.nbar();
    let b = n.sqrt() * (T::one() + T::two() * eta(alpha) * (n + T::one()) / (T::one() - alpha).sqrt());
    Ok(noise_bracket(n, alpha).max(T::zero()).sqrt() / b)
}

/// Truncated small-`α` series of the sensitivity, valid for `α ≪ 1`, `αn̄ ≲ 1`.
pub fn small_alpha_expansion<T: Scalar>(r: T, alpha: T) -> Result<T> {
    let s = Squeezing::from_r(r)?;
    check_alpha(alpha)?;
    let n = s.nbar();
    if n == T::zero() {
        return invalid("nbar", 0.0, "expansion divides by the photon number");
    }
    let an = alpha * n;
    let half = T::half();
    let num = T::one() + an + an * an * an / T::lit(8.0) + half * alpha * (T::one() + half * an + half * an * an);
    let den = T::one() + an + alpha * (T::one() + T::lit(0.75) * an);
    Ok(alpha.sqrt() * num / (n.sqrt() * den))
}

pub fn report<T: Scalar>(r: T, alpha: T) -> Result<Su11Report<T>> {
    Ok(Su11Report {
        mean_out: mean_photons(r, alpha)?,
        variance_out: variance_photons(r, alpha)?,
        dmean_dalpha: dmean_dalpha(r, alpha)?,
        delta_alpha: sensitivity(r, alpha)?,
    })
}
