use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Squeezing strength, stored both as `r` and as the mean photon number per
/// beam `n̄ = sinh²r` so neither parameterization loses precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Squeezing<T> {
    r: T,
    nbar: T,
}

impl<T: Scalar> Squeezing<T> {
    pub fn from_r(r: T) -> Result<Self> {
        if !(r >= T::zero()) || !r.is_finite() {
            return invalid("r", r.to_f64_lossy(), "squeezing strength must be finite and >= 0");
        }
        Ok(Self {
            r,
            nbar: r.sinh().powi(2),
        })
    }

    pub fn from_nbar(nbar: T) -> Result<Self> {
        if !(nbar >= T::zero()) || !nbar.is_finite() {
            return invalid("nbar", nbar.to_f64_lossy(), "mean photon number must be finite and >= 0");
        }
        Ok(Self {
            r: nbar.sqrt().asinh(),
            nbar,
        })
    }

    pub fn r(&self) -> T {
        self.r
    }

    /// `sinh²r`.
    pub fn nbar(&self) -> T {
        self.nbar
    }

    /// `cosh²r = n̄ + 1`.
    pub fn cosh2(&self) -> T {
        self.nbar + T::one()
    }

    /// `sinh r cosh r = √(n̄(n̄+1))`.
    pub fn sinh_cosh(&self) -> T {
        (self.nbar * self.cosh2()).sqrt()
    }

    /// `tanh²r = n̄/(n̄+1)`, the ratio of the thermal-like photon distribution.
    pub fn tanh2(&self) -> T {
        self.nbar / self.cosh2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameterizations_agree() {
        let a = Squeezing::from_nbar(10.0f64).unwrap();
        let b = Squeezing::from_r(a.r()).unwrap();
        assert!((b.nbar() - 10.0).abs() < 1e-12);
        assert!((a.sinh_cosh() - 110f64.sqrt()).abs() < 1e-12);
        assert_eq!(Squeezing::from_r(0.0).unwrap().nbar(), 0.0);
    }

    #[test]
    fn rejects_negative() {
        assert!(Squeezing::from_nbar(-1.0).is_err());
        assert!(Squeezing::from_r(f64::INFINITY).is_err());
    }
}
