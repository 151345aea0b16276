//! Polytropic equation of state `pi(rho, s) = rho^gamma * exp(a s)`.
//!
//! This is the only thermodynamic closure in the library. It sits behind its
//! own module so that a second closure could be slotted in, but only the
//! polytropic law is implemented.

use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EosParams<T> {
    /// Adiabatic exponent, `> 1`.
    pub gamma: T,
    /// Entropy coefficient, `> 0`.
    pub a: T,
}

impl<T: Real> EosParams<T> {
    pub fn new(gamma: T, a: T) -> Result<Self> {
        if !(gamma > T::one()) || !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must be > 1, got {gamma}")));
        }
        if !(a > T::zero()) || !a.is_finite() {
            return Err(Error::Domain(format!("a must be > 0, got {a}")));
        }
        Ok(Self { gamma, a })
    }

    /// Pressure `rho^gamma * exp(a s)`; zero at vacuum.
    pub fn pressure(&self, rho: T, s: T) -> Result<T> {
        if rho < T::zero() {
            return Err(Error::Domain(format!("density must be >= 0, got {rho}")));
        }
        Ok(self.pressure_pos(rho, s))
    }

    /// Pressure without the domain check, for evaluators that guarantee
    /// `rho >= 0` by construction.
    #[inline]
    pub fn pressure_pos(&self, rho: T, s: T) -> T {
        rho.powf(self.gamma) * (self.a * s).exp()
    }

    /// `(d pi / d rho, d pi / d s)`; both strictly positive for `rho > 0`.
    pub fn pressure_partials(&self, rho: T, s: T) -> Result<(T, T)> {
        if rho <= T::zero() {
            return Err(Error::Domain(format!(
                "pressure partials need rho > 0, got {rho}"
            )));
        }
        Ok(self.pressure_partials_pos(rho, s))
    }

    #[inline]
    pub fn pressure_partials_pos(&self, rho: T, s: T) -> (T, T) {
        let es = (self.a * s).exp();
        let d_rho = self.gamma * rho.powf(self.gamma - T::one()) * es;
        let d_s = self.a * rho.powf(self.gamma) * es;
        (d_rho, d_s)
    }

    /// Specific internal energy of a gamma-law gas, `pi / ((gamma - 1) rho)`.
    pub fn internal_energy(&self, rho: T, s: T) -> Result<T> {
        if rho <= T::zero() {
            return Err(Error::Domain(format!(
                "internal energy needs rho > 0, got {rho}"
            )));
        }
        Ok(self.pressure_pos(rho, s) / ((self.gamma - T::one()) * rho))
    }

    /// Sound speed `sqrt(gamma * pi / rho)` from density and pressure.
    #[inline]
    pub fn sound_speed(&self, rho: T, pressure: T) -> T {
        (self.gamma * pressure / rho).sqrt()
    }

    /// Entropy recovered from density and pressure:
    /// `s = (ln pi - gamma ln rho) / a`.
    #[inline]
    pub fn entropy_from(&self, rho: T, pressure: T) -> T {
        (pressure.ln() - self.gamma * rho.ln()) / self.a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smoothfn::SmoothProfile;

    #[test]
    fn pressure_reference_values() {
        let eos = EosParams::new(1.4f64, 1.0).unwrap();
        assert_eq!(eos.pressure(1.0, 0.0).unwrap(), 1.0);
        assert_eq!(eos.pressure(0.0, 3.0).unwrap(), 0.0);
        let p2 = eos.pressure(2.0, 0.0).unwrap();
        assert!((p2 - 2.639015821545788).abs() < 1e-14); // 2^1.4
        let pe = eos.pressure(1.0, 1.0).unwrap();
        assert!((pe - std::f64::consts::E).abs() < 1e-15);
        assert!(eos.pressure(-1.0, 0.0).is_err());
    }

    #[test]
    fn partials_reference_values() {
        let eos2 = EosParams::new(2.0f64, 1.0).unwrap();
        let (dr, ds) = eos2.pressure_partials(1.0, 0.0).unwrap();
        assert_eq!((dr, ds), (2.0, 1.0));

        let eos14 = EosParams::new(1.4f64, 1.0).unwrap();
        let (dr, ds) = eos14.pressure_partials(1.0, 0.0).unwrap();
        assert!((dr - 1.4).abs() < 1e-15);
        assert!((ds - 1.0).abs() < 1e-15);
        assert!(eos14.pressure_partials(0.0, 0.0).is_err());
    }

    #[test]
    fn partials_match_finite_differences() {
        let eos = EosParams::new(1.4f64, 0.7).unwrap();
        let hs = [1e-3, 5e-4, 2.5e-4];
        let mut errs_rho = Vec::new();
        let mut errs_s = Vec::new();
        for &h in &hs {
            let mut worst_r = 0.0f64;
            let mut worst_s = 0.0f64;
            for i in 0..20 {
                let rho = 0.5 + 0.1 * i as f64;
                let s = -1.0 + 0.1 * i as f64;
                let (dr, ds) = eos.pressure_partials(rho, s).unwrap();
                let fd_r = (eos.pressure_pos(rho + h, s) - eos.pressure_pos(rho - h, s))
                    / (2.0 * h);
                let fd_s = (eos.pressure_pos(rho, s + h) - eos.pressure_pos(rho, s - h))
                    / (2.0 * h);
                worst_r = worst_r.max((fd_r - dr).abs());
                worst_s = worst_s.max((fd_s - ds).abs());
            }
            errs_rho.push(worst_r);
            errs_s.push(worst_s);
        }
        for errs in [errs_rho, errs_s] {
            let order = ((errs[0] / errs[2]).ln()) / (hs[0] / hs[2]).ln();
            assert!((1.7..=2.3).contains(&order), "observed order {order}");
        }
    }

    #[test]
    fn positive_on_sampled_grid() {
        let eos = EosParams::new(1.4f64, 1.0).unwrap();
        for i in 1..=100 {
            for j in 0..100 {
                let rho = i as f64 * 0.05;
                let s = -10.0 + 20.0 * j as f64 / 99.0;
                assert!(eos.pressure_pos(rho, s) > 0.0);
                let (dr, ds) = eos.pressure_partials(rho, s).unwrap();
                assert!(dr > 0.0 && ds > 0.0, "rho={rho} s={s}");
            }
        }
    }

    #[test]
    fn composition_with_ramps_is_monotone() {
        let eos = EosParams::new(1.4f64, 1.0).unwrap();
        let rho = SmoothProfile::ramp(0.8, 1.2, 0.0, 1.0).unwrap();
        let s = SmoothProfile::ramp(-0.5, 0.0, 0.0, 1.0).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let z = -0.5 + 2.0 * i as f64 / 400.0;
            let p = eos.pressure_pos(rho.eval(z), s.eval(z));
            assert!(p >= prev, "pressure decreased at z = {z}");
            prev = p;
        }
    }

    #[test]
    fn internal_energy_values() {
        let eos2 = EosParams::new(2.0f64, 1.0).unwrap();
        assert_eq!(eos2.internal_energy(1.0, 0.0).unwrap(), 1.0);
        let eos14 = EosParams::new(1.4f64, 1.0).unwrap();
        assert!((eos14.internal_energy(1.0, 0.0).unwrap() - 2.5).abs() < 1e-14);
        let e = eos14.internal_energy(2.0, 0.0).unwrap();
        assert!((e - 2.0f64.powf(1.4) / 0.8).abs() < 1e-14);
        assert!(eos14.internal_energy(0.0, 0.0).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(EosParams::new(1.0f64, 1.0).is_err());
        assert!(EosParams::new(1.4f64, 0.0).is_err());
        assert!(EosParams::new(1.4f64, -2.0).is_err());
    }
}
