//! The 2D Rankine-vortex base solution and its non-homogeneous variant.
//!
//! The velocity is purely azimuthal, `U = (-x2 Phi(|x|^2), x1 Phi(|x|^2))`
//! for a compactly supported shape `Phi` of the squared radius. Velocity
//! gradients and the pressure gradient come out in closed form; only the
//! pressure *value* needs quadrature, which is done in the squared-radius
//! variable so the clipped tail is exact and the far field is reproduced
//! bitwise.

use crate::smoothfn::{quad_adaptive, SmoothProfile};
use crate::{BaseFlow, Error, Real, Result};

/// Shape and far-field pressure of a Rankine vortex.
///
/// `shape` is a function of the squared radius with compact support
/// `[t1, t2]`, `t1 >= 0`.
#[derive(Clone, Debug)]
pub struct VortexSpec<T: Real> {
    pub shape: SmoothProfile<T>,
    pub p_inf: T,
}

impl<T: Real> VortexSpec<T> {
    pub fn new(shape: SmoothProfile<T>, p_inf: T) -> Result<Self> {
        let (lo, _hi) = shape.support().interval().ok_or_else(|| {
            Error::Config("vortex shape must have compact support in |x|^2".into())
        })?;
        if lo < T::zero() {
            return Err(Error::Config(format!(
                "vortex shape support starts at {lo} < 0 in the squared-radius variable"
            )));
        }
        if !p_inf.is_finite() {
            return Err(Error::Config("far-field pressure must be finite".into()));
        }
        Ok(Self { shape, p_inf })
    }
}

fn rankine_velocity<T: Real>(shape: &SmoothProfile<T>, x: &[T; 2]) -> [T; 2] {
    let tau = x[0] * x[0] + x[1] * x[1];
    let phi = shape.eval(tau);
    [-x[1] * phi, x[0] * phi]
}

fn rankine_jacobian<T: Real>(shape: &SmoothProfile<T>, x: &[T; 2]) -> [[T; 2]; 2] {
    let tau = x[0] * x[0] + x[1] * x[1];
    let phi = shape.eval(tau);
    let dphi = shape.deriv(tau);
    let two = T::of(2.0);
    // d(u1)/dx = -2 x y Phi' and d(u2)/dy = 2 x y Phi' share one product so
    // the trace cancels exactly, not just to roundoff.
    let cross = two * x[0] * x[1] * dphi;
    [
        [-cross, -(phi + two * x[1] * x[1] * dphi)],
        [phi + two * x[0] * x[0] * dphi, cross],
    ]
}

/// Steady incompressible Rankine vortex `(U, P)` with exact derivatives.
#[derive(Clone, Debug)]
pub struct RankineSolution<T: Real> {
    shape: SmoothProfile<T>,
    p_inf: T,
    p_min: T,
    t_lo: T,
    t_hi: T,
    support_radius: T,
    quad_tol: T,
}

/// Build the Rankine base solution. The pressure satisfies
/// `dP/dr = r Phi^2(r^2)`, integrated here in the squared-radius variable:
/// `P = p_inf - (1/2) * Int_{max(|x|^2, t1)}^{t2} Phi^2`.
pub fn make_rankine<T: Real>(spec: VortexSpec<T>, quad_tol: T) -> Result<RankineSolution<T>> {
    let (t_lo, t_hi) = spec.shape.support().interval().expect("validated");
    let shape = spec.shape;
    let half = T::of(0.5);
    // Validate the worst-case quadrature once; pointwise pressure evaluation
    // reuses the same integrand over sub-intervals.
    let sq = |tau: T| {
        let v = shape.eval(tau);
        v * v
    };
    let full = quad_adaptive(sq, t_lo, t_hi, quad_tol);
    if !full.converged {
        return Err(Error::Quadrature {
            estimate: full.value.as_f64(),
            error_bound: full.error.as_f64(),
        });
    }
    Ok(RankineSolution {
        p_min: spec.p_inf - half * full.value,
        shape,
        p_inf: spec.p_inf,
        t_lo,
        t_hi,
        support_radius: t_hi.sqrt(),
        quad_tol,
    })
}

impl<T: Real> RankineSolution<T> {
    pub fn shape(&self) -> &SmoothProfile<T> {
        &self.shape
    }

    /// `U . grad U + grad P` assembled from the closed forms. Vanishes to
    /// roundoff for any shape.
    pub fn momentum_residual_base(&self, x: &[T; 2]) -> [T; 2] {
        let u = self.velocity(x);
        let j = self.velocity_jacobian(x);
        let gp = self.pressure_gradient(x);
        [
            j[0][0] * u[0] + j[0][1] * u[1] + gp[0],
            j[1][0] * u[0] + j[1][1] * u[1] + gp[1],
        ]
    }

    fn pressure_at_tau(&self, tau: T) -> T {
        if tau >= self.t_hi {
            return self.p_inf;
        }
        let lo = tau.max(self.t_lo);
        let shape = &self.shape;
        let sq = |t: T| {
            let v = shape.eval(t);
            v * v
        };
        let out = quad_adaptive(sq, lo, self.t_hi, self.quad_tol);
        self.p_inf - T::of(0.5) * out.value
    }
}

impl<T: Real> BaseFlow<T, 2> for RankineSolution<T> {
    fn velocity(&self, x: &[T; 2]) -> [T; 2] {
        rankine_velocity(&self.shape, x)
    }

    fn velocity_jacobian(&self, x: &[T; 2]) -> [[T; 2]; 2] {
        rankine_jacobian(&self.shape, x)
    }

    fn pressure(&self, x: &[T; 2]) -> T {
        self.pressure_at_tau(x[0] * x[0] + x[1] * x[1])
    }

    fn pressure_gradient(&self, x: &[T; 2]) -> [T; 2] {
        let tau = x[0] * x[0] + x[1] * x[1];
        let phi = self.shape.eval(tau);
        let phi2 = phi * phi;
        [phi2 * x[0], phi2 * x[1]]
    }

    fn p_inf(&self) -> T {
        self.p_inf
    }

    fn p_min(&self) -> T {
        self.p_min
    }

    fn support_radius(&self) -> T {
        self.support_radius
    }
}

/// Rankine velocity with a radial density `rho(|x|)` and matching radial
/// pressure: solves the steady non-homogeneous incompressible system
/// `div u = 0`, `u . grad rho = 0`, `rho u . grad u + grad pi = 0`.
///
/// The density may be unbounded at infinity; the pressure deviation is still
/// compactly supported because the shape is.
#[derive(Clone, Debug)]
pub struct InhomogeneousSolution2D<T: Real> {
    shape: SmoothProfile<T>,
    rho_radial: SmoothProfile<T>,
    p_inf: T,
    pi_min: T,
    r_lo: T,
    r_hi: T,
    quad_tol: T,
}

/// Requires `rho_radial >= 0`; a non-constant density additionally requires
/// the vortex shape to vanish in a neighbourhood of the origin (`t1 > 0`),
/// so that the composed fields stay smooth across `x = 0`.
pub fn make_inhomogeneous<T: Real>(
    rho_radial: SmoothProfile<T>,
    spec: VortexSpec<T>,
    quad_tol: T,
) -> Result<InhomogeneousSolution2D<T>> {
    let (t_lo, t_hi) = spec.shape.support().interval().expect("validated");
    let r_hi = t_hi.sqrt();
    for i in 0..=512 {
        let r = T::of(2.0) * r_hi * T::from_usize(i).unwrap() / T::of(512.0);
        let v = rho_radial.eval(r);
        if v < T::zero() {
            return Err(Error::Domain(format!(
                "radial density is negative ({v}) at r = {r}"
            )));
        }
    }
    if !rho_radial.is_constant() && !(t_lo > T::zero()) {
        return Err(Error::Config(
            "a non-constant radial density requires a vortex shape that vanishes near the origin \
             (support of the shape must start at t1 > 0)"
                .into(),
        ));
    }
    let r_lo = t_lo.max(T::zero()).sqrt();
    let shape = spec.shape;
    let integrand = {
        let shape = shape.clone();
        let rho = rho_radial.clone();
        move |r: T| {
            let phi = shape.eval(r * r);
            rho.eval(r) * r * phi * phi
        }
    };
    let full = quad_adaptive(&integrand, r_lo, r_hi, quad_tol);
    if !full.converged {
        return Err(Error::Quadrature {
            estimate: full.value.as_f64(),
            error_bound: full.error.as_f64(),
        });
    }
    Ok(InhomogeneousSolution2D {
        pi_min: spec.p_inf - full.value,
        shape,
        rho_radial,
        p_inf: spec.p_inf,
        r_lo,
        r_hi,
        quad_tol,
    })
}

impl<T: Real> InhomogeneousSolution2D<T> {
    pub fn density(&self, x: &[T; 2]) -> T {
        self.rho_radial.eval((x[0] * x[0] + x[1] * x[1]).sqrt())
    }

    pub fn density_gradient(&self, x: &[T; 2]) -> [T; 2] {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        if r == T::zero() {
            return [T::zero(); 2];
        }
        let d = self.rho_radial.deriv(r) / r;
        [d * x[0], d * x[1]]
    }

    pub fn velocity(&self, x: &[T; 2]) -> [T; 2] {
        rankine_velocity(&self.shape, x)
    }

    pub fn velocity_jacobian(&self, x: &[T; 2]) -> [[T; 2]; 2] {
        rankine_jacobian(&self.shape, x)
    }

    pub fn pressure(&self, x: &[T; 2]) -> T {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        if r >= self.r_hi {
            return self.p_inf;
        }
        let lo = r.max(self.r_lo);
        let shape = &self.shape;
        let rho = &self.rho_radial;
        let integrand = |t: T| {
            let phi = shape.eval(t * t);
            rho.eval(t) * t * phi * phi
        };
        let out = quad_adaptive(integrand, lo, self.r_hi, self.quad_tol);
        self.p_inf - out.value
    }

    pub fn pressure_gradient(&self, x: &[T; 2]) -> [T; 2] {
        let tau = x[0] * x[0] + x[1] * x[1];
        let phi = self.shape.eval(tau);
        let g = self.rho_radial.eval(tau.sqrt()) * phi * phi;
        [g * x[0], g * x[1]]
    }

    /// `rho u . grad u + grad pi`; roundoff-level for any valid inputs.
    pub fn momentum_residual(&self, x: &[T; 2]) -> [T; 2] {
        let rho = self.density(x);
        let u = self.velocity(x);
        let j = self.velocity_jacobian(x);
        let gp = self.pressure_gradient(x);
        [
            rho * (j[0][0] * u[0] + j[0][1] * u[1]) + gp[0],
            rho * (j[1][0] * u[0] + j[1][1] * u[1]) + gp[1],
        ]
    }

    pub fn p_inf(&self) -> T {
        self.p_inf
    }

    pub fn pi_min(&self) -> T {
        self.pi_min
    }

    pub fn support_radius(&self) -> T {
        self.r_hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::sample_points_annulus;
    use crate::Profile64;

    fn annular_shape() -> SmoothProfile<f64> {
        SmoothProfile::bump(1.0, 4.0, 0.75).unwrap()
    }

    /// Test-only profile: Phi = 1 on [1, 4] in the squared-radius variable.
    /// Not smooth, but the pressure integral has a closed form.
    fn boxcar_shape() -> Profile64 {
        SmoothProfile::from_fn(
            crate::smoothfn::Support::Interval(1.0, 4.0),
            3,
            std::sync::Arc::new(|_z, k| if k == 0 { 1.0 } else { 0.0 }),
        )
    }

    #[test]
    fn zero_shape_gives_rest_state() {
        let spec = VortexSpec::new(SmoothProfile::bump(1.0, 4.0, 0.0).unwrap(), 2.0).unwrap();
        let b = make_rankine(spec, 1e-12).unwrap();
        for x in [[0.0, 0.0], [1.3, -0.4], [5.0, 5.0]] {
            assert_eq!(b.velocity(&x), [0.0, 0.0]);
            assert_eq!(b.pressure(&x), 2.0);
            assert_eq!(b.momentum_residual_base(&x), [0.0, 0.0]);
        }
        assert_eq!(b.p_min(), 2.0);
    }

    #[test]
    fn boxcar_pressure_minimum_closed_form() {
        // P(0) = p_inf - (1/2) Int_1^4 1 dt = p_inf - 3/2
        let spec = VortexSpec::new(boxcar_shape(), 1.0).unwrap();
        let b = make_rankine(spec, 1e-12).unwrap();
        assert!((b.p_min() - (1.0 - 1.5)).abs() < 1e-12);
        assert!((b.pressure(&[0.0, 0.0]) - b.p_min()).abs() < 1e-12);
    }

    #[test]
    fn orthogonality_and_divergence() {
        let spec = VortexSpec::new(annular_shape(), 1.0).unwrap();
        let b = make_rankine(spec, 1e-12).unwrap();
        let pts = sample_points_annulus::<f64, 2>(42, 10_000, 0.0, 2.2);
        for x in &pts {
            let u = b.velocity(x);
            let gp = b.pressure_gradient(x);
            let dot = u[0] * gp[0] + u[1] * gp[1];
            let scale = (u[0] * u[0] + u[1] * u[1]).sqrt()
                * (gp[0] * gp[0] + gp[1] * gp[1]).sqrt();
            assert!(dot.abs() <= 1e-13 * scale.max(1.0), "U.gradP = {dot} at {x:?}");
            let j = b.velocity_jacobian(x);
            assert_eq!(j[0][0] + j[1][1], 0.0, "trace not exactly zero at {x:?}");
        }
    }

    #[test]
    fn momentum_residual_is_roundoff() {
        let spec = VortexSpec::new(annular_shape(), 1.0).unwrap();
        let b = make_rankine(spec, 1e-12).unwrap();
        let pts = sample_points_annulus::<f64, 2>(7, 1000, 0.0, 2.1);
        for x in &pts {
            let r = b.momentum_residual_base(x);
            let u = b.velocity(x);
            let gp = b.pressure_gradient(x);
            let scale = 1.0 + u[0] * u[0] + u[1] * u[1] + gp[0].abs() + gp[1].abs();
            let mag = (r[0] * r[0] + r[1] * r[1]).sqrt();
            assert!(mag <= 1e-12 * scale, "residual {mag} at {x:?}");
        }
        // outside the support everything is constant
        let far = b.momentum_residual_base(&[3.0, 0.1]);
        assert_eq!(far, [0.0, 0.0]);
    }

    #[test]
    fn pressure_is_monotone_and_exact_far_field() {
        let spec = VortexSpec::new(annular_shape(), 1.0).unwrap();
        let b = make_rankine(spec, 1e-12).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=1000 {
            let r = 3.0 * i as f64 / 1000.0;
            let p = b.pressure(&[r, 0.0]);
            assert!(p >= prev - 1e-13, "pressure decreased at r = {r}");
            assert!(p <= b.p_inf() && p >= b.p_min() - 1e-13);
            prev = p;
        }
        for x in [[2.0, 0.0], [0.0, -2.5], [10.0, 10.0]] {
            assert_eq!(b.pressure(&x).to_bits(), 1.0f64.to_bits());
            assert_eq!(b.velocity(&x), [0.0, 0.0]);
        }
        assert!(b.p_min() < b.p_inf());
    }

    #[test]
    fn pressure_gradient_matches_finite_differences() {
        let spec = VortexSpec::new(annular_shape(), 1.0).unwrap();
        let b = make_rankine(spec, 1e-13).unwrap();
        let hs = [1e-3, 5e-4, 2.5e-4];
        let mut errs = Vec::new();
        for &h in &hs {
            let mut worst = 0.0f64;
            for i in 0..50 {
                let x = [0.3 + 1.5 * i as f64 / 49.0, 0.7];
                let gp = b.pressure_gradient(&x);
                let fd0 = (b.pressure(&[x[0] + h, x[1]]) - b.pressure(&[x[0] - h, x[1]]))
                    / (2.0 * h);
                let fd1 = (b.pressure(&[x[0], x[1] + h]) - b.pressure(&[x[0], x[1] - h]))
                    / (2.0 * h);
                worst = worst.max((fd0 - gp[0]).abs().max((fd1 - gp[1]).abs()));
            }
            errs.push(worst);
        }
        let order = (errs[0] / errs[2]).ln() / (hs[0] / hs[2]).ln();
        assert!((1.7..=2.3).contains(&order), "observed order {order}, errs {errs:?}");
    }

    #[test]
    fn inhomogeneous_with_unit_density_matches_rankine() {
        let spec = VortexSpec::new(annular_shape(), 1.0).unwrap();
        let b = make_rankine(spec.clone(), 1e-12).unwrap();
        let v = make_inhomogeneous(SmoothProfile::constant(1.0), spec, 1e-12).unwrap();
        for x in [[0.0, 0.0], [1.2, 0.3], [1.6, -1.0], [3.0, 0.0]] {
            assert_eq!(v.velocity(&x), b.velocity(&x));
            assert!((v.pressure(&x) - b.pressure(&x)).abs() < 1e-12);
            assert_eq!(v.density(&x), 1.0);
        }
    }

    #[test]
    fn inhomogeneous_boxcar_closed_form() {
        // rho = 2: pi(0) = p_inf - 2 * Int_1^2 t dt = p_inf - 3
        let spec = VortexSpec::new(boxcar_shape(), 1.0).unwrap();
        let v = make_inhomogeneous(SmoothProfile::constant(2.0), spec, 1e-12).unwrap();
        assert!((v.pressure(&[0.0, 0.0]) - (1.0 - 3.0)).abs() < 1e-11);
    }

    #[test]
    fn inhomogeneous_unbounded_density_residuals() {
        let spec = VortexSpec::new(annular_shape(), 1.0).unwrap();
        let rho = SmoothProfile::poly(&[1.0, 0.0, 1.0]); // 1 + r^2
        let v = make_inhomogeneous(rho, spec, 1e-12).unwrap();
        let pts = sample_points_annulus::<f64, 2>(11, 1000, 0.0, 2.1);
        for x in &pts {
            let res = v.momentum_residual(x);
            let gp = v.pressure_gradient(x);
            let u = v.velocity(x);
            let scale = 1.0 + v.density(x) * (u[0] * u[0] + u[1] * u[1]) + gp[0].abs() + gp[1].abs();
            let mag = (res[0] * res[0] + res[1] * res[1]).sqrt();
            assert!(mag <= 1e-12 * scale, "residual {mag} at {x:?}");
            // transported density: u . grad rho = 0 for radial rho
            let gr = v.density_gradient(x);
            let dot = u[0] * gr[0] + u[1] * gr[1];
            assert!(dot.abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn inhomogeneous_rejects_shape_touching_origin() {
        let shape = SmoothProfile::bump(0.0, 4.0, 0.5).unwrap();
        let spec = VortexSpec::new(shape, 1.0).unwrap();
        let rho = SmoothProfile::poly(&[1.0, 0.0, 1.0]);
        assert!(matches!(
            make_inhomogeneous(rho, spec, 1e-12),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn vortex_spec_rejects_bad_shapes() {
        assert!(VortexSpec::new(SmoothProfile::constant(1.0), 1.0).is_err());
        let negative_start = SmoothProfile::bump(-1.0, 4.0, 0.5).unwrap();
        assert!(VortexSpec::new(negative_start, 1.0).is_err());
    }
}
