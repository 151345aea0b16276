//! Reprofiling a steady incompressible base solution into a compressible
//! steady state.
//!
//! Given a base pair `(U, P)` with `div U = 0` and `U . grad P = 0`, any
//! profiles `rho = rho~(P)`, `s = s~(P)`, `u = Psi(P) U` solve the full
//! system provided the scalar compatibility condition
//! `d/dz pi(rho~(z), s~(z)) = rho~(z) Psi^2(z)` holds on the pressure range.
//! Both directions of that condition are implemented:
//!
//! * profile-first: prescribe monotone `rho~`, `s~` and read off `Psi` in
//!   closed form ([`psi_from_ramps`]);
//! * psi-first: prescribe `Psi` and integrate the scalar ODE for `rho~`
//!   ([`rho_from_psi`]), optionally shooting on the starting value to hit a
//!   prescribed far-field density ([`shoot_rho0`]).
//!
//! The two routes are mutually inverse on the canonical ramp family, which
//! the test suite checks.

use std::sync::Arc;

use crate::eos::EosParams;
use crate::smoothfn::{SmoothProfile, Support};
use crate::{AnalyticState, BaseFlow, Error, FarField, FlowField, Real, Result, StatePoint};

/// Monotone density/entropy profiles of the pressure variable, flat outside
/// `(b, p_inf)` with prescribed plateau values.
#[derive(Clone, Debug)]
pub struct RampPair<T: Real> {
    pub rho_tilde: SmoothProfile<T>,
    pub s_tilde: SmoothProfile<T>,
    /// Lower pressure threshold; must not exceed the base pressure minimum.
    pub b: T,
    pub p_inf: T,
    pub rho_0: T,
    pub rho_inf: T,
    pub s_0: T,
    pub s_inf: T,
}

impl<T: Real> RampPair<T> {
    /// Wrap explicit profiles; plateau values are read off at `b` and
    /// `p_inf`. Requires positive density plateaus.
    pub fn new(
        rho_tilde: SmoothProfile<T>,
        s_tilde: SmoothProfile<T>,
        b: T,
        p_inf: T,
    ) -> Result<Self> {
        if !(b < p_inf) {
            return Err(Error::Config(format!(
                "profile interval empty: b = {b}, p_inf = {p_inf}"
            )));
        }
        let rho_0 = rho_tilde.eval(b);
        let rho_inf = rho_tilde.eval(p_inf);
        if !(rho_0 > T::zero()) || !(rho_inf > T::zero()) {
            return Err(Error::Config(format!(
                "density plateaus must be positive: rho_0 = {rho_0}, rho_inf = {rho_inf}"
            )));
        }
        Ok(Self {
            s_0: s_tilde.eval(b),
            s_inf: s_tilde.eval(p_inf),
            rho_tilde,
            s_tilde,
            b,
            p_inf,
            rho_0,
            rho_inf,
        })
    }

    /// Canonical smooth ramps transitioning over exactly `(b, p_inf)`.
    pub fn canonical(rho_0: T, rho_inf: T, s_0: T, s_inf: T, b: T, p_inf: T) -> Result<Self> {
        if !(b < p_inf) {
            return Err(Error::Config(format!(
                "profile interval empty: b = {b}, p_inf = {p_inf}"
            )));
        }
        let rho_tilde = SmoothProfile::ramp(rho_0, rho_inf, b, p_inf)?;
        let s_tilde = SmoothProfile::ramp(s_0, s_inf, b, p_inf)?;
        Self::new(rho_tilde, s_tilde, b, p_inf)
    }
}

/// Derivative of the composed pressure along the profiles, divided by the
/// density: `g(z) = (1/rho~) d/dz pi(rho~(z), s~(z))`. `Psi = sqrt(g)`.
fn g_value<T: Real>(
    rho: &SmoothProfile<T>,
    s: &SmoothProfile<T>,
    eos: &EosParams<T>,
    z: T,
) -> T {
    let r = rho.eval(z);
    let (d_rho, d_s) = eos.pressure_partials_pos(r, s.eval(z));
    (d_rho * rho.deriv(z) + d_s * s.deriv(z)) / r
}

fn g_deriv<T: Real>(
    rho: &SmoothProfile<T>,
    s: &SmoothProfile<T>,
    eos: &EosParams<T>,
    z: T,
) -> T {
    let r = rho.eval(z);
    let r1 = rho.deriv(z);
    let r2 = rho.eval_k(z, 2);
    let sv = s.eval(z);
    let s1 = s.deriv(z);
    let s2 = s.eval_k(z, 2);
    let (big_a, big_b) = eos.pressure_partials_pos(r, sv);
    let a_prime = big_a * ((eos.gamma - T::one()) * r1 / r + eos.a * s1);
    let b_prime = big_b * (eos.gamma * r1 / r + eos.a * s1);
    let num = big_a * r1 + big_b * s1;
    let num_prime = a_prime * r1 + big_a * r2 + b_prime * s1 + big_b * s2;
    num_prime / r - num * r1 / (r * r)
}

/// Closed-form velocity profile for given ramps:
/// `Psi(z) = sqrt((1/rho~) [d_rho pi * rho~' + d_s pi * s~'])`, supported
/// exactly on `[b, p_inf]`.
///
/// The derivative is the closed-form differentiation of the expression under
/// the root away from the endpoints, and defined as 0 at the endpoints where
/// the flat profile tails make the limit vanish.
pub fn psi_from_ramps<T: Real>(
    ramps: &RampPair<T>,
    eos: &EosParams<T>,
) -> Result<SmoothProfile<T>> {
    let width = ramps.p_inf - ramps.b;
    // Reject profiles that produce a negative radicand anywhere; sampling
    // stays clear of the outermost tail where exp-underflow makes everything
    // an exact zero anyway.
    for i in 0..=2000 {
        let z = ramps.b + width * (T::of(0.02) + T::of(0.96) * T::from_usize(i).unwrap() / T::of(2000.0));
        let g = g_value(&ramps.rho_tilde, &ramps.s_tilde, eos, z);
        if g < T::zero() && g.abs() > T::epsilon() {
            return Err(Error::Config(format!(
                "profiles give a negative radicand {g} at z = {z}; the density profile must be \
                 non-decreasing"
            )));
        }
    }
    let rho = ramps.rho_tilde.clone();
    let s = ramps.s_tilde.clone();
    let eos = *eos;
    let (b, p_inf) = (ramps.b, ramps.p_inf);
    let eval = move |z: T, k: usize| -> T {
        if z <= b || z >= p_inf {
            return T::zero();
        }
        let g = g_value(&rho, &s, &eos, z).max(T::zero());
        match k {
            0 => g.sqrt(),
            1 => {
                if g == T::zero() {
                    T::zero()
                } else {
                    g_deriv(&rho, &s, &eos, z) / (T::of(2.0) * g.sqrt())
                }
            }
            _ => {
                // finite difference of the closed-form first derivative;
                // orders 2 and 3 are diagnostic only
                let h = (p_inf - b) * T::of(1e-5);
                let lo = g_psi_k1(&rho, &s, &eos, b, p_inf, z - h, k - 1);
                let hi = g_psi_k1(&rho, &s, &eos, b, p_inf, z + h, k - 1);
                (hi - lo) / (T::of(2.0) * h)
            }
        }
    };
    Ok(SmoothProfile::from_fn(
        Support::Interval(ramps.b, ramps.p_inf),
        3,
        Arc::new(eval),
    ))
}

// Recursive helper for the FD-backed higher orders of Psi.
fn g_psi_k1<T: Real>(
    rho: &SmoothProfile<T>,
    s: &SmoothProfile<T>,
    eos: &EosParams<T>,
    b: T,
    p_inf: T,
    z: T,
    k: usize,
) -> T {
    if z <= b || z >= p_inf {
        return T::zero();
    }
    let g = g_value(rho, s, eos, z).max(T::zero());
    match k {
        0 => g.sqrt(),
        1 => {
            if g == T::zero() {
                T::zero()
            } else {
                g_deriv(rho, s, eos, z) / (T::of(2.0) * g.sqrt())
            }
        }
        _ => {
            let h = (p_inf - b) * T::of(1e-5);
            (g_psi_k1(rho, s, eos, b, p_inf, z + h, k - 1)
                - g_psi_k1(rho, s, eos, b, p_inf, z - h, k - 1))
                / (T::of(2.0) * h)
        }
    }
}

fn ode_rhs<T: Real>(
    psi: &SmoothProfile<T>,
    s_tilde: &SmoothProfile<T>,
    eos: &EosParams<T>,
    z: T,
    y: T,
) -> T {
    let p = psi.eval(z);
    (y.powf(T::of(2.0) - eos.gamma) * p * p * (-eos.a * s_tilde.eval(z)).exp()
        - eos.a * y * s_tilde.deriv(z))
        / eos.gamma
}

fn rk4_run<T: Real>(
    psi: &SmoothProfile<T>,
    s_tilde: &SmoothProfile<T>,
    eos: &EosParams<T>,
    b: T,
    p_inf: T,
    rho_0: T,
    n: usize,
) -> Result<(Vec<T>, Vec<T>)> {
    let h = (p_inf - b) / T::from_usize(n).unwrap();
    let half = T::of(0.5);
    let sixth = T::one() / T::of(6.0);
    let mut ys = Vec::with_capacity(n + 1);
    let mut fs = Vec::with_capacity(n + 1);
    ys.push(rho_0);
    let guard = |z: T, y: T| -> Result<()> {
        if y <= T::zero() {
            Err(Error::VacuumBreach {
                z: z.as_f64(),
                rho: y.as_f64(),
            })
        } else {
            Ok(())
        }
    };
    for i in 0..n {
        let z = b + h * T::from_usize(i).unwrap();
        let y = ys[i];
        guard(z, y)?;
        let k1 = ode_rhs(psi, s_tilde, eos, z, y);
        fs.push(k1);
        let y2 = y + half * h * k1;
        guard(z, y2)?;
        let k2 = ode_rhs(psi, s_tilde, eos, z + half * h, y2);
        let y3 = y + half * h * k2;
        guard(z, y3)?;
        let k3 = ode_rhs(psi, s_tilde, eos, z + half * h, y3);
        let y4 = y + h * k3;
        guard(z, y4)?;
        let k4 = ode_rhs(psi, s_tilde, eos, z + h, y4);
        ys.push(y + h * sixth * (k1 + T::of(2.0) * (k2 + k3) + k4));
    }
    let z_end = p_inf;
    guard(z_end, ys[n])?;
    fs.push(ode_rhs(psi, s_tilde, eos, z_end, ys[n]));
    Ok((ys, fs))
}

/// Dense output of the density ODE: cubic Hermite interpolation of the fine
/// solve, extended flat on both sides.
struct DenseOde<T: Real> {
    b: T,
    p_inf: T,
    h: T,
    ys: Vec<T>,
    fs: Vec<T>,
    rho_0: T,
    y_end: T,
    psi: SmoothProfile<T>,
    s_tilde: SmoothProfile<T>,
    eos: EosParams<T>,
}

impl<T: Real> DenseOde<T> {
    fn value(&self, z: T) -> T {
        if z <= self.b {
            return self.rho_0;
        }
        if z >= self.p_inf {
            return self.y_end;
        }
        let n = self.ys.len() - 1;
        let rel = (z - self.b) / self.h;
        let mut i = rel.floor().to_usize().unwrap_or(0);
        if i >= n {
            i = n - 1;
        }
        let th = rel - T::from_usize(i).unwrap();
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (f0, f1) = (self.fs[i], self.fs[i + 1]);
        let one = T::one();
        let two = T::of(2.0);
        let three = T::of(3.0);
        let t2 = th * th;
        let t3 = t2 * th;
        y0 * (two * t3 - three * t2 + one) + y1 * (three * t2 - two * t3)
            + self.h * (f0 * (t3 - two * t2 + th) + f1 * (t3 - t2))
    }

    fn eval(&self, z: T, k: usize) -> T {
        match k {
            0 => self.value(z),
            1 => {
                if z <= self.b || z >= self.p_inf {
                    T::zero()
                } else {
                    // The derivative channel is the ODE right-hand side at the
                    // interpolated value, so the compatibility condition
                    // d/dz pi(rho~, s~) = rho~ Psi^2 holds pointwise to
                    // roundoff, independent of the interpolation error.
                    ode_rhs(&self.psi, &self.s_tilde, &self.eos, z, self.value(z))
                }
            }
            _ => {
                let h = (self.p_inf - self.b) * T::of(1e-5);
                (self.eval(z + h, k - 1) - self.eval(z - h, k - 1)) / (T::of(2.0) * h)
            }
        }
    }
}

/// Result of the psi-first construction direction.
#[derive(Debug)]
pub struct RhoFromPsi<T: Real> {
    pub profile: SmoothProfile<T>,
    /// Achieved far-field density `rho~(p_inf)`.
    pub rho_inf: T,
    /// Richardson estimate of the integration error.
    pub error_estimate: T,
}

/// Relative Richardson tolerance accepted by [`rho_from_psi`].
pub const ODE_RICHARDSON_REL_TOL: f64 = 1e-8;

/// Integrate `rho~' = (rho~^(2-gamma) Psi^2 e^(-a s~) - a rho~ s~') / gamma`
/// from `z = b`, `rho~(b) = rho_0`, up to `p_inf` with classical RK4 at a
/// fixed step, verified by Richardson comparison against the half step.
pub fn rho_from_psi<T: Real>(
    psi: &SmoothProfile<T>,
    s_tilde: &SmoothProfile<T>,
    rho_0: T,
    eos: &EosParams<T>,
    b: T,
    p_inf: T,
    step: T,
) -> Result<RhoFromPsi<T>> {
    if !(rho_0 > T::zero()) {
        return Err(Error::Domain(format!("rho_0 must be positive, got {rho_0}")));
    }
    if !(step > T::zero()) {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }
    if !(b < p_inf) {
        return Err(Error::Config(format!(
            "empty pressure interval [{b}, {p_inf}]"
        )));
    }
    if let Some((lo, hi)) = psi.support().interval() {
        let tol = (p_inf - b) * T::of(1e-12);
        if lo < b - tol || hi > p_inf + tol {
            return Err(Error::Config(format!(
                "psi support [{lo}, {hi}] is not contained in [{b}, {p_inf}]"
            )));
        }
    }
    let width = p_inf - b;
    let n = (width / step).ceil().to_usize().unwrap_or(4).max(4);

    let (coarse, _) = rk4_run(psi, s_tilde, eos, b, p_inf, rho_0, n)?;
    let (fine, fs) = rk4_run(psi, s_tilde, eos, b, p_inf, rho_0, 2 * n)?;

    let mut est = T::zero();
    let mut y_max = T::zero();
    for (i, yc) in coarse.iter().enumerate() {
        est = est.max((*yc - fine[2 * i]).abs());
        y_max = y_max.max(fine[2 * i].abs());
    }
    est = est / T::of(15.0);
    let tol = T::of(ODE_RICHARDSON_REL_TOL) * y_max.max(T::one());
    if est > tol {
        return Err(Error::OdeAccuracy {
            step: step.as_f64(),
            estimate: est.as_f64(),
            tolerance: tol.as_f64(),
        });
    }

    let y_end = *fine.last().unwrap();
    let dense = DenseOde {
        b,
        p_inf,
        h: width / T::from_usize(2 * n).unwrap(),
        ys: fine,
        fs,
        rho_0,
        y_end,
        psi: psi.clone(),
        s_tilde: s_tilde.clone(),
        eos: *eos,
    };
    let dense = Arc::new(dense);
    let profile = SmoothProfile::from_fn(
        Support::Line,
        3,
        Arc::new(move |z, k| dense.eval(z, k)),
    );
    Ok(RhoFromPsi {
        profile,
        rho_inf: y_end,
        error_estimate: est,
    })
}

/// Find `rho_0` so that the psi-first route reaches a prescribed far-field
/// density. The terminal value is strictly increasing in `rho_0`, so a
/// bracketing bisection is reliable; the initial bracket is widened once
/// before giving up.
pub fn shoot_rho0<T: Real>(
    psi: &SmoothProfile<T>,
    s_tilde: &SmoothProfile<T>,
    target_rho_inf: T,
    eos: &EosParams<T>,
    b: T,
    p_inf: T,
    step: T,
    tol: T,
) -> Result<T> {
    if !(target_rho_inf > T::zero()) {
        return Err(Error::Domain(format!(
            "target far-field density must be positive, got {target_rho_inf}"
        )));
    }
    // None encodes "density hit vacuum on the way": rho_0 was too small.
    let terminal = |r0: T| -> Result<Option<T>> {
        match rho_from_psi(psi, s_tilde, r0, eos, b, p_inf, step) {
            Ok(out) => Ok(Some(out.rho_inf)),
            Err(Error::VacuumBreach { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };

    let brackets = [(T::of(1e-6), T::of(1e6)), (T::of(1e-9), T::of(1e9))];
    for (attempt, (flo, fhi)) in brackets.iter().enumerate() {
        let mut lo = *flo * target_rho_inf;
        let mut hi = *fhi * target_rho_inf;
        let v_lo = terminal(lo)?;
        let v_hi = terminal(hi)?;
        let lo_below = match v_lo {
            None => true,
            Some(v) => v <= target_rho_inf,
        };
        let hi_above = matches!(v_hi, Some(v) if v >= target_rho_inf);
        if !(lo_below && hi_above) {
            if attempt == 0 {
                continue;
            }
            return Err(Error::Shooting(format!(
                "target rho_inf = {target_rho_inf} not bracketed by rho_0 in [{lo}, {hi}]"
            )));
        }
        for _ in 0..200 {
            let mid = T::of(0.5) * (lo + hi);
            match terminal(mid)? {
                None => lo = mid,
                Some(v) => {
                    if (v - target_rho_inf).abs() <= tol {
                        return Ok(mid);
                    }
                    if v < target_rho_inf {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
            }
            if hi - lo <= T::epsilon() * hi.abs() {
                break;
            }
        }
        return Err(Error::Shooting(format!(
            "bisection stalled: bracket [{lo}, {hi}] without reaching |rho_inf - target| <= {tol}"
        )));
    }
    unreachable!()
}

/// Per-sample finding of [`check_solv`].
#[derive(Clone, Debug)]
pub struct SolvViolation<T> {
    pub z: T,
    pub what: String,
}

/// Diagnostic sampling of the profile-family conditions: positive density,
/// strictly increasing density profile, non-decreasing entropy profile, flat
/// plateaus outside `(b, p_inf)`.
///
/// Samples stay 2% clear of the interval ends, where the flat tails of the
/// canonical ramps underflow to exact zeros.
pub fn check_solv<T: Real>(ramps: &RampPair<T>) -> Vec<SolvViolation<T>> {
    let mut out = Vec::new();
    let width = ramps.p_inf - ramps.b;
    for i in 0..1000 {
        let frac = T::of(0.02) + T::of(0.96) * T::from_usize(i).unwrap() / T::of(999.0);
        let z = ramps.b + width * frac;
        let r = ramps.rho_tilde.eval(z);
        if !(r > T::zero()) {
            out.push(SolvViolation {
                z,
                what: format!("density profile not positive: {r}"),
            });
        }
        let r1 = ramps.rho_tilde.deriv(z);
        if !(r1 > T::zero()) {
            out.push(SolvViolation {
                z,
                what: format!("density profile not strictly increasing: derivative {r1}"),
            });
        }
        let s1 = ramps.s_tilde.deriv(z);
        if s1 < T::zero() {
            out.push(SolvViolation {
                z,
                what: format!("entropy profile decreasing: derivative {s1}"),
            });
        }
    }
    for (label, z) in [
        ("below b", ramps.b - width),
        ("at b", ramps.b),
        ("at p_inf", ramps.p_inf),
        ("above p_inf", ramps.p_inf + width),
    ] {
        let (want_rho, want_s) = if z <= ramps.b {
            (ramps.rho_0, ramps.s_0)
        } else {
            (ramps.rho_inf, ramps.s_inf)
        };
        if ramps.rho_tilde.eval(z) != want_rho || ramps.s_tilde.eval(z) != want_s {
            out.push(SolvViolation {
                z,
                what: format!("plateau value not attained exactly {label}"),
            });
        }
        if ramps.rho_tilde.deriv(z) != T::zero() || ramps.s_tilde.deriv(z) != T::zero() {
            out.push(SolvViolation {
                z,
                what: format!("profile derivative not exactly zero {label}"),
            });
        }
    }
    out
}

/// The compressible steady state `rho = rho~(P)`, `s = s~(P)`,
/// `u = Psi(P) U`, with all first derivatives assembled by the chain rule
/// through the base pressure.
pub struct LiftedSolution<T: Real, const D: usize> {
    base: Arc<dyn BaseFlow<T, D>>,
    rho_tilde: SmoothProfile<T>,
    s_tilde: SmoothProfile<T>,
    psi: SmoothProfile<T>,
    eos: EosParams<T>,
    b: T,
    p_inf: T,
    far: FarField<T>,
}

fn assemble<T: Real, const D: usize>(
    base: Arc<dyn BaseFlow<T, D>>,
    rho_tilde: SmoothProfile<T>,
    s_tilde: SmoothProfile<T>,
    psi: SmoothProfile<T>,
    eos: EosParams<T>,
    b: T,
    p_inf: T,
) -> Result<LiftedSolution<T, D>> {
    if p_inf != base.p_inf() {
        return Err(Error::Config(format!(
            "profile far-field pressure {p_inf} does not match the base solution's {}",
            base.p_inf()
        )));
    }
    if b > base.p_min() {
        return Err(Error::Config(format!(
            "lower profile threshold b = {b} exceeds the base pressure minimum {}; the \
             construction requires b <= min P so that the velocity profile covers the whole \
             pressure range",
            base.p_min()
        )));
    }
    let rho_inf = rho_tilde.eval(p_inf);
    let s_inf = s_tilde.eval(p_inf);
    if !(rho_inf > T::zero()) {
        return Err(Error::Config(format!(
            "far-field density must be positive, got {rho_inf}"
        )));
    }
    for i in 0..=100 {
        let z = b + (p_inf - b) * T::from_usize(i).unwrap() / T::of(100.0);
        let r = rho_tilde.eval(z);
        if !(r > T::zero()) {
            return Err(Error::Config(format!(
                "density profile not positive at z = {z}: {r}"
            )));
        }
    }
    let far = FarField {
        rho: rho_inf,
        s: s_inf,
        pressure: eos.pressure_pos(rho_inf, s_inf),
    };
    Ok(LiftedSolution {
        base,
        rho_tilde,
        s_tilde,
        psi,
        eos,
        b,
        p_inf,
        far,
    })
}

/// Profile-first construction: compute `Psi` from the ramps and assemble the
/// lifted solution over `base`.
pub fn lift_solution<T: Real, const D: usize>(
    base: Arc<dyn BaseFlow<T, D>>,
    ramps: &RampPair<T>,
    eos: &EosParams<T>,
) -> Result<LiftedSolution<T, D>> {
    let psi = psi_from_ramps(ramps, eos)?;
    assemble(
        base,
        ramps.rho_tilde.clone(),
        ramps.s_tilde.clone(),
        psi,
        *eos,
        ramps.b,
        ramps.p_inf,
    )
}

/// Starting density for the psi-first direction.
pub enum RhoStart<T> {
    Given(T),
    Shoot { target_rho_inf: T, tol: T },
}

/// Psi-first construction: integrate the density ODE (optionally shooting on
/// `rho_0`) and assemble the lifted solution. Returns the solution and the
/// achieved far-field density.
pub fn lift_with_psi<T: Real, const D: usize>(
    base: Arc<dyn BaseFlow<T, D>>,
    psi: SmoothProfile<T>,
    s_tilde: SmoothProfile<T>,
    start: RhoStart<T>,
    eos: &EosParams<T>,
    step: T,
) -> Result<(LiftedSolution<T, D>, T)> {
    let (b, p_inf) = psi
        .support()
        .interval()
        .ok_or_else(|| Error::Config("psi must have compact support [b, p_inf]".into()))?;
    let rho_0 = match start {
        RhoStart::Given(r0) => r0,
        RhoStart::Shoot {
            target_rho_inf,
            tol,
        } => shoot_rho0(&psi, &s_tilde, target_rho_inf, eos, b, p_inf, step, tol)?,
    };
    let ode = rho_from_psi(&psi, &s_tilde, rho_0, eos, b, p_inf, step)?;
    let rho_inf = ode.rho_inf;
    let lifted = assemble(base, ode.profile, s_tilde, psi, *eos, b, p_inf)?;
    Ok((lifted, rho_inf))
}

impl<T: Real, const D: usize> LiftedSolution<T, D> {
    pub fn base(&self) -> &Arc<dyn BaseFlow<T, D>> {
        &self.base
    }
    pub fn psi(&self) -> &SmoothProfile<T> {
        &self.psi
    }
    pub fn rho_tilde(&self) -> &SmoothProfile<T> {
        &self.rho_tilde
    }
    pub fn s_tilde(&self) -> &SmoothProfile<T> {
        &self.s_tilde
    }
    pub fn eos(&self) -> &EosParams<T> {
        &self.eos
    }
    pub fn b(&self) -> T {
        self.b
    }
    pub fn p_inf(&self) -> T {
        self.p_inf
    }
}

impl<T: Real, const D: usize> FlowField<T, D> for LiftedSolution<T, D> {
    fn density(&self, x: &[T; D]) -> T {
        self.rho_tilde.eval(self.base.pressure(x))
    }

    fn velocity(&self, x: &[T; D]) -> [T; D] {
        let psi = self.psi.eval(self.base.pressure(x));
        let u = self.base.velocity(x);
        let mut out = [T::zero(); D];
        for i in 0..D {
            out[i] = psi * u[i];
        }
        out
    }

    fn entropy(&self, x: &[T; D]) -> T {
        self.s_tilde.eval(self.base.pressure(x))
    }

    fn pressure(&self, x: &[T; D]) -> T {
        let p = self.base.pressure(x);
        self.eos
            .pressure_pos(self.rho_tilde.eval(p), self.s_tilde.eval(p))
    }

    fn farfield(&self) -> FarField<T> {
        self.far
    }

    fn support_radius(&self) -> T {
        self.base.support_radius()
    }

    fn values(&self, x: &[T; D]) -> (T, [T; D], T, T) {
        let p = self.base.pressure(x);
        let rho = self.rho_tilde.eval(p);
        let s = self.s_tilde.eval(p);
        let psi = self.psi.eval(p);
        let big_u = self.base.velocity(x);
        let mut u = [T::zero(); D];
        for i in 0..D {
            u[i] = psi * big_u[i];
        }
        (rho, u, s, self.eos.pressure_pos(rho, s))
    }
}

impl<T: Real, const D: usize> AnalyticState<T, D> for LiftedSolution<T, D> {
    fn density_gradient(&self, x: &[T; D]) -> [T; D] {
        self.eval_all(x).grad_rho
    }
    fn velocity_jacobian(&self, x: &[T; D]) -> [[T; D]; D] {
        self.eval_all(x).jac_u
    }
    fn entropy_gradient(&self, x: &[T; D]) -> [T; D] {
        self.eval_all(x).grad_s
    }
    fn pressure_gradient(&self, x: &[T; D]) -> [T; D] {
        self.eval_all(x).grad_pi
    }

    /// Fused evaluation sharing one base-pressure computation.
    fn eval_all(&self, x: &[T; D]) -> StatePoint<T, D> {
        let p = self.base.pressure(x);
        let grad_p = self.base.pressure_gradient(x);
        let big_u = self.base.velocity(x);
        let jac_big_u = self.base.velocity_jacobian(x);

        let rho = self.rho_tilde.eval(p);
        let drho = self.rho_tilde.deriv(p);
        let s = self.s_tilde.eval(p);
        let ds = self.s_tilde.deriv(p);
        let psi = self.psi.eval(p);
        let dpsi = self.psi.deriv(p);

        let mut u = [T::zero(); D];
        let mut jac_u = [[T::zero(); D]; D];
        for i in 0..D {
            u[i] = psi * big_u[i];
            for j in 0..D {
                jac_u[i][j] = dpsi * grad_p[j] * big_u[i] + psi * jac_big_u[i][j];
            }
        }

        let pi = self.eos.pressure_pos(rho, s);
        let (dpi_drho, dpi_ds) = if rho > T::zero() {
            self.eos.pressure_partials_pos(rho, s)
        } else {
            (T::zero(), T::zero())
        };
        let dpi_dz = dpi_drho * drho + dpi_ds * ds;

        let mut grad_rho = [T::zero(); D];
        let mut grad_s = [T::zero(); D];
        let mut grad_pi = [T::zero(); D];
        for j in 0..D {
            grad_rho[j] = drho * grad_p[j];
            grad_s[j] = ds * grad_p[j];
            grad_pi[j] = dpi_dz * grad_p[j];
        }

        StatePoint {
            rho,
            u,
            s,
            pi,
            grad_rho,
            jac_u,
            grad_s,
            grad_pi,
        }
    }
}
