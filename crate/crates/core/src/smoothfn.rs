//! Smooth flat-tailed one-dimensional profiles and adaptive quadrature.
//!
//! Every profile family here is built from `exp(-1/t)`-style tails, so all
//! derivatives vanish to every order at the support (or plateau) boundaries.
//! That is stronger than the `C³` the rest of the construction needs, and it
//! keeps square roots of derivative expressions smooth. Derivatives up to
//! order 3 are hand-derived closed forms, checked against finite differences
//! in the test suite; outside the support they are returned as bitwise zero.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Real, Result};

/// Where a profile may be nonzero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support<T> {
    /// Nonzero values confined to the closed interval `[lo, hi]`.
    Interval(T, T),
    /// The profile may be nonzero anywhere (plateaued ramps, polynomials).
    Line,
}

impl<T: Real> Support<T> {
    pub fn interval(&self) -> Option<(T, T)> {
        match *self {
            Support::Interval(lo, hi) => Some((lo, hi)),
            Support::Line => None,
        }
    }

    pub fn contains(&self, z: T) -> bool {
        match *self {
            Support::Interval(lo, hi) => z >= lo && z <= hi,
            Support::Line => true,
        }
    }
}

/// Class order reported for the closed-form `exp(-1/t)` families, which are
/// smooth to every order.
pub const CLASS_SMOOTH: u32 = u32::MAX;

#[derive(Clone)]
enum Kind<T: Real> {
    Constant(T),
    /// Coefficients in increasing degree.
    Poly(Vec<T>),
    SmoothStep {
        z0: T,
        z1: T,
    },
    Ramp {
        lo: T,
        hi: T,
        z0: T,
        z1: T,
    },
    Bump {
        z0: T,
        z1: T,
        amplitude: T,
    },
    Custom(Arc<dyn Fn(T, usize) -> T + Send + Sync>),
}

/// A scalar function of one variable with derivatives up to order 3 and an
/// explicit support.
///
/// Invariants: evaluations of any order are bitwise `0.0` outside an
/// [`Support::Interval`] support, and plateau values of ramps and steps are
/// returned exactly (not through arithmetic that could re-round them).
#[derive(Clone)]
pub struct SmoothProfile<T: Real> {
    support: Support<T>,
    class_order: u32,
    kind: Kind<T>,
}

impl<T: Real> fmt::Debug for SmoothProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            Kind::Constant(_) => "constant",
            Kind::Poly(_) => "poly",
            Kind::SmoothStep { .. } => "smoothstep",
            Kind::Ramp { .. } => "ramp",
            Kind::Bump { .. } => "bump",
            Kind::Custom(_) => "custom",
        };
        f.debug_struct("SmoothProfile")
            .field("kind", &kind)
            .field("support", &self.support)
            .finish()
    }
}

fn check_interval<T: Real>(z0: T, z1: T) -> Result<()> {
    if !(z0 < z1) || !z0.is_finite() || !z1.is_finite() {
        return Err(Error::InvalidInterval(format!(
            "[{z0}, {z1}] is not a valid finite interval"
        )));
    }
    Ok(())
}

impl<T: Real> SmoothProfile<T> {
    /// The constant function `c`.
    pub fn constant(c: T) -> Self {
        Self {
            support: Support::Line,
            class_order: CLASS_SMOOTH,
            kind: Kind::Constant(c),
        }
    }

    /// Polynomial with `coeffs[k]` multiplying `z^k`.
    pub fn poly(coeffs: &[T]) -> Self {
        Self {
            support: Support::Line,
            class_order: CLASS_SMOOTH,
            kind: Kind::Poly(coeffs.to_vec()),
        }
    }

    /// Monotone step: exactly 0 for `z <= z0`, exactly 1 for `z >= z1`,
    /// strictly increasing in between, flat to every order at both ends.
    ///
    /// `S(t) = e(t) / (e(t) + e(1-t))` with `e(t) = exp(-1/t)` and
    /// `t = (z - z0)/(z1 - z0)`.
    pub fn smoothstep(z0: T, z1: T) -> Result<Self> {
        check_interval(z0, z1)?;
        Ok(Self {
            support: Support::Line,
            class_order: CLASS_SMOOTH,
            kind: Kind::SmoothStep { z0, z1 },
        })
    }

    /// `amplitude * exp(1 - 1/(1-t^2))` with `t = (2z - z0 - z1)/(z1 - z0)`:
    /// positive exactly on `(z0, z1)`, zero with all derivatives outside.
    pub fn bump(z0: T, z1: T, amplitude: T) -> Result<Self> {
        check_interval(z0, z1)?;
        Ok(Self {
            support: Support::Interval(z0, z1),
            class_order: CLASS_SMOOTH,
            kind: Kind::Bump { z0, z1, amplitude },
        })
    }

    /// `v_lo + (v_hi - v_lo) * smoothstep(z0, z1)`, with the plateau values
    /// returned exactly outside the transition interval.
    pub fn ramp(v_lo: T, v_hi: T, z0: T, z1: T) -> Result<Self> {
        check_interval(z0, z1)?;
        Ok(Self {
            support: Support::Line,
            class_order: CLASS_SMOOTH,
            kind: Kind::Ramp {
                lo: v_lo,
                hi: v_hi,
                z0,
                z1,
            },
        })
    }

    /// Profile backed by an arbitrary evaluator `f(z, k)` returning the k-th
    /// derivative. The evaluator is only consulted inside `support`; outside
    /// an interval support the profile returns exact zeros. The caller is
    /// responsible for `f` actually being `C^{class_order}`.
    pub fn from_fn(
        support: Support<T>,
        class_order: u32,
        f: Arc<dyn Fn(T, usize) -> T + Send + Sync>,
    ) -> Self {
        Self {
            support,
            class_order,
            kind: Kind::Custom(f),
        }
    }

    pub fn support(&self) -> Support<T> {
        self.support
    }

    pub fn class_order(&self) -> u32 {
        self.class_order
    }

    /// True if the profile is a literal constant.
    pub fn is_constant(&self) -> bool {
        match &self.kind {
            Kind::Constant(_) => true,
            Kind::Poly(c) => c.len() <= 1,
            Kind::Ramp { lo, hi, .. } => lo == hi,
            _ => false,
        }
    }

    pub fn eval(&self, z: T) -> T {
        self.eval_k(z, 0)
    }

    pub fn deriv(&self, z: T) -> T {
        self.eval_k(z, 1)
    }

    /// k-th derivative, `k <= 3`.
    pub fn eval_k(&self, z: T, k: usize) -> T {
        assert!(k <= 3, "derivative order {k} not available (max 3)");
        if let Support::Interval(lo, hi) = self.support {
            if z < lo || z > hi {
                return T::zero();
            }
        }
        match &self.kind {
            Kind::Constant(c) => {
                if k == 0 {
                    *c
                } else {
                    T::zero()
                }
            }
            Kind::Poly(coeffs) => poly_eval_k(coeffs, z, k),
            Kind::SmoothStep { z0, z1 } => step_eval_k(*z0, *z1, z, k),
            Kind::Ramp { lo, hi, z0, z1 } => {
                if k == 0 {
                    if z <= *z0 {
                        *lo
                    } else if z >= *z1 {
                        *hi
                    } else {
                        *lo + (*hi - *lo) * step_eval_k(*z0, *z1, z, 0)
                    }
                } else {
                    (*hi - *lo) * step_eval_k(*z0, *z1, z, k)
                }
            }
            Kind::Bump { z0, z1, amplitude } => bump_eval_k(*z0, *z1, *amplitude, z, k),
            Kind::Custom(f) => f(z, k),
        }
    }

    /// Max of `|f|` over `n` uniform samples of `[lo, hi]`.
    pub fn max_abs_sampled(&self, lo: T, hi: T, n: usize) -> T {
        let mut m = T::zero();
        for i in 0..n {
            let z = lo + (hi - lo) * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap();
            m = m.max(self.eval(z).abs());
        }
        m
    }
}

fn poly_eval_k<T: Real>(coeffs: &[T], z: T, k: usize) -> T {
    // Differentiate the coefficient list k times, then Horner.
    let mut c: Vec<T> = coeffs.to_vec();
    for _ in 0..k {
        if c.len() <= 1 {
            return T::zero();
        }
        c = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| a * T::from_usize(i).unwrap())
            .collect();
    }
    let mut acc = T::zero();
    for &a in c.iter().rev() {
        acc = acc * z + a;
    }
    acc
}

/// Derivatives of the canonical step through its logistic form
/// `S = 1/(1 + exp(h))`, `h(t) = 1/t - 1/(1-t)`.
fn step_eval_k<T: Real>(z0: T, z1: T, z: T, k: usize) -> T {
    let zero = T::zero();
    let one = T::one();
    if z <= z0 {
        return zero;
    }
    if z >= z1 {
        return if k == 0 { one } else { zero };
    }
    let w = z1 - z0;
    let t = (z - z0) / w;
    let h = t.recip() - (one - t).recip();
    // exp overflow/underflow saturates s to an exact 0 or 1, which is the
    // correct flat-tail value; the weight s(1-s) is then exactly 0 and the
    // derivative branches below short-circuit before touching 1/t powers
    // that could overflow.
    let s = (one + h.exp()).recip();
    if k == 0 {
        return s;
    }
    let wgt = s * (one - s);
    if wgt == zero {
        return zero;
    }
    let two = T::of(2.0);
    let u = t.recip();
    let v = (one - t).recip();
    let h1 = -(u * u + v * v);
    match k {
        1 => -h1 * wgt / w,
        2 => {
            let h2 = two * (u * u * u - v * v * v);
            wgt * (-h2 + h1 * h1 * (one - two * s)) / (w * w)
        }
        3 => {
            let h2 = two * (u * u * u - v * v * v);
            let h3 = -T::of(6.0) * (u * u * u * u + v * v * v * v);
            let m = one - two * s;
            wgt * (-h3 + T::of(3.0) * h1 * h2 * m - h1 * h1 * h1 * (m * m - two * wgt))
                / (w * w * w)
        }
        _ => unreachable!(),
    }
}

fn bump_eval_k<T: Real>(z0: T, z1: T, amplitude: T, z: T, k: usize) -> T {
    let zero = T::zero();
    let one = T::one();
    let w = z1 - z0;
    let t = ((z - z0) + (z - z1)) / w;
    if t <= -one || t >= one {
        return zero;
    }
    let v = (one - t * t).recip();
    let b = amplitude * (one - v).exp();
    // exp underflow to an exact zero; bail out before forming q-derivative
    // powers that could overflow into 0 * inf.
    if b == zero {
        return zero;
    }
    if k == 0 {
        return b;
    }
    let two = T::of(2.0);
    let c = two / w; // dt/dz
    let q1 = -two * t * v * v;
    match k {
        1 => b * q1 * c,
        2 => {
            let q2 = -two * v * v - T::of(8.0) * t * t * v * v * v;
            b * (q2 + q1 * q1) * c * c
        }
        3 => {
            let q2 = -two * v * v - T::of(8.0) * t * t * v * v * v;
            let q3 = -T::of(24.0) * t * v * v * v * (one + two * t * t * v);
            b * (q3 + T::of(3.0) * q1 * q2 + q1 * q1 * q1) * c * c * c
        }
        _ => unreachable!(),
    }
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature
// ---------------------------------------------------------------------------

/// 15-point Kronrod abscissae (positive half), 7-point Gauss embedded.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Default relative tolerance used when callers have no better choice.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Bisection depth cap of the adaptive scheme.
pub const MAX_DEPTH: u32 = 40;

#[derive(Clone, Copy, Debug)]
pub(crate) struct QuadOutcome<T> {
    pub value: T,
    pub error: T,
    pub converged: bool,
}

fn rescale_error<T: Real>(err: T, res_abs: T, res_asc: T) -> T {
    let mut scaled = err.abs();
    if res_asc != T::zero() && scaled != T::zero() {
        let ratio = (T::of(200.0) * scaled / res_asc).powf(T::of(1.5));
        scaled = if ratio < T::one() {
            res_asc * ratio
        } else {
            res_asc
        };
    }
    let floor_threshold = T::min_positive_value() / (T::of(50.0) * T::epsilon());
    if res_abs > floor_threshold {
        scaled = scaled.max(T::of(50.0) * T::epsilon() * res_abs);
    }
    scaled
}

/// One Gauss-Kronrod 7-15 panel. Returns (integral, error bound, resabs).
fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T, T) {
    let half = T::of(0.5);
    let center = half * (a + b);
    let hl = half * (b - a);
    let fc = f(center);

    let mut resk = T::of(WGK[7]) * fc;
    let mut resg = T::of(WG[3]) * fc;
    let mut resabs = resk.abs();

    let mut fv = [[T::zero(); 2]; 7];
    for j in 0..7 {
        let x = hl * T::of(XGK[j]);
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = [f1, f2];
        let wk = T::of(WGK[j]);
        resk = resk + wk * (f1 + f2);
        resabs = resabs + wk * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg = resg + T::of(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = resk * half;
    let mut resasc = T::of(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        resasc = resasc + T::of(WGK[j]) * ((fv[j][0] - mean).abs() + (fv[j][1] - mean).abs());
    }

    let abs_hl = hl.abs();
    let result = resk * hl;
    let err = rescale_error((resk - resg) * hl, resabs * abs_hl, resasc * abs_hl);
    (result, err, resabs * abs_hl)
}

fn adapt<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    tol: T,
    depth: u32,
    span: T,
    out: &mut QuadOutcome<T>,
) {
    let (val, err, _) = gk15(f, a, b);
    let width = b - a;
    if err <= tol || width <= span * T::epsilon() {
        out.value = out.value + val;
        out.error = out.error + err;
        return;
    }
    if depth >= MAX_DEPTH {
        out.value = out.value + val;
        out.error = out.error + err;
        out.converged = false;
        return;
    }
    let mid = a + width * T::of(0.5);
    let half_tol = tol * T::of(0.5);
    adapt(f, a, mid, half_tol, depth + 1, span, out);
    adapt(f, mid, b, half_tol, depth + 1, span, out);
}

/// Adaptive quadrature with a relative-error target. Always returns its best
/// estimate; `converged` records whether the target was met within the depth
/// cap.
pub(crate) fn quad_adaptive<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, rel_tol: T) -> QuadOutcome<T> {
    if a == b {
        return QuadOutcome {
            value: T::zero(),
            error: T::zero(),
            converged: true,
        };
    }
    let (first, err0, resabs) = gk15(&f, a, b);
    let scale = first.abs().max(resabs);
    if scale == T::zero() {
        return QuadOutcome {
            value: T::zero(),
            error: T::zero(),
            converged: true,
        };
    }
    let tol = rel_tol * scale;
    if err0 <= tol {
        return QuadOutcome {
            value: first,
            error: err0,
            converged: true,
        };
    }
    let mut out = QuadOutcome {
        value: T::zero(),
        error: T::zero(),
        converged: true,
    };
    adapt(&f, a, b, tol, 0, b - a, &mut out);
    out
}

/// Integrate a profile over `[a, b]` to the requested relative tolerance.
///
/// Infinite limits are allowed only when the profile has compact support;
/// they are clipped to it (the tails are exact zeros, so clipping is exact).
pub fn integrate<T: Real>(p: &SmoothProfile<T>, a: T, b: T, rel_tol: T) -> Result<T> {
    if a > b {
        return Err(Error::InvalidInterval(format!(
            "integration bounds out of order: [{a}, {b}]"
        )));
    }
    let (lo, hi) = match p.support() {
        Support::Interval(lo, hi) => (a.max(lo), b.min(hi)),
        Support::Line => {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidInterval(
                    "infinite integration limit requires a compactly supported integrand".into(),
                ));
            }
            (a, b)
        }
    };
    if lo >= hi {
        return Ok(T::zero());
    }
    integrate_fn(|z| p.eval(z), lo, hi, rel_tol)
}

/// Integrate a closure over a finite interval to the requested relative
/// tolerance.
pub fn integrate_fn<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, rel_tol: T) -> Result<T> {
    if a > b {
        return Err(Error::InvalidInterval(format!(
            "integration bounds out of order: [{a}, {b}]"
        )));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInterval(
            "integration limits must be finite".into(),
        ));
    }
    if rel_tol <= T::zero() {
        return Err(Error::Domain("rel_tol must be positive".into()));
    }
    let out = quad_adaptive(f, a, b, rel_tol);
    if out.converged {
        Ok(out.value)
    } else {
        Err(Error::Quadrature {
            estimate: out.value.as_f64(),
            error_bound: out.error.as_f64(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fd2(f: impl Fn(f64) -> f64, z: f64, h: f64) -> f64 {
        (f(z + h) - f(z - h)) / (2.0 * h)
    }

    /// Least-squares slope of ln(err) against ln(h).
    fn observed_order(hs: &[f64], errs: &[f64]) -> f64 {
        let n = hs.len() as f64;
        let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
        let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let xm = xs.iter().sum::<f64>() / n;
        let ym = ys.iter().sum::<f64>() / n;
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
        let den: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
        num / den
    }

    #[test]
    fn smoothstep_tails_and_midpoint() {
        let s = SmoothProfile::<f64>::smoothstep(0.0, 1.0).unwrap();
        assert_eq!(s.eval(-1.0), 0.0);
        assert_eq!(s.eval(0.0), 0.0);
        assert_eq!(s.eval(1.0), 1.0);
        assert_eq!(s.eval(7.0), 1.0);
        assert!((s.eval(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn smoothstep_quarter_matches_closed_form() {
        // e(t)/(e(t) + e(1-t)) at t = 1/4, evaluated through the definition
        // rather than the logistic form used by the implementation.
        let e = |t: f64| (-1.0 / t).exp();
        let expected = e(0.25) / (e(0.25) + e(0.75));
        let s = SmoothProfile::<f64>::smoothstep(0.0, 1.0).unwrap();
        assert!((s.eval(0.25) - expected).abs() <= 1e-16);
    }

    #[test]
    fn smoothstep_rejects_bad_interval() {
        assert!(SmoothProfile::<f64>::smoothstep(1.0, 1.0).is_err());
        assert!(SmoothProfile::<f64>::smoothstep(2.0, 1.0).is_err());
        assert!(SmoothProfile::<f64>::bump(2.0, 1.0, 1.0).is_err());
        assert!(SmoothProfile::<f64>::ramp(0.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn bump_peak_boundary_and_value() {
        let b = SmoothProfile::<f64>::bump(-1.0, 1.0, 1.0).unwrap();
        assert_eq!(b.eval(0.0), 1.0);
        assert_eq!(b.eval(-1.0), 0.0);
        assert_eq!(b.eval(1.0), 0.0);
        let b2 = SmoothProfile::<f64>::bump(-1.0, 1.0, 2.0).unwrap();
        let expected = 2.0 * (-1.0f64 / 3.0).exp(); // 2 exp(1 - 1/(1 - 1/4))
        assert!((b2.eval(0.5) - expected).abs() <= 1e-15 * expected);
    }

    #[test]
    fn ramp_plateaus_are_exact() {
        let r = SmoothProfile::<f64>::ramp(1.0, 2.0, 0.0, 1.0).unwrap();
        assert_eq!(r.eval(-3.0), 1.0);
        assert_eq!(r.eval(0.0), 1.0);
        assert_eq!(r.eval(2.0), 2.0);
        assert!((r.eval(0.5) - 1.5).abs() < 1e-15);
        for k in 1..=3 {
            assert_eq!(r.eval_k(-3.0, k), 0.0);
            assert_eq!(r.eval_k(2.0, k), 0.0);
        }
        let degenerate = SmoothProfile::<f64>::ramp(1.0, 1.0, 0.0, 1.0).unwrap();
        for z in [-1.0, 0.3, 0.9, 5.0] {
            assert_eq!(degenerate.eval(z), 1.0);
            assert_eq!(degenerate.deriv(z), 0.0);
        }
    }

    #[test]
    fn ramp_is_strictly_monotone_inside() {
        let r = SmoothProfile::<f64>::ramp(0.5, 2.0, -1.0, 3.0).unwrap();
        for i in 1..200 {
            let z = -1.0 + 4.0 * i as f64 / 200.0;
            if z < 3.0 {
                assert!(r.deriv(z) > 0.0, "deriv not positive at z = {z}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let profiles: Vec<(&str, SmoothProfile<f64>)> = vec![
            ("step", SmoothProfile::smoothstep(0.0, 1.0).unwrap()),
            ("bump", SmoothProfile::bump(0.0, 1.0, 1.3).unwrap()),
            ("ramp", SmoothProfile::ramp(0.7, 1.9, 0.0, 1.0).unwrap()),
        ];
        let hs = [1e-2, 5e-3, 2.5e-3];
        for (name, p) in &profiles {
            for k in 0..3 {
                let errs: Vec<f64> = hs
                    .iter()
                    .map(|&h| {
                        let mut worst = 0.0f64;
                        for i in 0..100 {
                            // keep clear of the flat tails where both sides are 0
                            let z = 0.1 + 0.8 * i as f64 / 99.0;
                            let fd = fd2(|y| p.eval_k(y, k), z, h);
                            worst = worst.max((fd - p.eval_k(z, k + 1)).abs());
                        }
                        worst
                    })
                    .collect();
                let order = observed_order(&hs, &errs);
                assert!(
                    (1.7..=2.3).contains(&order),
                    "{name} k={k}: observed order {order}, errs {errs:?}"
                );
            }
        }
    }

    #[test]
    fn poly_derivatives_are_exact() {
        let p = SmoothProfile::<f64>::poly(&[1.0, 0.0, 1.0]); // 1 + z^2
        assert_eq!(p.eval(2.0), 5.0);
        assert_eq!(p.deriv(2.0), 4.0);
        assert_eq!(p.eval_k(2.0, 2), 2.0);
        assert_eq!(p.eval_k(2.0, 3), 0.0);
    }

    #[test]
    fn quadrature_trivial_cases() {
        let one = SmoothProfile::<f64>::constant(1.0);
        assert!((integrate(&one, 0.0, 2.0, 1e-10).unwrap() - 2.0).abs() < 1e-14);
        let id = SmoothProfile::<f64>::poly(&[0.0, 1.0]);
        assert!((integrate(&id, 1.0, 2.0, 1e-10).unwrap() - 1.5).abs() < 1e-14);
        assert_eq!(integrate(&id, 1.0, 1.0, 1e-10).unwrap(), 0.0);
        assert!(integrate(&id, 2.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn quadrature_clips_infinite_limits_to_support() {
        let b = SmoothProfile::<f64>::bump(-1.0, 1.0, 1.0).unwrap();
        let adaptive = integrate(&b, f64::NEG_INFINITY, f64::INFINITY, 1e-10).unwrap();

        // brute-force oracle: composite Simpson with 10^6 panels
        let n = 1_000_000usize;
        let h = 2.0 / n as f64;
        let mut acc = b.eval(-1.0) + b.eval(1.0);
        for i in 1..n {
            let z = -1.0 + i as f64 * h;
            acc += b.eval(z) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let oracle = acc * h / 3.0;

        assert!(
            (adaptive - oracle).abs() <= 1e-10 * oracle,
            "adaptive {adaptive} vs oracle {oracle}"
        );

        // unbounded support cannot be clipped
        let line = SmoothProfile::<f64>::constant(1.0);
        assert!(integrate(&line, f64::NEG_INFINITY, 0.0, 1e-10).is_err());
    }

    #[test]
    fn quadrature_failure_carries_best_estimate() {
        // A highly oscillatory integrand under an absurd tolerance exhausts
        // the depth cap.
        let err = integrate_fn(|z: f64| (1e7 * z).sin(), 0.0, 1.0, 1e-15).unwrap_err();
        match err {
            Error::Quadrature {
                estimate,
                error_bound,
            } => {
                assert!(estimate.is_finite());
                assert!(error_bound > 0.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn f32_instantiation_works() {
        let b = SmoothProfile::<f32>::bump(-1.0, 1.0, 1.0).unwrap();
        assert_eq!(b.eval(0.0), 1.0f32);
        assert_eq!(b.eval(1.5), 0.0f32);
        let v = integrate(&b, -1.0f32, 1.0f32, 1e-5f32).unwrap();
        assert!((v - 0.443_99).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn bump_tails_are_bitwise_zero(
            z0 in -10.0f64..10.0,
            width in 0.1f64..10.0,
            amp in 0.1f64..100.0,
            offset in 1e-12f64..50.0,
            k in 0usize..=3,
        ) {
            let z1 = z0 + width;
            let b = SmoothProfile::<f64>::bump(z0, z1, amp).unwrap();
            prop_assert_eq!(b.eval_k(z0 - offset, k).to_bits(), 0u64);
            prop_assert_eq!(b.eval_k(z1 + offset, k).to_bits(), 0u64);
            prop_assert_eq!(b.eval_k(z0, k).to_bits(), 0u64);
            prop_assert_eq!(b.eval_k(z1, k).to_bits(), 0u64);
        }

        #[test]
        fn quadrature_exact_on_low_degree_polynomials(
            c in prop::array::uniform6(-3.0f64..3.0),
            a in -4.0f64..0.0,
            width in 0.5f64..6.0,
        ) {
            let b = a + width;
            let p = SmoothProfile::<f64>::poly(&c);
            let got = integrate(&p, a, b, 1e-12).unwrap();
            // antiderivative evaluated exactly
            let anti = |z: f64| {
                c.iter()
                    .enumerate()
                    .map(|(i, &ci)| ci * z.powi(i as i32 + 1) / (i as f64 + 1.0))
                    .sum::<f64>()
            };
            let exact = anti(b) - anti(a);
            let scale = exact.abs().max(1.0);
            prop_assert!((got - exact).abs() <= 1e-12 * scale,
                "got {} exact {}", got, exact);
        }
    }
}
