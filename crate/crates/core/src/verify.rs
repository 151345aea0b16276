//! Independent verification: finite-difference residuals on grids (order 2
//! and 4 central stencils on the conservative-form equations), residuals
//! assembled from exact gradients, the virial identity, far-field exactness
//! and the pressure-deficit property.
//!
//! The FD path deliberately uses field *values* only, never the construction's
//! analytic gradients, so the two residual routes are independent. Canned
//! corruptions provide negative controls proving the gates are not vacuous.

use std::cell::Cell;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::eos::EosParams;
use crate::smoothfn::quad_adaptive;
use crate::{AnalyticState, BaseFlow, Error, FarField, FlowField, Real, Result, StatePoint};

/// Uniform 2D grid. Residual studies use the node lattice
/// `origin + (i h, j h)`; the finite-volume solver reads `dims` as cell
/// counts with centers at `origin + ((i+1/2) h, (j+1/2) h)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid2D<T> {
    pub origin: [T; 2],
    pub h: T,
    pub dims: [usize; 2],
}

impl<T: Real> Grid2D<T> {
    /// Node lattice centered on the origin covering `radius + margin` on all
    /// sides.
    pub fn covering(radius: T, h: T, margin: T) -> Result<Self> {
        if !(h > T::zero()) {
            return Err(Error::Config(format!("grid spacing must be positive: {h}")));
        }
        if margin < T::of(4.0) * h {
            return Err(Error::GridTooSmall(format!(
                "margin {margin} below the 4h = {} required around the support",
                T::of(4.0) * h
            )));
        }
        let half = radius + margin;
        let n = (T::of(2.0) * half / h).ceil().to_usize().unwrap() + 1;
        let extent = h * T::from_usize(n - 1).unwrap();
        Ok(Self {
            origin: [-extent * T::of(0.5), -extent * T::of(0.5)],
            h,
            dims: [n, n],
        })
    }

    /// Cell lattice centered on the origin covering `radius + margin`.
    pub fn covering_cells(radius: T, h: T, margin: T) -> Result<Self> {
        if !(h > T::zero()) {
            return Err(Error::Config(format!("grid spacing must be positive: {h}")));
        }
        let half = radius + margin;
        let n = (T::of(2.0) * half / h).ceil().to_usize().unwrap().max(4);
        let extent = h * T::from_usize(n).unwrap();
        Ok(Self {
            origin: [-extent * T::of(0.5), -extent * T::of(0.5)],
            h,
            dims: [n, n],
        })
    }

    /// Same box, half the spacing (exact nesting).
    pub fn refined(&self) -> Self {
        Self {
            origin: self.origin,
            h: self.h * T::of(0.5),
            dims: [2 * (self.dims[0] - 1) + 1, 2 * (self.dims[1] - 1) + 1],
        }
    }

    /// Same box, doubled cell counts (for cell lattices).
    pub fn refined_cells(&self) -> Self {
        Self {
            origin: self.origin,
            h: self.h * T::of(0.5),
            dims: [2 * self.dims[0], 2 * self.dims[1]],
        }
    }

    pub fn node(&self, i: usize, j: usize) -> [T; 2] {
        [
            self.origin[0] + self.h * T::from_usize(i).unwrap(),
            self.origin[1] + self.h * T::from_usize(j).unwrap(),
        ]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> [T; 2] {
        [
            self.origin[0] + self.h * (T::from_usize(i).unwrap() + T::of(0.5)),
            self.origin[1] + self.h * (T::from_usize(j).unwrap() + T::of(0.5)),
        ]
    }
}

pub(crate) fn pairwise_sum<T: Real>(v: &[T]) -> T {
    if v.len() <= 8 {
        return v.iter().fold(T::zero(), |a, &b| a + b);
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// L-infinity and L2 norms of one equation residual, with the magnitude scale
/// of the cancelling terms for relative gating.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Norms<T> {
    pub linf: T,
    pub l2: T,
    #[serde(skip)]
    pub scale: T,
}

impl<T: Real> Norms<T> {
    fn from_samples(res: &[T], scales: &[T], cell: Option<T>) -> Self {
        let linf = res.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
        let scale = scales.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
        let sq: Vec<T> = res.iter().map(|&r| r * r).collect();
        let sum = pairwise_sum(&sq);
        let l2 = match cell {
            // discrete integral norm on a grid
            Some(h) => h * sum.sqrt(),
            // RMS over a point cloud
            None => (sum / T::from_usize(res.len().max(1)).unwrap()).sqrt(),
        };
        Norms { linf, l2, scale }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EquationNorms<T> {
    pub mass: Norms<T>,
    pub momx: Norms<T>,
    pub momy: Norms<T>,
    pub entropy: Norms<T>,
}

/// Residual norms of the steady equations in conservative form.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport<T> {
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid2D<T>>,
    pub equations: EquationNorms<T>,
    pub points: usize,
}

impl<T: Real> ResidualReport<T> {
    /// Largest `linf / max(scale, 1)` over the four equations.
    pub fn worst_relative(&self) -> T {
        let rel = |n: &Norms<T>| n.linf / n.scale.max(T::one());
        rel(&self.equations.mass)
            .max(rel(&self.equations.momx))
            .max(rel(&self.equations.momy))
            .max(rel(&self.equations.entropy))
    }
}

/// Central-difference order for [`residual_fd`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdOrder {
    Two,
    Four,
}

impl FdOrder {
    fn margin(self) -> usize {
        match self {
            FdOrder::Two => 1,
            FdOrder::Four => 2,
        }
    }
    fn tag(self) -> &'static str {
        match self {
            FdOrder::Two => "fd2",
            FdOrder::Four => "fd4",
        }
    }
}

/// Grid residuals of `div(rho u) = 0`, `div(rho u x u) + grad pi = 0`,
/// `div(rho s u) = 0` using central differences of the pointwise flux values.
/// Norms are taken over interior nodes only (stencil-truncated boundary nodes
/// are excluded).
pub fn residual_fd<T: Real, S: FlowField<T, 2> + ?Sized>(
    state: &S,
    grid: &Grid2D<T>,
    order: FdOrder,
) -> Result<ResidualReport<T>> {
    let [nx, ny] = grid.dims;
    let m = order.margin();
    if nx < 2 * m + 3 || ny < 2 * m + 3 {
        return Err(Error::GridTooSmall(format!(
            "{}x{} grid cannot hold an order-{} stencil interior",
            nx,
            ny,
            2 * m
        )));
    }
    let r = state.support_radius();
    let need = r + T::of(4.0) * grid.h;
    let far = grid.node(nx - 1, ny - 1);
    if grid.origin[0] > -need || grid.origin[1] > -need || far[0] < need || far[1] < need {
        return Err(Error::GridTooSmall(format!(
            "grid box does not cover the support radius {r} with a 4h margin"
        )));
    }

    // flux samples: [Fx_mass, Fx_momx, Fx_momy, Fx_s, Fy_mass, Fy_momx, Fy_momy, Fy_s]
    let flux: Vec<[T; 8]> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % nx, idx / nx);
            let x = grid.node(i, j);
            let rho = state.density(&x);
            let u = state.velocity(&x);
            let s = state.entropy(&x);
            let pi = state.pressure(&x);
            [
                rho * u[0],
                rho * u[0] * u[0] + pi,
                rho * u[0] * u[1],
                rho * s * u[0],
                rho * u[1],
                rho * u[0] * u[1],
                rho * u[1] * u[1] + pi,
                rho * s * u[1],
            ]
        })
        .collect();

    let at = |i: usize, j: usize| &flux[j * nx + i];
    let h = grid.h;
    let cap = (nx - 2 * m) * (ny - 2 * m);
    let mut res: [Vec<T>; 4] = std::array::from_fn(|_| Vec::with_capacity(cap));
    let mut scl: [Vec<T>; 4] = std::array::from_fn(|_| Vec::with_capacity(cap));

    let two_h = T::of(2.0) * h;
    let twelve_h = T::of(12.0) * h;
    let eight = T::of(8.0);
    for j in m..ny - m {
        for i in m..nx - m {
            for eq in 0..4 {
                let (dx, ax, dy, ay) = match order {
                    FdOrder::Two => {
                        let dx = (at(i + 1, j)[eq] - at(i - 1, j)[eq]) / two_h;
                        let ax = (at(i + 1, j)[eq].abs() + at(i - 1, j)[eq].abs()) / two_h;
                        let dy = (at(i, j + 1)[eq + 4] - at(i, j - 1)[eq + 4]) / two_h;
                        let ay = (at(i, j + 1)[eq + 4].abs() + at(i, j - 1)[eq + 4].abs()) / two_h;
                        (dx, ax, dy, ay)
                    }
                    FdOrder::Four => {
                        let dx = (-at(i + 2, j)[eq] + eight * at(i + 1, j)[eq]
                            - eight * at(i - 1, j)[eq]
                            + at(i - 2, j)[eq])
                            / twelve_h;
                        let ax = (at(i + 2, j)[eq].abs()
                            + eight * at(i + 1, j)[eq].abs()
                            + eight * at(i - 1, j)[eq].abs()
                            + at(i - 2, j)[eq].abs())
                            / twelve_h;
                        let dy = (-at(i, j + 2)[eq + 4] + eight * at(i, j + 1)[eq + 4]
                            - eight * at(i, j - 1)[eq + 4]
                            + at(i, j - 2)[eq + 4])
                            / twelve_h;
                        let ay = (at(i, j + 2)[eq + 4].abs()
                            + eight * at(i, j + 1)[eq + 4].abs()
                            + eight * at(i, j - 1)[eq + 4].abs()
                            + at(i, j - 2)[eq + 4].abs())
                            / twelve_h;
                        (dx, ax, dy, ay)
                    }
                };
                res[eq].push(dx + dy);
                scl[eq].push(ax + ay);
            }
        }
    }

    let points = (nx - 2 * m) * (ny - 2 * m);
    Ok(ResidualReport {
        method: order.tag().to_string(),
        grid: Some(*grid),
        equations: EquationNorms {
            mass: Norms::from_samples(&res[0], &scl[0], Some(h)),
            momx: Norms::from_samples(&res[1], &scl[1], Some(h)),
            momy: Norms::from_samples(&res[2], &scl[2], Some(h)),
            entropy: Norms::from_samples(&res[3], &scl[3], Some(h)),
        },
        points,
    })
}

/// Residuals assembled from the exact chain-rule gradients at the given
/// points. For a valid construction every norm is pure roundoff.
pub fn residual_analytic<T: Real, S: AnalyticState<T, 2> + ?Sized>(
    state: &S,
    points: &[[T; 2]],
) -> ResidualReport<T> {
    let samples: Vec<([T; 4], [T; 4])> = points
        .par_iter()
        .map(|x| {
            let st = state.eval_all(x);
            point_residuals(&st)
        })
        .collect();
    let mut res: [Vec<T>; 4] = std::array::from_fn(|_| Vec::with_capacity(points.len()));
    let mut scl: [Vec<T>; 4] = std::array::from_fn(|_| Vec::with_capacity(points.len()));
    for (r, s) in &samples {
        for eq in 0..4 {
            res[eq].push(r[eq]);
            scl[eq].push(s[eq]);
        }
    }
    ResidualReport {
        method: "analytic".to_string(),
        grid: None,
        equations: EquationNorms {
            mass: Norms::from_samples(&res[0], &scl[0], None),
            momx: Norms::from_samples(&res[1], &scl[1], None),
            momy: Norms::from_samples(&res[2], &scl[2], None),
            entropy: Norms::from_samples(&res[3], &scl[3], None),
        },
        points: points.len(),
    }
}

/// Conservative-form residuals and their cancellation scales at one point.
fn point_residuals<T: Real>(st: &StatePoint<T, 2>) -> ([T; 4], [T; 4]) {
    let div_u = st.jac_u[0][0] + st.jac_u[1][1];

    // div(rho u) = grad rho . u + rho div u
    let m1 = st.grad_rho[0] * st.u[0] + st.grad_rho[1] * st.u[1];
    let m2 = st.rho * div_u;
    let mass = m1 + m2;
    let mass_scale = m1.abs() + m2.abs();

    // div(rho u x u)_i + d_i pi
    let mut mom = [T::zero(); 2];
    let mut mom_scale = [T::zero(); 2];
    for i in 0..2 {
        let mut acc = T::zero();
        let mut sc = T::zero();
        for j in 0..2 {
            let t1 = st.grad_rho[j] * st.u[i] * st.u[j];
            let t2 = st.rho * st.jac_u[i][j] * st.u[j];
            let t3 = st.rho * st.u[i] * st.jac_u[j][j];
            acc = acc + t1 + t2 + t3;
            sc = sc + t1.abs() + t2.abs() + t3.abs();
        }
        mom[i] = acc + st.grad_pi[i];
        mom_scale[i] = sc + st.grad_pi[i].abs();
    }

    // div(rho s u)
    let e1 = (st.grad_rho[0] * st.s + st.rho * st.grad_s[0]) * st.u[0]
        + (st.grad_rho[1] * st.s + st.rho * st.grad_s[1]) * st.u[1];
    let e2 = st.rho * st.s * div_u;
    let entropy = e1 + e2;
    let entropy_scale = e1.abs() + e2.abs();

    (
        [mass, mom[0], mom[1], entropy],
        [mass_scale, mom_scale[0], mom_scale[1], entropy_scale],
    )
}

/// Norms of `div u` and `u . grad rho`, the extra identities satisfied by the
/// isentropic choice and by the non-homogeneous incompressible variant.
#[derive(Clone, Debug, Serialize)]
pub struct IncompressibleReport<T> {
    pub div_u: Norms<T>,
    pub density_transport: Norms<T>,
    pub points: usize,
}

pub fn incompressible_checks<T: Real, S: AnalyticState<T, 2> + ?Sized>(
    state: &S,
    points: &[[T; 2]],
) -> IncompressibleReport<T> {
    let mut div = Vec::with_capacity(points.len());
    let mut div_s = Vec::with_capacity(points.len());
    let mut tr = Vec::with_capacity(points.len());
    let mut tr_s = Vec::with_capacity(points.len());
    for x in points {
        let st = state.eval_all(x);
        div.push(st.jac_u[0][0] + st.jac_u[1][1]);
        div_s.push(st.jac_u[0][0].abs() + st.jac_u[1][1].abs() + T::one());
        let t = st.grad_rho[0] * st.u[0] + st.grad_rho[1] * st.u[1];
        tr.push(t);
        tr_s.push(
            st.grad_rho[0].abs() * st.u[0].abs() + st.grad_rho[1].abs() * st.u[1].abs() + T::one(),
        );
    }
    IncompressibleReport {
        div_u: Norms::from_samples(&div, &div_s, None),
        density_transport: Norms::from_samples(&tr, &tr_s, None),
        points: points.len(),
    }
}

// ---------------------------------------------------------------------------
// Virial identity
// ---------------------------------------------------------------------------

/// `K = Int rho |u|^2`, `D = Int (pi - pi_inf)` and `|K + d D|`, which
/// vanishes for compactly supported steady states: pairing the momentum
/// equation with the position vector and integrating by parts leaves no
/// boundary terms because `pi - pi_inf` has compact support. A nontrivial
/// solution has `K > 0` with `D < 0` balancing it; the deficit integral is
/// exactly the reason the state escapes the triviality forced on solutions
/// with integrable pressure.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct VirialReport<T> {
    pub kinetic: T,
    pub pressure_deficit: T,
    pub identity_residual: T,
}

fn tq_axis<T: Real, const D: usize, F: Fn(&[T; D]) -> T>(
    f: &F,
    axis: usize,
    fixed: [T; D],
    lo: &[T; D],
    hi: &[T; D],
    tol: T,
    ok: &Cell<bool>,
) -> T {
    let g = |z: T| {
        let mut y = fixed;
        y[axis] = z;
        if axis == 0 {
            f(&y)
        } else {
            tq_axis(f, axis - 1, y, lo, hi, tol, ok)
        }
    };
    let out = quad_adaptive(g, lo[axis], hi[axis], tol);
    if !out.converged {
        ok.set(false);
    }
    out.value
}

/// Tensorized adaptive quadrature over a box.
pub fn tensor_quad<T: Real, const D: usize, F: Fn(&[T; D]) -> T>(
    f: F,
    lo: [T; D],
    hi: [T; D],
    rel_tol: T,
) -> Result<T> {
    let ok = Cell::new(true);
    let v = tq_axis(&f, D - 1, [T::zero(); D], &lo, &hi, rel_tol, &ok);
    if ok.get() {
        Ok(v)
    } else {
        Err(Error::Quadrature {
            estimate: v.as_f64(),
            error_bound: f64::NAN,
        })
    }
}

pub fn virial_check<T: Real, const D: usize, S: FlowField<T, D> + ?Sized>(
    state: &S,
    quad_tol: T,
) -> Result<VirialReport<T>> {
    let r = state.support_radius();
    if !(r > T::zero()) {
        return Ok(VirialReport {
            kinetic: T::zero(),
            pressure_deficit: T::zero(),
            identity_residual: T::zero(),
        });
    }
    let lo = [-r; D];
    let hi = [r; D];
    let kinetic = tensor_quad(
        |x: &[T; D]| {
            let rho = state.density(x);
            let u = state.velocity(x);
            let mut q = T::zero();
            for ui in u {
                q = q + ui * ui;
            }
            rho * q
        },
        lo,
        hi,
        quad_tol,
    )?;
    let pi_inf = state.farfield().pressure;
    let deficit = tensor_quad(|x: &[T; D]| state.pressure(x) - pi_inf, lo, hi, quad_tol)?;
    let d = T::from_usize(D).unwrap();
    Ok(VirialReport {
        kinetic,
        pressure_deficit: deficit,
        identity_residual: (kinetic + d * deficit).abs(),
    })
}

// ---------------------------------------------------------------------------
// Far field and pressure deficit
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct FarfieldViolation<T> {
    pub x: Vec<T>,
    pub field: String,
    pub got: T,
    pub want: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct FarfieldReport<T> {
    pub pass: bool,
    pub checked: usize,
    pub violations: Vec<FarfieldViolation<T>>,
}

/// Samples points with `|x|` in `[radius, 2 radius]` and checks exact (IEEE
/// `==`) equality with the far-field constants and zero velocity.
pub fn farfield_check<T: Real, const D: usize, S: FlowField<T, D> + ?Sized>(
    state: &S,
    radius: T,
    seed: u64,
) -> FarfieldReport<T> {
    let far = state.farfield();
    let pts = sample_points_annulus::<T, D>(seed, 1000, radius, T::of(2.0) * radius);
    let mut violations = Vec::new();
    for x in &pts {
        let mut push = |field: &str, got: T, want: T| {
            if violations.len() < 16 {
                violations.push(FarfieldViolation {
                    x: x.to_vec(),
                    field: field.to_string(),
                    got,
                    want,
                });
            }
        };
        let rho = state.density(x);
        if rho != far.rho {
            push("rho", rho, far.rho);
        }
        let s = state.entropy(x);
        if s != far.s {
            push("s", s, far.s);
        }
        let pi = state.pressure(x);
        if pi != far.pressure {
            push("pi", pi, far.pressure);
        }
        for (c, ui) in state.velocity(x).into_iter().enumerate() {
            if ui != T::zero() {
                push(["ux", "uy", "uz"][c.min(2)], ui, T::zero());
            }
        }
    }
    FarfieldReport {
        pass: violations.is_empty(),
        checked: pts.len(),
        violations,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeficitReport<T> {
    /// True when the base pressure never dips below its far-field value.
    pub trivial: bool,
    pub p_min: T,
    pub p_inf: T,
    pub ball_center: Vec<T>,
    pub ball_radius: T,
    /// `P < p_inf` held strictly at every sampled point of the ball.
    pub strict_on_ball: bool,
}

/// Verifies that a nontrivial base solution has `p_min < p_inf` and that the
/// pressure stays strictly below `p_inf` on an open ball around the sampled
/// pressure minimizer.
pub fn pressure_deficit_check<T: Real, const D: usize, B: BaseFlow<T, D> + ?Sized>(
    base: &B,
    seed: u64,
) -> DeficitReport<T> {
    let p_min = base.p_min();
    let p_inf = base.p_inf();
    if !(p_min < p_inf) {
        return DeficitReport {
            trivial: true,
            p_min,
            p_inf,
            ball_center: vec![T::zero(); D],
            ball_radius: T::zero(),
            strict_on_ball: false,
        };
    }
    let r = base.support_radius();
    let mut center = [T::zero(); D];
    let mut best = base.pressure(&center);
    for x in sample_points_annulus::<T, D>(seed, 2000, T::zero(), r) {
        let p = base.pressure(&x);
        if p < best {
            best = p;
            center = x;
        }
    }
    let mut center_norm = T::zero();
    for c in center {
        center_norm = center_norm + c * c;
    }
    let mut ball = T::of(0.99) * (r - center_norm.sqrt()).max(r * T::of(0.01));
    for _ in 0..20 {
        let pts = sample_points_ball::<T, D>(seed ^ 0x5eed, 100, center, ball);
        if pts.iter().all(|x| base.pressure(x) < p_inf) {
            return DeficitReport {
                trivial: false,
                p_min,
                p_inf,
                ball_center: center.to_vec(),
                ball_radius: ball,
                strict_on_ball: true,
            };
        }
        ball = ball * T::of(0.5);
    }
    DeficitReport {
        trivial: false,
        p_min,
        p_inf,
        ball_center: center.to_vec(),
        ball_radius: T::zero(),
        strict_on_ball: false,
    }
}

// ---------------------------------------------------------------------------
// Convergence fits and sampling
// ---------------------------------------------------------------------------

/// Least-squares slope of `ln(err)` against `ln(h)`; `None` when an error is
/// zero or not finite (e.g. exactly reproduced constant states).
pub fn fit_order<T: Real>(hs: &[T], errs: &[T]) -> Option<T> {
    if hs.len() != errs.len() || hs.len() < 2 {
        return None;
    }
    if errs.iter().any(|e| !(*e > T::zero()) || !e.is_finite()) {
        return None;
    }
    let n = T::from_usize(hs.len()).unwrap();
    let xs: Vec<T> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<T> = errs.iter().map(|e| e.ln()).collect();
    let xm = xs.iter().fold(T::zero(), |a, &b| a + b) / n;
    let ym = ys.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mut num = T::zero();
    let mut den = T::zero();
    for (x, y) in xs.iter().zip(&ys) {
        num = num + (*x - xm) * (*y - ym);
        den = den + (*x - xm) * (*x - xm);
    }
    Some(num / den)
}

/// Seeded uniform samples from a box.
pub fn sample_points_box<T: Real, const D: usize>(
    seed: u64,
    n: usize,
    lo: [T; D],
    hi: [T; D],
) -> Vec<[T; D]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut x = [T::zero(); D];
            for a in 0..D {
                x[a] = lo[a] + (hi[a] - lo[a]) * T::of(rng.gen::<f64>());
            }
            x
        })
        .collect()
}

/// Seeded uniform samples from the annulus `r_lo <= |x| <= r_hi` (rejection
/// from the bounding cube).
pub fn sample_points_annulus<T: Real, const D: usize>(
    seed: u64,
    n: usize,
    r_lo: T,
    r_hi: T,
) -> Vec<[T; D]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut x = [T::zero(); D];
        let mut q = T::zero();
        for a in 0..D {
            x[a] = r_hi * T::of(2.0 * rng.gen::<f64>() - 1.0);
            q = q + x[a] * x[a];
        }
        let r = q.sqrt();
        if r >= r_lo && r <= r_hi {
            out.push(x);
        }
    }
    out
}

/// Seeded uniform samples from a ball.
pub fn sample_points_ball<T: Real, const D: usize>(
    seed: u64,
    n: usize,
    center: [T; D],
    radius: T,
) -> Vec<[T; D]> {
    sample_points_annulus::<T, D>(seed, n, T::zero(), radius)
        .into_iter()
        .map(|mut x| {
            for a in 0..D {
                x[a] = x[a] + center[a];
            }
            x
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Negative controls
// ---------------------------------------------------------------------------

/// Canned corruptions used to prove the verification gates are not vacuous.
#[derive(Clone, Copy, Debug)]
pub enum Corruption<T> {
    /// Scale the velocity field (and its Jacobian) by a factor.
    VelocityScale(T),
    /// Add a constant to the density strictly inside the support radius.
    DensityOffset(T),
    /// Mirror the entropy field: `s -> pivot - s`, with the pressure field
    /// recomputed consistently. `pivot = s_0 + s_inf` swaps the plateau
    /// values of a ramp.
    EntropyFlip { pivot: T },
}

/// A flow state wrapped with one of the [`Corruption`]s.
pub struct CorruptedField<T: Real, const D: usize> {
    inner: Arc<dyn AnalyticState<T, D>>,
    kind: Corruption<T>,
    eos: EosParams<T>,
}

impl<T: Real, const D: usize> CorruptedField<T, D> {
    pub fn new(
        inner: Arc<dyn AnalyticState<T, D>>,
        kind: Corruption<T>,
        eos: EosParams<T>,
    ) -> Self {
        Self { inner, kind, eos }
    }

    fn corrupt(&self, x: &[T; D], mut st: StatePoint<T, D>) -> StatePoint<T, D> {
        match self.kind {
            Corruption::VelocityScale(f) => {
                for i in 0..D {
                    st.u[i] = f * st.u[i];
                    for j in 0..D {
                        st.jac_u[i][j] = f * st.jac_u[i][j];
                    }
                }
            }
            Corruption::DensityOffset(d) => {
                let mut q = T::zero();
                for xi in x {
                    q = q + *xi * *xi;
                }
                if q.sqrt() < self.inner.support_radius() {
                    st.rho = st.rho + d;
                }
            }
            Corruption::EntropyFlip { pivot } => {
                st.s = pivot - st.s;
                for j in 0..D {
                    st.grad_s[j] = -st.grad_s[j];
                }
                st.pi = self.eos.pressure_pos(st.rho, st.s);
                let (d_rho, d_s) = self.eos.pressure_partials_pos(st.rho, st.s);
                for j in 0..D {
                    st.grad_pi[j] = d_rho * st.grad_rho[j] + d_s * st.grad_s[j];
                }
            }
        }
        st
    }
}

impl<T: Real, const D: usize> FlowField<T, D> for CorruptedField<T, D> {
    fn density(&self, x: &[T; D]) -> T {
        self.eval_all(x).rho
    }
    fn velocity(&self, x: &[T; D]) -> [T; D] {
        self.eval_all(x).u
    }
    fn entropy(&self, x: &[T; D]) -> T {
        self.eval_all(x).s
    }
    fn pressure(&self, x: &[T; D]) -> T {
        self.eval_all(x).pi
    }
    fn farfield(&self) -> FarField<T> {
        let far = self.inner.farfield();
        match self.kind {
            Corruption::VelocityScale(_) | Corruption::DensityOffset(_) => far,
            Corruption::EntropyFlip { pivot } => {
                let s = pivot - far.s;
                FarField {
                    rho: far.rho,
                    s,
                    pressure: self.eos.pressure_pos(far.rho, s),
                }
            }
        }
    }
    fn support_radius(&self) -> T {
        self.inner.support_radius()
    }
}

impl<T: Real, const D: usize> AnalyticState<T, D> for CorruptedField<T, D> {
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
    fn eval_all(&self, x: &[T; D]) -> StatePoint<T, D> {
        self.corrupt(x, self.inner.eval_all(x))
    }
}
