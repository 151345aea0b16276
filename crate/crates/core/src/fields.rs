use std::sync::Arc;

use serde::Serialize;

use crate::eos::EosParams;
use crate::{Real, Result};

/// Constant state attained exactly outside the support radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FarField<T> {
    pub rho: T,
    pub s: T,
    pub pressure: T,
}

/// A steady incompressible base solution `(U, P)`: divergence-free velocity,
/// pressure orthogonal to the flow, both constant outside a bounded ball.
///
/// Implementors must return the far-field values *bitwise* outside the
/// support radius; the compressible lift inherits its exact far field from
/// this guarantee.
pub trait BaseFlow<T: Real, const D: usize>: Send + Sync {
    fn velocity(&self, x: &[T; D]) -> [T; D];

    /// Jacobian with `J[i][j] = ∂u_i/∂x_j`.
    fn velocity_jacobian(&self, x: &[T; D]) -> [[T; D]; D];

    fn pressure(&self, x: &[T; D]) -> T;

    fn pressure_gradient(&self, x: &[T; D]) -> [T; D];

    fn p_inf(&self) -> T;

    /// Global pressure minimum.
    fn p_min(&self) -> T;

    /// Velocity vanishes and pressure equals `p_inf` for `|x| >=` this radius.
    fn support_radius(&self) -> T;

    /// False for seeds ingested from file, whose upstream accuracy is unknown.
    fn upstream_verified(&self) -> bool {
        true
    }
}

impl<T: Real, const D: usize> BaseFlow<T, D> for Arc<dyn BaseFlow<T, D>> {
    fn velocity(&self, x: &[T; D]) -> [T; D] {
        (**self).velocity(x)
    }
    fn velocity_jacobian(&self, x: &[T; D]) -> [[T; D]; D] {
        (**self).velocity_jacobian(x)
    }
    fn pressure(&self, x: &[T; D]) -> T {
        (**self).pressure(x)
    }
    fn pressure_gradient(&self, x: &[T; D]) -> [T; D] {
        (**self).pressure_gradient(x)
    }
    fn p_inf(&self) -> T {
        (**self).p_inf()
    }
    fn p_min(&self) -> T {
        (**self).p_min()
    }
    fn support_radius(&self) -> T {
        (**self).support_radius()
    }
    fn upstream_verified(&self) -> bool {
        (**self).upstream_verified()
    }
}

/// Pointwise values of a compressible flow state.
pub trait FlowField<T: Real, const D: usize>: Send + Sync {
    fn density(&self, x: &[T; D]) -> T;
    fn velocity(&self, x: &[T; D]) -> [T; D];
    fn entropy(&self, x: &[T; D]) -> T;
    fn pressure(&self, x: &[T; D]) -> T;

    /// State attained exactly outside [`FlowField::support_radius`].
    fn farfield(&self) -> FarField<T>;

    fn support_radius(&self) -> T;

    /// Fused pointwise values `(rho, u, s, pi)`. Implementors with a shared
    /// expensive intermediate override this.
    fn values(&self, x: &[T; D]) -> (T, [T; D], T, T) {
        (
            self.density(x),
            self.velocity(x),
            self.entropy(x),
            self.pressure(x),
        )
    }
}

/// All first derivatives of a state at one point, for residual assembly.
#[derive(Clone, Copy, Debug)]
pub struct StatePoint<T, const D: usize> {
    pub rho: T,
    pub u: [T; D],
    pub s: T,
    pub pi: T,
    pub grad_rho: [T; D],
    /// `jac_u[i][j] = ∂u_i/∂x_j`
    pub jac_u: [[T; D]; D],
    pub grad_s: [T; D],
    pub grad_pi: [T; D],
}

/// A flow state with exact first derivatives.
pub trait AnalyticState<T: Real, const D: usize>: FlowField<T, D> {
    fn density_gradient(&self, x: &[T; D]) -> [T; D];
    fn velocity_jacobian(&self, x: &[T; D]) -> [[T; D]; D];
    fn entropy_gradient(&self, x: &[T; D]) -> [T; D];
    fn pressure_gradient(&self, x: &[T; D]) -> [T; D];

    /// Values and gradients together. Implementors with a shared expensive
    /// intermediate (the base pressure) override this with a fused path.
    fn eval_all(&self, x: &[T; D]) -> StatePoint<T, D> {
        StatePoint {
            rho: self.density(x),
            u: self.velocity(x),
            s: self.entropy(x),
            pi: self.pressure(x),
            grad_rho: self.density_gradient(x),
            jac_u: self.velocity_jacobian(x),
            grad_s: self.entropy_gradient(x),
            grad_pi: self.pressure_gradient(x),
        }
    }
}

/// The trivial steady state `(rho, 0, s)`.
#[derive(Clone, Copy, Debug)]
pub struct ConstantState<T> {
    pub rho: T,
    pub s: T,
    pub pressure: T,
}

impl<T: Real> ConstantState<T> {
    pub fn new(eos: &EosParams<T>, rho: T, s: T) -> Result<Self> {
        let pressure = eos.pressure(rho, s)?;
        Ok(Self { rho, s, pressure })
    }
}

impl<T: Real, const D: usize> FlowField<T, D> for ConstantState<T> {
    fn density(&self, _x: &[T; D]) -> T {
        self.rho
    }
    fn velocity(&self, _x: &[T; D]) -> [T; D] {
        [T::zero(); D]
    }
    fn entropy(&self, _x: &[T; D]) -> T {
        self.s
    }
    fn pressure(&self, _x: &[T; D]) -> T {
        self.pressure
    }
    fn farfield(&self) -> FarField<T> {
        FarField {
            rho: self.rho,
            s: self.s,
            pressure: self.pressure,
        }
    }
    fn support_radius(&self) -> T {
        T::zero()
    }
}

impl<T: Real, const D: usize> AnalyticState<T, D> for ConstantState<T> {
    fn density_gradient(&self, _x: &[T; D]) -> [T; D] {
        [T::zero(); D]
    }
    fn velocity_jacobian(&self, _x: &[T; D]) -> [[T; D]; D] {
        [[T::zero(); D]; D]
    }
    fn entropy_gradient(&self, _x: &[T; D]) -> [T; D] {
        [T::zero(); D]
    }
    fn pressure_gradient(&self, _x: &[T; D]) -> [T; D] {
        [T::zero(); D]
    }
}
