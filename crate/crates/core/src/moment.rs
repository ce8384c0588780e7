//! The holomorphic flow generated by `v = Σ a_i t_i ∂/∂t_i` and the
//! moment-map identity for its rotation `v^c = I v`.

use num_complex::Complex64;

use crate::forms::{real_pairing, HermitianForm11, TangentVector, DDC_FACTOR, SIGN_CONVENTION};
use crate::lck::{kahler_form, potential_gradient, LckStructure};
use crate::manifold::Point;

/// `d(log C · φ)(w) = MOMENT_PAIRING · ω_K(v^c, w)` with `ω_K` evaluated as a
/// real 2-form. The factor collects the `d d^c` normalization and the sign
/// absorbed into [`SIGN_CONVENTION`].
pub const MOMENT_PAIRING: f64 = -DDC_FACTOR * SIGN_CONVENTION;

/// A complex flow time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParameter(pub Complex64);

impl FlowParameter {
    pub fn real(t: f64) -> Self {
        Self(Complex64::new(t, 0.0))
    }

    pub fn imaginary(t: f64) -> Self {
        Self(Complex64::new(0.0, t))
    }
}

/// Per-coordinate multipliers `e^{t a_i}` of the flow at time `t`.
pub fn flow_multipliers(s: &LckStructure, t: FlowParameter) -> Vec<Complex64> {
    s.log_moduli().iter().map(|&a| (t.0 * a).exp()).collect()
}

/// `V(t) p = (e^{t a_1} t_1, …, e^{t a_n} t_n)`.
pub fn flow_map(s: &LckStructure, t: FlowParameter, p: &Point) -> Point {
    Point::from_coords_unchecked(
        p.coords()
            .iter()
            .zip(flow_multipliers(s, t))
            .map(|(&z, m)| m * z)
            .collect(),
    )
}

/// `v = Σ a_i t_i ∂/∂t_i`.
pub fn field_v(s: &LckStructure, p: &Point) -> TangentVector {
    TangentVector::new(
        p.coords()
            .iter()
            .zip(s.log_moduli())
            .map(|(&z, &a)| z * a)
            .collect(),
    )
}

/// `v^c = I v`, with (1,0)-components `√−1 a_i t_i`.
pub fn field_vc(s: &LckStructure, p: &Point) -> TangentVector {
    TangentVector::new(
        field_v(s, p)
            .components()
            .iter()
            .map(|z| z * Complex64::i())
            .collect(),
    )
}

/// Both sides of the moment-map identity on a real tangent vector `w`:
/// `(d(log C · φ)(w), MOMENT_PAIRING · ω_K(v^c, w))`.
pub fn moment_sides(s: &LckStructure, p: &Point, w: &TangentVector) -> (f64, f64) {
    // dφ(w) = 2 Re Σ ∂_iφ w_i for a real vector with (1,0)-part w.
    let grad = potential_gradient(s, p);
    let dphi: f64 = 2.0
        * grad
            .iter()
            .zip(w.components())
            .map(|(g, x)| g * x)
            .sum::<Complex64>()
            .re;
    let lhs = s.log_c() * dphi;
    let rhs = MOMENT_PAIRING
        * real_pairing(&kahler_form(s, p), &field_vc(s, p), w).expect("dimensions agree");
    (lhs, rhs)
}

/// `|d(log C · φ)(w) − MOMENT_PAIRING · ω_K(v^c, w)|`.
pub fn moment_residual(s: &LckStructure, p: &Point, w: &TangentVector) -> f64 {
    let (lhs, rhs) = moment_sides(s, p, w);
    (lhs - rhs).abs()
}

/// `V(t)^* ω_K` at `p`.
pub fn flow_pullback_kahler(s: &LckStructure, t: FlowParameter, p: &Point) -> HermitianForm11 {
    kahler_form(s, &flow_map(s, t, p)).pullback_diagonal(&flow_multipliers(s, t))
}
