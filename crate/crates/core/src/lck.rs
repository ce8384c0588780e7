//! The locally conformally Kähler structure of a diagonal Hopf manifold in
//! closed form: `ω_K`, `ω_H = ω_K / φ`, the Lee form `θ = dφ / φ`, the Lee
//! field `θ^♯` and `ω₀ = ∂∂̄ log φ`.

use num_complex::Complex64;

use crate::forms::{
    evaluate, fd_dc_one_form, fd_ddbar, fd_one_form_derivative, fd_two_form_derivative,
    wedge_one_two, CMatrix, HermitianForm11, TangentVector, DDC_FACTOR,
};
use crate::manifold::{
    abs_pow, apply_contraction, potential, FundamentalDomainSampler, HopfData, ManifoldError, Point,
};

/// `dω_H = LEE_SIGN · θ ∧ ω_H`. With `θ = dφ/φ` and `dω_K = 0` the
/// product rule gives `d(ω_K/φ) = −(dφ/φ) ∧ ω_H`.
pub const LEE_SIGN: f64 = -1.0;

/// Sample points closer than this to a coordinate hyperplane are skipped by
/// the statistics that need a nondegenerate `ω_K`.
pub const AXIS_MARGIN: f64 = 1e-3;

/// Hopf data together with `log C` and `a_i = −log |α_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct LckStructure {
    hopf: HopfData,
    log_c: f64,
    log_moduli: Vec<f64>,
}

impl LckStructure {
    pub fn new(hopf: HopfData) -> Self {
        let log_moduli = hopf.alphas().iter().map(|a| -a.norm().ln()).collect();
        Self {
            log_c: hopf.log_c(),
            hopf,
            log_moduli,
        }
    }

    pub fn hopf(&self) -> &HopfData {
        &self.hopf
    }

    pub fn dim(&self) -> usize {
        self.hopf.dim()
    }

    pub fn log_c(&self) -> f64 {
        self.log_c
    }

    /// `a_i = −log |α_i| > 0`.
    pub fn log_moduli(&self) -> &[f64] {
        &self.log_moduli
    }

    /// `(log C)⁴ / 4`, the value of `ω_H(θ^♯, θ̄^♯)`.
    pub fn gauduchon_constant(&self) -> f64 {
        self.log_c.powi(4) / 4.0
    }
}

/// `∂φ/∂t_i = (β_i / 2) t̄_i |t_i|^{β_i − 2}`.
pub fn potential_gradient(s: &LckStructure, p: &Point) -> Vec<Complex64> {
    p.coords()
        .iter()
        .zip(s.hopf.betas())
        .map(|(&t, &b)| t.conj() * (0.5 * b * abs_pow(t, b - 2.0)))
        .collect()
}

fn hessian_diagonal(s: &LckStructure, p: &Point) -> Vec<f64> {
    p.coords()
        .iter()
        .zip(s.hopf.betas())
        .map(|(&t, &b)| abs_pow(t, b - 2.0) * b * b / 4.0)
        .collect()
}

/// `ω_K`, diagonal with entries `|t_i|^{β_i − 2} β_i² / 4`.
pub fn kahler_form(s: &LckStructure, p: &Point) -> HermitianForm11 {
    HermitianForm11::diagonal(&hessian_diagonal(s, p))
}

/// `ω_H = ω_K / φ`.
pub fn hermitian_form(s: &LckStructure, p: &Point) -> HermitianForm11 {
    kahler_form(s, p).scale(1.0 / potential(&s.hopf, p))
}

/// Real components of `θ = dφ / φ` against `(∂_{x_1}, ∂_{y_1}, …)`.
pub fn lee_form(s: &LckStructure, p: &Point) -> Vec<f64> {
    let phi = potential(&s.hopf, p);
    potential_gradient(s, p)
        .iter()
        .flat_map(|g| [2.0 * g.re / phi, -2.0 * g.im / phi])
        .collect()
}

/// `θ^♯ = log C · Σ a_i t_i ∂/∂t_i`.
pub fn lee_field(s: &LckStructure, p: &Point) -> TangentVector {
    TangentVector::new(
        p.coords()
            .iter()
            .zip(&s.log_moduli)
            .map(|(&t, &a)| t * (s.log_c * a))
            .collect(),
    )
}

/// `ω₀ = ∂∂̄ log φ` with coefficients `H_ij / φ − ∂_iφ ∂̄_jφ / φ²`.
///
/// As a real form, `d^c θ = DDC_FACTOR · ω₀`.
pub fn omega0(s: &LckStructure, p: &Point) -> HermitianForm11 {
    let n = s.dim();
    let phi = potential(&s.hopf, p);
    let h = hessian_diagonal(s, p);
    let g = potential_gradient(s, p);
    let m = CMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { h[i] / phi } else { 0.0 };
        Complex64::new(diag, 0.0) - g[i] * g[j].conj() / (phi * phi)
    });
    HermitianForm11::from_matrix_unchecked(m)
}

/// `max_j |ω₀(θ^♯, ∂̄_j)|` relative to `‖ω₀‖ · |θ^♯|`.
pub fn omega0_null_residual(s: &LckStructure, p: &Point) -> f64 {
    let w0 = omega0(s, p);
    let theta = lee_field(s, p);
    let n = s.dim();
    let scale = w0.norm() * theta.norm();
    if scale == 0.0 {
        return 0.0;
    }
    (0..n)
        .map(|j| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            evaluate(&w0, &theta, &TangentVector::new(e))
                .expect("dimensions agree")
                .norm()
        })
        .fold(0.0, f64::max)
        / scale
}

/// Relative homothety defects at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomothetyResiduals {
    /// `|φ(Ap) − φ(p)/C| / φ(p)`.
    pub potential: f64,
    /// `‖A^*ω_K(Ap) − ω_K(p)/C‖ / ‖ω_K(p)/C‖`.
    pub kahler: f64,
    /// `‖A^*ω_H(Ap) − ω_H(p)‖ / ‖ω_H(p)‖`.
    pub hermitian: f64,
}

pub fn homothety_residuals(s: &LckStructure, p: &Point) -> HomothetyResiduals {
    let c = s.hopf.c();
    let q = apply_contraction(&s.hopf, p);
    let phi = potential(&s.hopf, p);
    let potential_res = (potential(&s.hopf, &q) - phi / c).abs() / phi;
    let alphas = s.hopf.alphas();
    let k_expected = kahler_form(s, p).scale(1.0 / c);
    let k_pulled = kahler_form(s, &q).pullback_diagonal(alphas);
    let h_expected = hermitian_form(s, p);
    let h_pulled = hermitian_form(s, &q).pullback_diagonal(alphas);
    HomothetyResiduals {
        potential: potential_res,
        kahler: k_pulled.minus(&k_expected).norm() / k_expected.norm(),
        hermitian: h_pulled.minus(&h_expected).norm() / h_expected.norm(),
    }
}

/// Finite-difference cross-checks at one point; all entries are maximal
/// absolute coefficient differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdResiduals {
    /// `∂∂̄φ` against `ω_K`.
    pub kahler: f64,
    /// `d^c θ` against `DDC_FACTOR · ω₀`.
    pub omega0: f64,
    /// `dω_H` against `LEE_SIGN · θ ∧ ω_H`.
    pub d_hermitian: f64,
    /// `dθ` against zero.
    pub d_lee: f64,
}

fn point_from_real(x: &[f64]) -> Point {
    Point::from_coords_unchecked(
        x.chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect(),
    )
}

pub fn fd_residuals(s: &LckStructure, p: &Point, step: f64) -> FdResiduals {
    let x = p.to_real();
    let ddbar = fd_ddbar(|q| potential(&s.hopf, q), p, step);
    let kahler = ddbar
        .minus(&kahler_form(s, p))
        .matrix()
        .iter()
        .fold(0.0_f64, |m, z| m.max(z.norm()));

    let lee = |y: &[f64]| lee_form(s, &point_from_real(y));
    let dc = fd_dc_one_form(lee, &x, step);
    let w0 = omega0(s, p).to_real_two_form() * DDC_FACTOR;
    let omega0_res = (dc - w0).amax();

    let d_lee = fd_one_form_derivative(lee, &x, step).amax();

    let dh = fd_two_form_derivative(
        |y| hermitian_form(s, &point_from_real(y)).to_real_two_form(),
        &x,
        step,
    );
    let expected =
        wedge_one_two(&lee_form(s, p), &hermitian_form(s, p).to_real_two_form()).scale(LEE_SIGN);
    FdResiduals {
        kahler,
        omega0: omega0_res,
        d_hermitian: dh.max_abs_diff(&expected),
        d_lee,
    }
}

/// Aggregated closed-form checks over sampled points of the fundamental domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GauduchonReport {
    pub samples: usize,
    /// `(log C)⁴ / 4`.
    pub expected_constant: f64,
    /// Largest relative deviation of `ω_H(θ^♯, θ̄^♯)` from the constant.
    pub gauduchon_deviation: f64,
    /// Largest relative deviation of `ω_K(θ^♯, θ̄^♯) / φ` from the constant.
    pub kahler_ratio_deviation: f64,
    pub potential_homothety: f64,
    pub kahler_homothety: f64,
    pub hermitian_invariance: f64,
    /// Smallest eigenvalue of `ω₀` over its trace (PSD margin; ≥ 0 up to rounding).
    pub omega0_min_ratio: f64,
    /// Smallest second eigenvalue of `ω₀` over its trace (eigen-gap).
    pub omega0_gap_ratio: f64,
    /// Largest relative `|ω₀(θ^♯, ·)|`.
    pub omega0_null: f64,
}

pub fn gauduchon_report(
    s: &LckStructure,
    seed: u64,
    count: usize,
) -> Result<GauduchonReport, ManifoldError> {
    let points = FundamentalDomainSampler::new(&s.hopf, seed)
        .with_axis_margin(AXIS_MARGIN)
        .sample(count)?;
    let constant = s.gauduchon_constant();
    let mut report = GauduchonReport {
        samples: count,
        expected_constant: constant,
        gauduchon_deviation: 0.0,
        kahler_ratio_deviation: 0.0,
        potential_homothety: 0.0,
        kahler_homothety: 0.0,
        hermitian_invariance: 0.0,
        omega0_min_ratio: f64::INFINITY,
        omega0_gap_ratio: f64::INFINITY,
        omega0_null: 0.0,
    };
    for p in &points {
        let theta = lee_field(s, p);
        let h = evaluate(&hermitian_form(s, p), &theta, &theta).expect("dimensions agree");
        report.gauduchon_deviation = report
            .gauduchon_deviation
            .max((h - constant).norm() / constant);
        let k = evaluate(&kahler_form(s, p), &theta, &theta).expect("dimensions agree");
        let ratio = k / potential(&s.hopf, p);
        report.kahler_ratio_deviation = report
            .kahler_ratio_deviation
            .max((ratio - constant).norm() / constant);

        let hr = homothety_residuals(s, p);
        report.potential_homothety = report.potential_homothety.max(hr.potential);
        report.kahler_homothety = report.kahler_homothety.max(hr.kahler);
        report.hermitian_invariance = report.hermitian_invariance.max(hr.hermitian);

        let w0 = omega0(s, p);
        let ev = w0.eigenvalues();
        let trace = w0.trace();
        report.omega0_min_ratio = report.omega0_min_ratio.min(ev[0] / trace);
        report.omega0_gap_ratio = report.omega0_gap_ratio.min(ev[1] / trace);
        report.omega0_null = report.omega0_null.max(omega0_null_residual(s, p));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{LambdaContract, DEFAULT_FD_STEP};
    use crate::manifold::sample_fundamental_domain;

    fn cx(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn classical() -> LckStructure {
        LckStructure::new(HopfData::new(vec![cx(0.5); 3], 4.0).unwrap())
    }

    fn mixed() -> LckStructure {
        LckStructure::new(HopfData::new(vec![cx(0.5), cx(0.25)], 16.0).unwrap())
    }

    #[test]
    fn log_constants_match_betas() {
        let s = mixed();
        for (a, b) in s.log_moduli().iter().zip(s.hopf().betas()) {
            assert!((a * b - s.log_c()).abs() < 1e-14);
        }
    }

    #[test]
    fn flat_case_is_identity() {
        let s = classical();
        let p = Point::new(vec![
            Complex64::new(0.3, 0.1),
            cx(-0.8),
            Complex64::new(0.0, 0.2),
        ])
        .unwrap();
        assert!(
            kahler_form(&s, &p)
                .minus(&HermitianForm11::identity(3))
                .norm()
                < 1e-15
        );
        let q = Point::from_reals(&[1.0, 1.0, 1.0]).unwrap();
        let h = hermitian_form(&s, &q);
        assert!(
            h.minus(&HermitianForm11::identity(3).scale(1.0 / 3.0))
                .norm()
                < 1e-15
        );
        assert!((h.lambda(&h).unwrap() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn lee_form_on_axis() {
        let s = classical();
        let p = Point::from_reals(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(lee_form(&s, &p), vec![2.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn flat_lee_field_and_pairing() {
        let s = classical();
        let p = Point::new(vec![
            Complex64::new(0.4, 0.7),
            cx(0.2),
            Complex64::new(-0.5, 0.1),
        ])
        .unwrap();
        let l2 = 2f64.ln();
        let theta = lee_field(&s, &p);
        for (v, t) in theta.components().iter().zip(p.coords()) {
            assert!((v - t * (4f64.ln() * l2)).norm() < 1e-15);
        }
        let k = evaluate(&kahler_form(&s, &p), &theta, &theta).unwrap();
        let phi = potential(s.hopf(), &p);
        assert!((k.re - 4.0 * l2.powi(4) * phi).abs() < 1e-13);
    }

    #[test]
    fn mixed_fd_kahler_matches() {
        let s = mixed();
        let p = Point::from_reals(&[1.0, 1.0]).unwrap();
        let fd = fd_ddbar(|q| potential(s.hopf(), q), &p, DEFAULT_FD_STEP);
        let closed = kahler_form(&s, &p);
        assert!((closed.matrix()[(0, 0)].re - 4.0 * 16.0 / 4.0 / 4.0 * 1.0).abs() < 1e-14);
        assert!(fd.minus(&closed).norm() < 1e-5);
    }

    #[test]
    fn omega0_kernel_and_positivity() {
        let s = LckStructure::new(
            HopfData::with_minimal_c(vec![cx(0.5), Complex64::new(0.0, 0.6), cx(0.7)]).unwrap(),
        );
        for p in sample_fundamental_domain(s.hopf(), 11, 50).unwrap() {
            let ev = omega0(&s, &p).eigenvalues();
            let tr: f64 = ev.iter().sum();
            assert!(ev[0] >= -1e-12 * tr);
            assert!(omega0_null_residual(&s, &p) < 1e-12);
        }
    }

    #[test]
    fn fd_residuals_small() {
        let s =
            LckStructure::new(HopfData::with_minimal_c(vec![cx(0.5), cx(0.6), cx(0.7)]).unwrap());
        let p = Point::new(vec![
            Complex64::new(0.6, 0.3),
            Complex64::new(-0.5, 0.4),
            cx(0.7),
        ])
        .unwrap();
        let r = fd_residuals(&s, &p, DEFAULT_FD_STEP);
        assert!(r.kahler < 1e-5, "{r:?}");
        assert!(r.omega0 < 1e-5, "{r:?}");
        assert!(r.d_hermitian < 1e-5, "{r:?}");
        assert!(r.d_lee < 1e-5, "{r:?}");
    }

    #[test]
    fn wrong_lee_sign_is_detected() {
        // The FD residual must distinguish the sign of the torsion identity.
        let s = mixed();
        let p = Point::new(vec![Complex64::new(0.6, 0.3), Complex64::new(-0.5, 0.4)]).unwrap();
        let x = p.to_real();
        let dh = fd_two_form_derivative(
            |y| hermitian_form(&s, &point_from_real(y)).to_real_two_form(),
            &x,
            DEFAULT_FD_STEP,
        );
        let flipped = wedge_one_two(
            &lee_form(&s, &p),
            &hermitian_form(&s, &p).to_real_two_form(),
        )
        .scale(-LEE_SIGN);
        assert!(dh.max_abs_diff(&flipped) > 1e-2);
    }

    #[test]
    fn report_is_deterministic_and_passes() {
        let s = mixed();
        let a = gauduchon_report(&s, 5, 200).unwrap();
        let b = gauduchon_report(&s, 5, 200).unwrap();
        assert_eq!(a, b);
        assert!(a.gauduchon_deviation < 1e-10);
        assert!(a.kahler_ratio_deviation < 1e-10);
        assert!(a.kahler_homothety < 1e-12);
        assert!(a.hermitian_invariance < 1e-12);
        assert!(a.omega0_null < 1e-10);
    }
}
