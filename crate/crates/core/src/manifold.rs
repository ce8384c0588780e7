//! Diagonal Hopf data, the Kähler potential, the contraction and its
//! fundamental domain.
//!
//! A diagonal contraction `A = diag(α_1, …, α_n)` with `0 < |α_i| < 1`
//! together with a constant `C > 1` determines exponents
//! `β_i = log C / log |α_i|⁻¹` and the potential `φ = Σ |t_i|^{β_i}`,
//! which satisfies `φ(A t) = φ(t) / C`. The annulus `D = {1 ≤ φ < C}`
//! meets every `⟨A⟩`-orbit in `ℂⁿ \ 0` exactly once.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Smallest admissible exponent.
pub const MIN_BETA: f64 = 2.0;

/// Slack allowed when comparing an exponent against [`MIN_BETA`]; the
/// minimal admissible `C` lands on `β = 2` only up to rounding.
const BETA_SLACK: f64 = 1e-12;

/// The sampler gives up once this many draws have been made with an
/// acceptance fraction below [`STARVATION_RATE`].
const STARVATION_MIN_DRAWS: u64 = 1_000_000;
const STARVATION_RATE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ManifoldError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("eigenvalue {index} has modulus {modulus}, expected 0 < |alpha| < 1")]
    EigenvalueOutOfRange { index: usize, modulus: f64 },
    #[error("C must be > 1, got {0}")]
    InvalidC(f64),
    #[error("beta_{index} = {beta} < 2; the smallest admissible C is {min_c}")]
    BetaTooSmall { index: usize, beta: f64, min_c: f64 },
    #[error("point dimension {got} does not match manifold dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the origin is not a point of C^n \\ 0")]
    ZeroPoint,
    #[error("fundamental-domain sampler starved: {accepted} accepted out of {draws} draws")]
    SamplerStarved { draws: u64, accepted: u64 },
}

/// The contraction eigenvalues, the constant `C` and the derived exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfData {
    alphas: Vec<Complex64>,
    c: f64,
    betas: Vec<f64>,
}

impl HopfData {
    pub fn new(alphas: Vec<Complex64>, c: f64) -> Result<Self, ManifoldError> {
        if alphas.len() < 2 {
            return Err(ManifoldError::DimensionTooSmall(alphas.len()));
        }
        for (index, a) in alphas.iter().enumerate() {
            let modulus = a.norm();
            if !(modulus > 0.0 && modulus < 1.0) {
                return Err(ManifoldError::EigenvalueOutOfRange { index, modulus });
            }
        }
        if c.is_nan() || c <= 1.0 || !c.is_finite() {
            return Err(ManifoldError::InvalidC(c));
        }
        let log_c = c.ln();
        let betas: Vec<f64> = alphas.iter().map(|a| log_c / -a.norm().ln()).collect();
        if let Some((index, &beta)) = betas
            .iter()
            .enumerate()
            .find(|(_, &b)| b < MIN_BETA - BETA_SLACK)
        {
            return Err(ManifoldError::BetaTooSmall {
                index,
                beta,
                min_c: minimal_admissible_c(&alphas),
            });
        }
        Ok(Self { alphas, c, betas })
    }

    /// Builds Hopf data with the smallest `C` keeping every `β_i ≥ 2`.
    pub fn with_minimal_c(alphas: Vec<Complex64>) -> Result<Self, ManifoldError> {
        for (index, a) in alphas.iter().enumerate() {
            let modulus = a.norm();
            if !(modulus > 0.0 && modulus < 1.0) {
                return Err(ManifoldError::EigenvalueOutOfRange { index, modulus });
            }
        }
        let c = minimal_admissible_c(&alphas);
        Self::new(alphas, c)
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn log_c(&self) -> f64 {
        self.c.ln()
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Radii of the smallest polydisk containing `{φ < C}`, i.e. `C^{1/β_i} = |α_i|⁻¹`.
    pub fn polydisk_radii(&self) -> Vec<f64> {
        self.betas.iter().map(|b| self.c.powf(1.0 / b)).collect()
    }

    /// Lebesgue volume of the bounding polydisk in `ℝ^{2n}`.
    pub fn polydisk_volume(&self) -> f64 {
        self.polydisk_radii().iter().map(|r| PI * r * r).product()
    }

    /// Real Jacobian determinant `Π |α_i|²` of the contraction.
    pub fn real_jacobian(&self) -> f64 {
        self.alphas.iter().map(|a| a.norm_sqr()).product()
    }
}

/// `max_i |α_i|^{-2}`: the least `C` for which every exponent is at least 2.
pub fn minimal_admissible_c(alphas: &[Complex64]) -> f64 {
    alphas
        .iter()
        .map(|a| a.norm_sqr().recip())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// A point of `ℂⁿ \ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<Complex64>,
}

impl Point {
    pub fn new(coords: Vec<Complex64>) -> Result<Self, ManifoldError> {
        if coords.iter().all(|z| z.norm_sqr() == 0.0) {
            return Err(ManifoldError::ZeroPoint);
        }
        Ok(Self { coords })
    }

    /// Builds a point from real coordinates; each coordinate has zero imaginary part.
    pub fn from_reals(values: &[f64]) -> Result<Self, ManifoldError> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Inverse of [`Point::to_real`]: `(x_1, y_1, …, x_n, y_n) ↦ (x_1 + i y_1, …)`.
    pub fn from_real(x: &[f64]) -> Result<Self, ManifoldError> {
        Self::new(
            x.chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
        )
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Real coordinates interleaved as `(Re t_1, Im t_1, …, Re t_n, Im t_n)`.
    pub fn to_real(&self) -> Vec<f64> {
        self.coords.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    /// Smallest coordinate modulus; the distance to the nearest coordinate hyperplane.
    pub fn min_modulus(&self) -> f64 {
        self.coords
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn from_coords_unchecked(coords: Vec<Complex64>) -> Self {
        Self { coords }
    }
}

fn check_dim(h: &HopfData, p: &Point) {
    assert_eq!(
        h.dim(),
        p.dim(),
        "point dimension does not match the Hopf data"
    );
}

/// `|t|^β`, written through `|t|²` so that `β = 2` stays exact.
#[inline]
pub(crate) fn abs_pow(z: Complex64, beta: f64) -> f64 {
    z.norm_sqr().powf(0.5 * beta)
}

/// The Kähler potential `φ(t) = Σ |t_i|^{β_i}`.
pub fn potential(h: &HopfData, p: &Point) -> f64 {
    check_dim(h, p);
    p.coords
        .iter()
        .zip(&h.betas)
        .map(|(&t, &b)| abs_pow(t, b))
        .sum()
}

/// `t ↦ A t`.
pub fn apply_contraction(h: &HopfData, p: &Point) -> Point {
    apply_contraction_power(h, p, 1)
}

/// `t ↦ A^k t` for any integer `k`.
pub fn apply_contraction_power(h: &HopfData, p: &Point, k: i32) -> Point {
    check_dim(h, p);
    Point::from_coords_unchecked(
        p.coords
            .iter()
            .zip(&h.alphas)
            .map(|(&t, &a)| a.powi(k) * t)
            .collect(),
    )
}

/// Membership in `D = {1 ≤ φ < C}`.
pub fn in_fundamental_domain(h: &HopfData, p: &Point) -> bool {
    let phi = potential(h, p);
    (1.0..h.c).contains(&phi)
}

/// The unique `k` with `A^k p ∈ D`, together with that translate.
///
/// `φ(A^k p) = C^{-k} φ(p)`, so `k = ⌊log_C φ(p)⌋`; the neighbours are
/// probed to absorb rounding at the boundary of `D`.
pub fn fundamental_translate(h: &HopfData, p: &Point) -> (i32, Point) {
    let guess = (potential(h, p).ln() / h.log_c()).floor() as i32;
    for k in [guess, guess - 1, guess + 1] {
        let q = apply_contraction_power(h, p, k);
        if in_fundamental_domain(h, &q) {
            return (k, q);
        }
    }
    (guess, apply_contraction_power(h, p, guess))
}

/// Rejection sampler for the fundamental domain.
///
/// Coordinates are drawn uniformly (in Lebesgue measure) from the polydisk
/// `{|t_i| < C^{1/β_i}}`; draws outside `D` are rejected. An optional axis
/// margin additionally rejects points with some `|t_i|` below the margin.
#[derive(Debug, Clone)]
pub struct FundamentalDomainSampler {
    hopf: HopfData,
    radii: Vec<f64>,
    axis_margin: f64,
    rng: ChaCha8Rng,
    draws: u64,
    accepted: u64,
}

impl FundamentalDomainSampler {
    pub fn new(hopf: &HopfData, seed: u64) -> Self {
        Self {
            radii: hopf.polydisk_radii(),
            hopf: hopf.clone(),
            axis_margin: 0.0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            draws: 0,
            accepted: 0,
        }
    }

    /// Selects an independent generator stream for the same seed.
    pub fn with_stream(mut self, stream: u64) -> Self {
        self.rng.set_stream(stream);
        self
    }

    pub fn with_axis_margin(mut self, margin: f64) -> Self {
        self.axis_margin = margin;
        self
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.draws == 0 {
            0.0
        } else {
            self.accepted as f64 / self.draws as f64
        }
    }

    fn draw(&mut self) -> Vec<Complex64> {
        let rng = &mut self.rng;
        self.radii
            .iter()
            .map(|&r| {
                let rho = r * rng.random::<f64>().sqrt();
                let angle = 2.0 * PI * rng.random::<f64>();
                Complex64::from_polar(rho, angle)
            })
            .collect()
    }

    pub fn next_point(&mut self) -> Result<Point, ManifoldError> {
        loop {
            let coords = self.draw();
            self.draws += 1;
            let p = Point::from_coords_unchecked(coords);
            let phi = potential(&self.hopf, &p);
            if (1.0..self.hopf.c).contains(&phi) && p.min_modulus() >= self.axis_margin {
                self.accepted += 1;
                return Ok(p);
            }
            if self.draws >= STARVATION_MIN_DRAWS
                && (self.accepted as f64) < STARVATION_RATE * self.draws as f64
            {
                return Err(ManifoldError::SamplerStarved {
                    draws: self.draws,
                    accepted: self.accepted,
                });
            }
        }
    }

    pub fn sample(&mut self, count: usize) -> Result<Vec<Point>, ManifoldError> {
        (0..count).map(|_| self.next_point()).collect()
    }
}

/// `count` points of `D`, deterministic in `seed`.
pub fn sample_fundamental_domain(
    h: &HopfData,
    seed: u64,
    count: usize,
) -> Result<Vec<Point>, ManifoldError> {
    FundamentalDomainSampler::new(h, seed).sample(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn classical() -> HopfData {
        HopfData::new(vec![c(0.5); 3], 4.0).unwrap()
    }

    #[test]
    fn betas_of_simple_data() {
        let h = classical();
        for b in h.betas() {
            assert!((b - 2.0).abs() < 1e-15);
        }
        let h = HopfData::new(vec![c(0.5), c(0.25)], 16.0).unwrap();
        assert!((h.betas()[0] - 4.0).abs() < 1e-14);
        assert!((h.betas()[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn beta_consistency() {
        let h = HopfData::new(vec![Complex64::from_polar(0.3, 1.0), c(0.6), c(0.7)], 20.0).unwrap();
        for (a, b) in h.alphas().iter().zip(h.betas()) {
            let back = a.norm().powf(-b);
            assert!((back - h.c()).abs() <= 1e-12 * h.c());
        }
    }

    #[test]
    fn construction_errors() {
        match HopfData::new(vec![c(0.5), c(0.5)], 2.0) {
            Err(ManifoldError::BetaTooSmall { beta, min_c, .. }) => {
                assert!((beta - 1.0).abs() < 1e-14);
                assert!((min_c - 4.0).abs() < 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            HopfData::new(vec![c(0.5), c(1.0)], 4.0),
            Err(ManifoldError::EigenvalueOutOfRange { index: 1, .. })
        ));
        assert!(matches!(
            HopfData::new(vec![c(0.5), c(0.0)], 4.0),
            Err(ManifoldError::EigenvalueOutOfRange { index: 1, .. })
        ));
        assert!(matches!(
            HopfData::new(vec![c(0.5), c(0.5)], 1.0),
            Err(ManifoldError::InvalidC(_))
        ));
        assert!(matches!(
            HopfData::new(vec![c(0.5)], 4.0),
            Err(ManifoldError::DimensionTooSmall(1))
        ));
        assert!(matches!(
            Point::new(vec![c(0.0), c(0.0)]),
            Err(ManifoldError::ZeroPoint)
        ));
    }

    #[test]
    fn minimal_c_is_admissible() {
        let h = HopfData::with_minimal_c(vec![c(0.5), c(0.6), c(0.7)]).unwrap();
        assert!((h.c() - 4.0).abs() < 1e-14);
        assert!(h.betas().iter().all(|&b| b >= 2.0 - 1e-12));
    }

    #[test]
    fn potential_examples() {
        let h = classical();
        let p = Point::from_reals(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(potential(&h, &p), 1.0);
        let p = Point::from_reals(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(potential(&h, &p), 3.0);
        let h = HopfData::new(vec![c(0.5), c(0.25)], 16.0).unwrap();
        let p = Point::from_reals(&[1.0, 1.0]).unwrap();
        assert!((potential(&h, &p) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn contraction_examples() {
        let h = classical();
        let p = Point::from_reals(&[1.0, 1.0, 1.0]).unwrap();
        let q = apply_contraction(&h, &p);
        assert_eq!(q.coords(), &[c(0.5), c(0.5), c(0.5)]);
        assert_eq!(potential(&h, &q), 0.75);
        let p = Point::from_reals(&[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(
            apply_contraction(&h, &p).coords(),
            &[c(0.0), c(0.5), c(0.0)]
        );
        let p = Point::from_reals(&[0.3, -1.2, 0.8]).unwrap();
        let phi = potential(&h, &p);
        for k in -3..=3 {
            let q = apply_contraction_power(&h, &p, k);
            let expected = phi * h.c().powi(-k);
            assert!((potential(&h, &q) - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn fundamental_domain_boundaries() {
        let h = classical();
        assert!(in_fundamental_domain(
            &h,
            &Point::from_reals(&[1.0, 0.0, 0.0]).unwrap()
        ));
        assert!(!in_fundamental_domain(
            &h,
            &Point::from_reals(&[2.0, 0.0, 0.0]).unwrap()
        ));
    }

    #[test]
    fn fundamental_translate_lands_in_domain() {
        let h = HopfData::with_minimal_c(vec![c(0.5), c(0.6), c(0.7)]).unwrap();
        let p = Point::from_reals(&[30.0, -0.01, 4.0]).unwrap();
        let (k, q) = fundamental_translate(&h, &p);
        assert!(in_fundamental_domain(&h, &q));
        assert_eq!(q, apply_contraction_power(&h, &p, k));
    }

    #[test]
    fn sampler_is_deterministic_and_in_domain() {
        let h = classical();
        let a = sample_fundamental_domain(&h, 7, 200).unwrap();
        let b = sample_fundamental_domain(&h, 7, 200).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| in_fundamental_domain(&h, p)));
        let other = sample_fundamental_domain(&h, 8, 200).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn streams_are_independent() {
        let h = classical();
        let a = FundamentalDomainSampler::new(&h, 1)
            .with_stream(0)
            .sample(10)
            .unwrap();
        let b = FundamentalDomainSampler::new(&h, 1)
            .with_stream(1)
            .sample(10)
            .unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn axis_margin_is_respected() {
        let h = classical();
        let pts = FundamentalDomainSampler::new(&h, 3)
            .with_axis_margin(0.2)
            .sample(300)
            .unwrap();
        assert!(pts.iter().all(|p| p.min_modulus() >= 0.2));
    }

    #[test]
    fn sampler_starves_on_empty_region() {
        let h = classical();
        // No point of D has all coordinates of modulus >= 1.9 (φ would exceed C).
        let err = FundamentalDomainSampler::new(&h, 0)
            .with_axis_margin(1.9)
            .next_point()
            .unwrap_err();
        assert!(matches!(
            err,
            ManifoldError::SamplerStarved { accepted: 0, .. }
        ));
    }

    #[test]
    fn real_coordinates_round_trip() {
        let p = Point::new(vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 3.0)]).unwrap();
        assert_eq!(Point::from_real(&p.to_real()).unwrap(), p);
    }
}
