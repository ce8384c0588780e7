//! Degrees on the Hopf manifold by Monte Carlo integration over the
//! fundamental domain, the weight bundle `L_λ`, slopes, the
//! Hermitian-Einstein defect and the admissibility series.
//!
//! Integrals use rejection sampling from the polydisk around `D`: with `N`
//! uniform draws and `f` extended by zero outside `D`, the estimate is
//! `V · Σ f / N` with standard error `V · sd(f) / √N`. Draws are produced in
//! fixed-size chunks, one generator stream per chunk, so results do not
//! depend on the thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::forms::{wedge_top, CMatrix, EndoForm11, FormError, HermitianForm11, LambdaContract};
use crate::lck::{hermitian_form, kahler_form, omega0, LckStructure, AXIS_MARGIN};
use crate::manifold::{apply_contraction_power, FundamentalDomainSampler, ManifoldError, Point};

/// Accepted points per generator stream.
const CHUNK: usize = 4096;

/// `Π √−1 dt_i ∧ dt̄_i = 2ⁿ dx_1 ∧ dy_1 ∧ … ∧ dx_n ∧ dy_n`.
fn lebesgue_factor(n: usize) -> f64 {
    2f64.powi(n as i32)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BundleError {
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("metric degenerates at a point within {0:e} of a coordinate hyperplane")]
    DegenerateMetric(f64),
    #[error("empty input")]
    EmptyInput,
    #[error("{degrees} degrees but {ranks} ranks")]
    LengthMismatch { degrees: usize, ranks: usize },
    #[error("degree of the base bundle is not positive: {0:e}")]
    NonPositiveDelta(f64),
    #[error("the series needs at least 2 terms, got {0}")]
    TooFewTerms(usize),
    #[error("at least {min} samples are required, got {got}")]
    TooFewSamples { min: usize, got: usize },
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeEstimate {
    pub value: f64,
    pub std_error: f64,
    pub sample_count: usize,
}

impl DegreeEstimate {
    /// `|value − target| ≤ k σ`.
    pub fn within_sigma(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }
}

/// Points of `D` drawn for one integral, with the number of polydisk draws
/// that produced them.
#[derive(Debug, Clone)]
pub struct DomainSample {
    points: Vec<Point>,
    draws: u64,
    box_volume: f64,
}

impl DomainSample {
    /// `count` accepted points from streams `stream_base · 2³² + chunk`.
    pub fn draw(
        s: &LckStructure,
        seed: u64,
        stream_base: u32,
        count: usize,
    ) -> Result<Self, ManifoldError> {
        let chunks = count.div_ceil(CHUNK);
        let parts: Vec<Result<(Vec<Point>, u64), ManifoldError>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let len = CHUNK.min(count - c * CHUNK);
                let mut sampler = FundamentalDomainSampler::new(s.hopf(), seed)
                    .with_stream(((stream_base as u64) << 32) | c as u64);
                let pts = sampler.sample(len)?;
                Ok((pts, sampler.draws()))
            })
            .collect();
        let mut points = Vec::with_capacity(count);
        let mut draws = 0;
        for part in parts {
            let (pts, d) = part?;
            points.extend(pts);
            draws += d;
        }
        Ok(Self {
            points,
            draws,
            box_volume: s.hopf().polydisk_volume(),
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points skipped because they lie within [`AXIS_MARGIN`] of an axis.
    pub fn axis_rejections(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.min_modulus() < AXIS_MARGIN)
            .count()
    }

    /// `∫_D f` in Lebesgue measure; axis-degenerate points contribute zero.
    /// Per-point values are computed in parallel and summed in sample order.
    pub fn integrate<F>(&self, f: F) -> Result<DegreeEstimate, BundleError>
    where
        F: Fn(&Point) -> Result<f64, BundleError> + Sync,
    {
        let values: Vec<f64> = self
            .points
            .par_iter()
            .map(|p| {
                if p.min_modulus() < AXIS_MARGIN {
                    Ok(0.0)
                } else {
                    f(p)
                }
            })
            .collect::<Result<_, _>>()?;
        let n = self.draws as f64;
        let sum: f64 = values.iter().sum();
        let sum_sq: f64 = values.iter().map(|v| v * v).sum();
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        Ok(DegreeEstimate {
            value: self.box_volume * mean,
            std_error: self.box_volume * (var / n).sqrt(),
            sample_count: self.points.len(),
        })
    }
}

/// Coefficient of `curv ∧ ω_H^{n−1}` against `dx_1 ∧ dy_1 ∧ … ∧ dx_n ∧ dy_n`,
/// computed as `(Λ_{ω_H} curv / n) · n! det ω_H · 2ⁿ`.
pub fn degree_density(
    s: &LckStructure,
    p: &Point,
    curv: &HermitianForm11,
) -> Result<f64, BundleError> {
    if p.min_modulus() < AXIS_MARGIN {
        return Err(BundleError::DegenerateMetric(AXIS_MARGIN));
    }
    let n = s.dim();
    let g = hermitian_form(s, p);
    let trace = curv.lambda(&g)?;
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    Ok(trace / n as f64 * factorial * g.determinant() * lebesgue_factor(n))
}

/// The same density through the mixed-discriminant expansion of the wedge.
pub fn degree_density_by_wedge(
    s: &LckStructure,
    p: &Point,
    curv: &HermitianForm11,
) -> Result<f64, BundleError> {
    let n = s.dim();
    let g = hermitian_form(s, p);
    let mut factors: Vec<&HermitianForm11> = vec![curv];
    factors.extend(std::iter::repeat_n(&g, n - 1));
    Ok(wedge_top(&factors)? * lebesgue_factor(n))
}

/// `L_λ`: the weight bundle with curvature `(λ / δ) ω₀`, where `δ` is the
/// degree of the curvature `ω₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightBundle {
    pub lambda: f64,
    pub delta: f64,
    pub curvature_scale: f64,
}

impl WeightBundle {
    pub fn new(lambda: f64, delta: f64) -> Result<Self, BundleError> {
        if delta.is_nan() || delta <= 0.0 {
            return Err(BundleError::NonPositiveDelta(delta));
        }
        Ok(Self {
            lambda,
            delta,
            curvature_scale: lambda / delta,
        })
    }

    pub fn curvature(&self, s: &LckStructure, p: &Point) -> HermitianForm11 {
        omega0(s, p).scale(self.curvature_scale)
    }
}

/// Whether `δ` and the numerator integral reuse one sample set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Shared,
    /// Independent sample sets; `index` separates repeated estimates under
    /// one seed.
    Independent {
        index: u32,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightBundleDegree {
    pub delta: DegreeEstimate,
    pub degree: DegreeEstimate,
    pub bundle: WeightBundle,
    pub axis_rejections: usize,
}

pub const MIN_DEGREE_SAMPLES: usize = 1000;

/// `δ = ∫_D ω₀ ∧ ω_H^{n−1}`.
pub fn delta_estimate(
    s: &LckStructure,
    sample: &DomainSample,
) -> Result<DegreeEstimate, BundleError> {
    sample.integrate(|p| degree_density(s, p, &omega0(s, p)))
}

/// `deg L_λ = ∫_D (λ/δ) ω₀ ∧ ω_H^{n−1}`.
///
/// With [`SampleMode::Shared`] the numerator reuses the points of `δ`, so the
/// result equals `λ` up to rounding and carries zero error. Otherwise the
/// ratio of two independent estimates is reported with a first-order
/// (delta-method) standard error.
pub fn degree_of_weight_bundle(
    s: &LckStructure,
    lambda: f64,
    seed: u64,
    count: usize,
    mode: SampleMode,
) -> Result<WeightBundleDegree, BundleError> {
    if count < MIN_DEGREE_SAMPLES {
        return Err(BundleError::TooFewSamples {
            min: MIN_DEGREE_SAMPLES,
            got: count,
        });
    }
    let (base_a, base_b) = match mode {
        SampleMode::Shared => (0, 0),
        SampleMode::Independent { index } => (2 * index + 1, 2 * index + 2),
    };
    let sample_a = DomainSample::draw(s, seed, base_a, count)?;
    let delta = delta_estimate(s, &sample_a)?;
    let bundle = WeightBundle::new(lambda, delta.value)?;
    let numerator =
        |sample: &DomainSample| sample.integrate(|p| degree_density(s, p, &bundle.curvature(s, p)));
    let degree = match mode {
        SampleMode::Shared => DegreeEstimate {
            std_error: 0.0,
            ..numerator(&sample_a)?
        },
        SampleMode::Independent { .. } => {
            let sample_b = DomainSample::draw(s, seed, base_b, count)?;
            // The numerator is (λ/δ̂_A) · Î_B with Î_B an independent copy of δ.
            let b = sample_b.integrate(|p| degree_density(s, p, &omega0(s, p)))?;
            let ratio = b.value / delta.value;
            let rel =
                ((b.std_error / b.value).powi(2) + (delta.std_error / delta.value).powi(2)).sqrt();
            DegreeEstimate {
                value: lambda * ratio,
                std_error: (lambda * ratio).abs() * rel,
                sample_count: count,
            }
        }
    };
    Ok(WeightBundleDegree {
        delta,
        degree,
        bundle,
        axis_rejections: sample_a.axis_rejections(),
    })
}

/// Deviation of three degree estimates from an affine function of `λ`,
/// with its standard error: `d_3 − [(λ_2−λ_3) d_1 + (λ_3−λ_1) d_2] / (λ_2−λ_1)`.
pub fn linearity_residual(points: [(f64, DegreeEstimate); 3]) -> (f64, f64) {
    let [(l1, d1), (l2, d2), (l3, d3)] = points;
    let w1 = (l2 - l3) / (l2 - l1);
    let w2 = (l3 - l1) / (l2 - l1);
    let residual = d3.value - w1 * d1.value - w2 * d2.value;
    let sigma =
        (d3.std_error.powi(2) + (w1 * d1.std_error).powi(2) + (w2 * d2.std_error).powi(2)).sqrt();
    (residual, sigma)
}

/// `Σ deg / Σ rk` for a direct sum.
pub fn slope(degrees: &[f64], ranks: &[usize]) -> Result<f64, BundleError> {
    if degrees.len() != ranks.len() {
        return Err(BundleError::LengthMismatch {
            degrees: degrees.len(),
            ranks: ranks.len(),
        });
    }
    let total_rank: usize = ranks.iter().sum();
    if total_rank == 0 {
        return Err(BundleError::EmptyInput);
    }
    Ok(degrees.iter().sum::<f64>() / total_rank as f64)
}

/// `‖Λ Θ − (Tr Λ Θ / r) Id‖` (Frobenius).
pub fn hermitian_einstein_residual(
    curv: &EndoForm11,
    g: &HermitianForm11,
) -> Result<f64, BundleError> {
    let l = curv.lambda(g)?;
    let r = curv.rank();
    let shift = CMatrix::identity(r, r) * (l.trace() / Complex64::new(r as f64, 0.0));
    Ok((l - shift).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}

/// Curvature surrogate `Θ = ω_H ⊗ u` for the series. Since `ω_H` is
/// `A`-invariant and `ω_K` has weight `C⁻¹`, the density
/// `−Tr(Θ ∧ Θ) ∧ ω_K^{n−2} = −Tr(u²) ω_H² ∧ ω_K^{n−2}` has weight `C^{−(n−2)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSurrogate {
    generator: CMatrix,
}

impl SeriesSurrogate {
    /// `u` must be skew-Hermitian.
    pub fn new(generator: CMatrix) -> Result<Self, BundleError> {
        HermitianForm11::identity(1).tensor(&generator)?;
        Ok(Self { generator })
    }

    /// The rank-one generator `u = √−1`.
    pub fn rank_one() -> Self {
        Self {
            generator: CMatrix::from_element(1, 1, Complex64::i()),
        }
    }

    pub fn curvature(&self, s: &LckStructure, p: &Point) -> EndoForm11 {
        hermitian_form(s, p)
            .tensor(&self.generator)
            .expect("generator validated at construction")
    }

    /// Lebesgue density of `−Tr(Θ ∧ Θ) ∧ ω_K^{n−2}` at `p`.
    pub fn density(&self, s: &LckStructure, p: &Point) -> Result<f64, BundleError> {
        let n = s.dim();
        let h = hermitian_form(s, p);
        let k = kahler_form(s, p);
        let tr_u2 = (&self.generator * &self.generator).trace().re;
        let mut factors = vec![&h, &h];
        factors.extend(std::iter::repeat_n(&k, n - 2));
        Ok(-tr_u2 * wedge_top(&factors)? * lebesgue_factor(n))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport {
    pub terms: usize,
    /// `C^{−(n−2)}`.
    pub expected_ratio: f64,
    /// `I_i` from the shared sample mapped through `A^i`.
    pub exact_integrals: Vec<f64>,
    /// Largest `|I_{i+1}/I_i − C^{−(n−2)}|` on the shared sample.
    pub exact_ratio_error: f64,
    /// `I_i` from independent sample sets, one per term.
    pub integrals: Vec<DegreeEstimate>,
    /// `I_{i+1}/I_i` with delta-method errors.
    pub ratios: Vec<(f64, f64)>,
    /// `(I_{last}/I_0)^{1/(terms−1)}` with its standard error.
    pub combined_ratio: (f64, f64),
    pub partial_sums: Vec<f64>,
    /// Combined ratio below `1 − 3σ`.
    pub convergent: bool,
    /// Combined ratio within `3σ` of the expected ratio.
    pub ratio_consistent: bool,
}

/// `I_i = ∫_{A^i D} density = ∫_D density(A^i y) |det_ℝ A|^i dy`.
fn term_integral(
    s: &LckStructure,
    surrogate: &SeriesSurrogate,
    sample: &DomainSample,
    i: usize,
) -> Result<DegreeEstimate, BundleError> {
    let jac = s.hopf().real_jacobian().powi(i as i32);
    sample.integrate(|y| {
        let q = apply_contraction_power(s.hopf(), y, i as i32);
        Ok(surrogate.density(s, &q)? * jac)
    })
}

pub fn admissibility_series(
    s: &LckStructure,
    surrogate: &SeriesSurrogate,
    seed: u64,
    count: usize,
    terms: usize,
) -> Result<SeriesReport, BundleError> {
    if terms < 2 {
        return Err(BundleError::TooFewTerms(terms));
    }
    let n = s.dim();
    let expected = s.hopf().c().powi(-(n as i32 - 2));

    let shared = DomainSample::draw(s, seed, 0, count)?;
    let exact: Vec<f64> = (0..terms)
        .map(|i| term_integral(s, surrogate, &shared, i).map(|e| e.value))
        .collect::<Result<_, _>>()?;
    let exact_ratio_error = exact
        .windows(2)
        .map(|w| (w[1] / w[0] - expected).abs())
        .fold(0.0, f64::max);

    let integrals: Vec<DegreeEstimate> = (0..terms)
        .map(|i| {
            let sample = DomainSample::draw(s, seed, i as u32 + 1, count)?;
            term_integral(s, surrogate, &sample, i)
        })
        .collect::<Result<_, _>>()?;
    let rel = |e: &DegreeEstimate| e.std_error / e.value;
    let ratios = integrals
        .windows(2)
        .map(|w| {
            let r = w[1].value / w[0].value;
            (
                r,
                r.abs() * (rel(&w[0]).powi(2) + rel(&w[1]).powi(2)).sqrt(),
            )
        })
        .collect();
    let (first, last) = (&integrals[0], &integrals[terms - 1]);
    let steps = (terms - 1) as f64;
    let r = (last.value / first.value).powf(1.0 / steps);
    let sigma = r * (rel(first).powi(2) + rel(last).powi(2)).sqrt() / steps;
    let partial_sums = integrals
        .iter()
        .scan(0.0, |acc, e| {
            *acc += e.value;
            Some(*acc)
        })
        .collect();
    Ok(SeriesReport {
        terms,
        expected_ratio: expected,
        exact_integrals: exact,
        exact_ratio_error,
        integrals,
        ratios,
        combined_ratio: (r, sigma),
        partial_sums,
        convergent: r < 1.0 - 3.0 * sigma,
        ratio_consistent: (r - expected).abs() <= 3.0 * sigma,
    })
}
