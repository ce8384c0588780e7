use std::f64::consts::PI;

use hopf_core::bundles::{
    admissibility_series, degree_of_weight_bundle, delta_estimate, linearity_residual,
    DomainSample, SampleMode, SeriesSurrogate,
};
use hopf_core::forms::DEFAULT_FD_STEP;
use hopf_core::lck::{fd_residuals, hermitian_form, LckStructure, AXIS_MARGIN};
use hopf_core::manifold::{
    apply_contraction_power, fundamental_translate, in_fundamental_domain, potential,
    FundamentalDomainSampler, HopfData,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn test_family() -> Vec<HopfData> {
    vec![
        HopfData::new(vec![cx(0.5, 0.0); 3], 4.0).unwrap(),
        HopfData::new(vec![cx(0.5, 0.0), cx(0.25, 0.0)], 16.0).unwrap(),
        HopfData::with_minimal_c(vec![cx(0.5, 0.0), cx(0.6, 0.0), cx(0.7, 0.0)]).unwrap(),
        HopfData::with_minimal_c(vec![
            cx(0.4, 0.3),
            cx(0.0, -0.6),
            cx(0.55, 0.1),
            cx(0.7, 0.0),
        ])
        .unwrap(),
    ]
}

proptest! {
    #[test]
    fn beta_consistency(moduli in prop::collection::vec(0.05f64..0.95, 2..=5), args in prop::collection::vec(0.0f64..6.3, 5), slack in 1.0f64..3.0) {
        let alphas: Vec<Complex64> = moduli.iter().zip(&args).map(|(&m, &a)| Complex64::from_polar(m, a)).collect();
        let c = slack * hopf_core::manifold::minimal_admissible_c(&alphas);
        let h = HopfData::new(alphas.clone(), c).unwrap();
        for (a, b) in alphas.iter().zip(h.betas()) {
            prop_assert!((a.norm().powf(-b) - c).abs() <= 1e-12 * c);
            prop_assert!(*b >= 2.0 - 1e-12);
        }
    }
}

#[test]
fn tiling_has_exactly_one_translate() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for h in test_family() {
        for _ in 0..1000 {
            let scale = 10f64.powf(rng.random::<f64>() * 8.0 - 4.0);
            let coords: Vec<Complex64> = (0..h.dim())
                .map(|_| cx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * scale)
                .collect();
            let p = hopf_core::manifold::Point::new(coords).unwrap();
            // Oracle: φ(A^k p) = C^{-k} φ(p) ∈ [1, C) pins k to a window of
            // width one around log_C φ(p); scan a wide window of integers.
            let center = (potential(&h, &p).ln() / h.log_c()).floor() as i32;
            let hits: Vec<i32> = ((center - 5)..=(center + 5))
                .filter(|&k| in_fundamental_domain(&h, &apply_contraction_power(&h, &p, k)))
                .collect();
            assert_eq!(hits.len(), 1, "{hits:?}");
            assert_eq!(fundamental_translate(&h, &p).0, hits[0]);
        }
    }
}

#[test]
fn sampler_acceptance_matches_volume_ratio() {
    // β = 2 in ℂ³: {φ < R} is the real 6-ball of radius √R, volume π³R³/6,
    // and the bounding polydisk has radius 2 in each factor.
    let h = HopfData::new(vec![cx(0.5, 0.0); 3], 4.0).unwrap();
    let expected = (PI.powi(3) / 6.0 * (64.0 - 1.0)) / (4.0 * PI).powi(3);
    let mut sampler = FundamentalDomainSampler::new(&h, 5);
    sampler.sample(20_000).unwrap();
    let draws = sampler.draws() as f64;
    let rate = sampler.acceptance_rate();
    let sigma = (expected * (1.0 - expected) / draws).sqrt();
    assert!(
        (rate - expected).abs() <= 3.0 * sigma,
        "{rate} vs {expected} ± {sigma}"
    );
}

#[test]
fn fd_cross_checks_across_family() {
    for h in test_family() {
        let s = LckStructure::new(h.clone());
        let pts = FundamentalDomainSampler::new(&h, 2)
            .with_axis_margin(0.05)
            .sample(20)
            .unwrap();
        for p in pts {
            let r = fd_residuals(&s, &p, DEFAULT_FD_STEP);
            let worst = r.kahler.max(r.omega0).max(r.d_hermitian).max(r.d_lee);
            assert!(worst < 1e-5, "{r:?}");
        }
    }
}

#[test]
fn surrogate_curvature_is_invariant() {
    let h = test_family().remove(3);
    let s = LckStructure::new(h.clone());
    let sur = SeriesSurrogate::rank_one();
    for p in FundamentalDomainSampler::new(&h, 8).sample(100).unwrap() {
        let q = apply_contraction_power(&h, &p, 1);
        let pulled = hermitian_form(&s, &q).pullback_diagonal(h.alphas());
        let here = hermitian_form(&s, &p);
        assert!(pulled.minus(&here).norm() <= 1e-10 * here.norm());
        let theta = sur.curvature(&s, &p);
        assert_eq!(theta.rank(), 1);
    }
}

#[test]
fn delta_is_positive_in_all_dimensions() {
    for h in test_family() {
        let s = LckStructure::new(h);
        let sample = DomainSample::draw(&s, 3, 0, 20_000).unwrap();
        let d = delta_estimate(&s, &sample).unwrap();
        assert!(d.value > 3.0 * d.std_error, "{d:?}");
    }
}

#[test]
fn independent_degree_and_linearity() {
    let s = LckStructure::new(test_family().remove(2));
    let lambdas = [-1.0, 1.0, 2.0];
    let mut estimates = Vec::new();
    for (i, &l) in lambdas.iter().enumerate() {
        let d = degree_of_weight_bundle(
            &s,
            l,
            21,
            50_000,
            SampleMode::Independent { index: i as u32 },
        )
        .unwrap();
        assert!(d.degree.within_sigma(l, 3.0), "{l}: {:?}", d.degree);
        estimates.push((l, d.degree));
    }
    let (res, sigma) = linearity_residual([estimates[0], estimates[1], estimates[2]]);
    assert!(res.abs() <= 3.0 * sigma, "{res} ± {sigma}");
}

#[test]
fn series_verdicts() {
    let three = LckStructure::new(test_family().remove(2));
    let r = admissibility_series(&three, &SeriesSurrogate::rank_one(), 2, 50_000, 3).unwrap();
    assert!(r.exact_ratio_error < 1e-10);
    assert!(r.convergent);
    assert!(r.ratio_consistent);
    let two = LckStructure::new(test_family().remove(1));
    let r = admissibility_series(&two, &SeriesSurrogate::rank_one(), 2, 50_000, 3).unwrap();
    assert!(r.exact_ratio_error < 1e-10);
    assert!(!r.convergent);
    assert!(r.ratio_consistent);
    assert!(r.partial_sums.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn axis_margin_is_reported() {
    let s = LckStructure::new(test_family().remove(0));
    let sample = DomainSample::draw(&s, 1, 0, 10_000).unwrap();
    let near = sample
        .points()
        .iter()
        .filter(|p| p.min_modulus() < AXIS_MARGIN)
        .count();
    assert_eq!(sample.axis_rejections(), near);
}
