use std::collections::BTreeMap;

use hopf_core::bundles::{
    admissibility_series, degree_of_weight_bundle, linearity_residual, SampleMode, SeriesSurrogate,
};
use hopf_core::equivariant::{
    build_filtration, closure_rank, parse_module, subquotient_rank_check, EquivariantError,
};
use hopf_core::forms::TangentVector;
use hopf_core::lck::{fd_residuals, gauduchon_report, LckStructure};
use hopf_core::manifold::{FundamentalDomainSampler, HopfData};
use hopf_core::moment::moment_sides;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{complex, float, list, Bound, Report};
use crate::CliError;

/// Default tolerances of `verify`, keyed by check name.
pub const VERIFY_TOLERANCES: &[(&str, f64)] = &[
    ("potential_homothety", 1e-12),
    ("kahler_homothety", 1e-12),
    ("hermitian_form_invariance", 1e-12),
    ("lee_field_hermitian_norm_constant", 1e-10),
    ("lee_field_kahler_norm_over_potential", 1e-10),
    ("omega0_positive_semidefinite", -1e-10),
    ("omega0_rank_gap", 1e-3),
    ("omega0_lee_field_null", 1e-10),
    ("moment_map", 1e-10),
    ("fd_kahler_form", 1e-5),
    ("fd_dc_lee_form", 1e-5),
    ("fd_d_hermitian_form", 1e-5),
    ("fd_lee_form_closed", 1e-5),
];

/// Points used for the finite-difference checks; they cost `O(n³)` evaluations each.
const FD_POINTS: usize = 100;
/// FD points stay this far from the coordinate hyperplanes, relative to the
/// polydisk radius, where the metric coefficients vary slowly.
const FD_AXIS_MARGIN: f64 = 0.05;

/// Options shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    pub fd_step: f64,
    pub tolerances: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn new(seed: u64, samples: usize, fd_step: f64) -> Result<Self, CliError> {
        if samples == 0 {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        if fd_step.is_nan() || fd_step <= 0.0 {
            return Err(CliError::Usage(format!(
                "--fd-step must be positive, got {fd_step}"
            )));
        }
        Ok(Self {
            seed,
            samples,
            fd_step,
            tolerances: BTreeMap::new(),
        })
    }

    /// Applies `name=value` overrides; names must be known checks.
    pub fn with_overrides(
        mut self,
        known: &[(&str, f64)],
        overrides: &[String],
    ) -> Result<Self, CliError> {
        for o in overrides {
            let (name, value) = o.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("tolerance override '{o}' is not name=value"))
            })?;
            if !known.iter().any(|(k, _)| *k == name) {
                return Err(CliError::Usage(format!("unknown check '{name}'")));
            }
            let v: f64 = value
                .parse()
                .map_err(|_| CliError::Usage(format!("invalid tolerance '{value}'")))?;
            self.tolerances.insert(name.to_string(), v);
        }
        Ok(self)
    }

    fn tolerance(&self, known: &[(&str, f64)], name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or_else(|| {
            known
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .expect("check has a default tolerance")
        })
    }
}

/// A finished report and whether every check passed.
#[derive(Debug)]
pub struct Outcome {
    pub report: String,
    pub passed: bool,
}

impl From<Report> for Outcome {
    fn from(r: Report) -> Self {
        let (report, passed) = r.finish();
        Self { report, passed }
    }
}

fn describe_hopf(r: &mut Report, h: &HopfData) {
    r.field("n", h.dim());
    r.field("alphas", list(h.alphas(), |z| complex(*z)));
    r.field("C", float(h.c()));
    r.field("betas", list(h.betas(), |b| float(*b)));
}

fn describe_run(r: &mut Report, run: &RunConfig) {
    r.field("seed", run.seed);
    r.field("samples", run.samples);
}

/// Closed-form identities, moment map and finite-difference cross-checks.
pub fn cmd_verify(h: &HopfData, run: &RunConfig, relation_bound: i64) -> Result<Outcome, CliError> {
    let tol = |name| run.tolerance(VERIFY_TOLERANCES, name);
    let s = LckStructure::new(h.clone());
    let mut r = Report::new("verify");
    describe_hopf(&mut r, h);
    describe_run(&mut r, run);
    r.field("fd_step", float(run.fd_step));

    let closure = closure_rank(h.alphas(), relation_bound);
    r.field("closure.relation_bound", relation_bound);
    r.field(
        "closure.relations",
        list(&closure.relations, |m| format!("{m:?}")),
    );
    r.field("closure.torus_rank", closure.rank);
    r.blank();

    let g = gauduchon_report(&s, run.seed, run.samples)?;
    r.field("lee_field.expected_constant", float(g.expected_constant));
    let checks = [
        ("potential_homothety", g.potential_homothety, Bound::AtMost),
        ("kahler_homothety", g.kahler_homothety, Bound::AtMost),
        (
            "hermitian_form_invariance",
            g.hermitian_invariance,
            Bound::AtMost,
        ),
        (
            "lee_field_hermitian_norm_constant",
            g.gauduchon_deviation,
            Bound::AtMost,
        ),
        (
            "lee_field_kahler_norm_over_potential",
            g.kahler_ratio_deviation,
            Bound::AtMost,
        ),
        (
            "omega0_positive_semidefinite",
            g.omega0_min_ratio,
            Bound::AtLeast,
        ),
        ("omega0_rank_gap", g.omega0_gap_ratio, Bound::AtLeast),
        ("omega0_lee_field_null", g.omega0_null, Bound::AtMost),
    ];
    for (name, value, bound) in checks {
        r.check(name, value, bound, tol(name));
    }

    // Random tangent vectors with components in the unit square; each residual
    // is relative to the larger side, floored at one.
    let mut sampler = FundamentalDomainSampler::new(h, run.seed).with_stream(1);
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    rng.set_stream(2);
    let mut moment = 0.0_f64;
    for _ in 0..run.samples {
        let p = sampler.next_point()?;
        let w = TangentVector::new(
            (0..h.dim())
                .map(|_| {
                    Complex64::new(
                        rng.random::<f64>() * 2.0 - 1.0,
                        rng.random::<f64>() * 2.0 - 1.0,
                    )
                })
                .collect(),
        );
        let (lhs, rhs) = moment_sides(&s, &p, &w);
        moment = moment.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0));
    }
    r.check("moment_map", moment, Bound::AtMost, tol("moment_map"));

    let margin = FD_AXIS_MARGIN
        * h.polydisk_radii()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
    let points = FundamentalDomainSampler::new(h, run.seed)
        .with_stream(3)
        .with_axis_margin(margin)
        .sample(run.samples.min(FD_POINTS))?;
    let mut worst = [0.0_f64; 4];
    for p in &points {
        let fd = fd_residuals(&s, p, run.fd_step);
        for (w, v) in worst
            .iter_mut()
            .zip([fd.kahler, fd.omega0, fd.d_hermitian, fd.d_lee])
        {
            *w = w.max(v);
        }
    }
    r.field("fd.points", points.len());
    let names = [
        "fd_kahler_form",
        "fd_dc_lee_form",
        "fd_d_hermitian_form",
        "fd_lee_form_closed",
    ];
    for (name, value) in names.into_iter().zip(worst) {
        r.check(name, value, Bound::AtMost, tol(name));
    }
    Ok(r.into())
}

pub const DEGREE_TOLERANCES: &[(&str, f64)] = &[
    ("delta_positive_sigmas", 3.0),
    ("shared_sample_degree_error", 1e-10),
    ("independent_degree_sigmas", 3.0),
    ("linearity_sigmas", 3.0),
];

/// `deg L_λ` with shared and independent samples, and linearity in `λ`.
pub fn cmd_degree(h: &HopfData, run: &RunConfig, lambda: f64) -> Result<Outcome, CliError> {
    let tol = |name| run.tolerance(DEGREE_TOLERANCES, name);
    let s = LckStructure::new(h.clone());
    let mut r = Report::new("degree");
    describe_hopf(&mut r, h);
    describe_run(&mut r, run);
    r.field("lambda", float(lambda));
    r.blank();

    let shared = degree_of_weight_bundle(&s, lambda, run.seed, run.samples, SampleMode::Shared)?;
    let delta = shared.delta;
    r.field("delta.value", float(delta.value));
    r.field("delta.std_error", float(delta.std_error));
    r.field("axis_rejections", shared.axis_rejections);
    r.check(
        "delta_positive_sigmas",
        delta.value / delta.std_error,
        Bound::AtLeast,
        tol("delta_positive_sigmas"),
    );
    r.field("shared.degree", float(shared.degree.value));
    r.check(
        "shared_sample_degree_error",
        (shared.degree.value - lambda).abs() / lambda.abs().max(1.0),
        Bound::AtMost,
        tol("shared_sample_degree_error"),
    );

    let lambdas = [-1.0, 1.0, lambda];
    let mut estimates = Vec::with_capacity(3);
    let mut worst = 0.0_f64;
    for (i, &l) in lambdas.iter().enumerate() {
        let d = degree_of_weight_bundle(
            &s,
            l,
            run.seed,
            run.samples,
            SampleMode::Independent { index: i as u32 },
        )?;
        r.field(&format!("independent.{i}.lambda"), float(l));
        r.field(&format!("independent.{i}.degree"), float(d.degree.value));
        r.field(
            &format!("independent.{i}.std_error"),
            float(d.degree.std_error),
        );
        worst = worst.max((d.degree.value - l).abs() / d.degree.std_error);
        estimates.push((l, d.degree));
    }
    r.check(
        "independent_degree_sigmas",
        worst,
        Bound::AtMost,
        tol("independent_degree_sigmas"),
    );
    let (res, sigma) = linearity_residual([estimates[0], estimates[1], estimates[2]]);
    r.field("linearity.residual", float(res));
    r.field("linearity.std_error", float(sigma));
    let sigmas = if sigma > 0.0 { res.abs() / sigma } else { 0.0 };
    r.check(
        "linearity_sigmas",
        sigmas,
        Bound::AtMost,
        tol("linearity_sigmas"),
    );
    Ok(r.into())
}

pub const SERIES_TOLERANCES: &[(&str, f64)] =
    &[("exact_ratio_error", 1e-10), ("ratio_sigmas", 3.0)];

/// Terms of the admissibility series and the convergence verdict.
pub fn cmd_series(h: &HopfData, run: &RunConfig, terms: usize) -> Result<Outcome, CliError> {
    if terms < 2 {
        return Err(CliError::Usage(format!(
            "--terms must be at least 2, got {terms}"
        )));
    }
    let tol = |name| run.tolerance(SERIES_TOLERANCES, name);
    let s = LckStructure::new(h.clone());
    let mut r = Report::new("series");
    describe_hopf(&mut r, h);
    describe_run(&mut r, run);
    r.field("terms", terms);
    r.blank();

    let rep = admissibility_series(
        &s,
        &SeriesSurrogate::rank_one(),
        run.seed,
        run.samples,
        terms,
    )?;
    r.field("expected_ratio", float(rep.expected_ratio));
    for (i, (exact, est)) in rep.exact_integrals.iter().zip(&rep.integrals).enumerate() {
        r.field(&format!("term.{i}.shared_sample"), float(*exact));
        r.field(&format!("term.{i}.independent"), float(est.value));
        r.field(&format!("term.{i}.std_error"), float(est.std_error));
        r.field(&format!("term.{i}.partial_sum"), float(rep.partial_sums[i]));
    }
    for (i, (ratio, sigma)) in rep.ratios.iter().enumerate() {
        r.field(
            &format!("ratio.{}_{}", i + 1, i),
            format!("{} +- {}", float(*ratio), float(*sigma)),
        );
    }
    let (ratio, sigma) = rep.combined_ratio;
    r.field("combined_ratio", float(ratio));
    r.field("combined_ratio.std_error", float(sigma));
    r.field(
        "verdict",
        if rep.convergent {
            "convergent"
        } else {
            "divergent"
        },
    );
    r.check(
        "exact_ratio_error",
        rep.exact_ratio_error,
        Bound::AtMost,
        tol("exact_ratio_error"),
    );
    let sigmas = if sigma > 0.0 {
        (ratio - rep.expected_ratio).abs() / sigma
    } else {
        0.0
    };
    r.check("ratio_sigmas", sigmas, Bound::AtMost, tol("ratio_sigmas"));
    Ok(r.into())
}

/// Builds the weight filtration of a module file and checks every step.
pub fn cmd_filtration(text: &str, cap: u32) -> Result<Outcome, CliError> {
    let m = parse_module(text).map_err(|e| CliError::Module {
        line: e.line,
        message: e.message,
    })?;
    let f = build_filtration(&m);
    let report = subquotient_rank_check(&m, &f, cap).map_err(|e| match e {
        EquivariantError::NoPositiveGrading { .. } | EquivariantError::NoEmbedding => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Core(other.to_string()),
    })?;

    let mut r = Report::new("filtration");
    r.field("torus_rank", m.action().rank());
    r.field("variables", m.action().nvars());
    r.field("generators", m.generators().len());
    r.field("relations", m.relations().len());
    r.field("degree_cap", cap);
    r.field("grading.direction", format!("{:?}", report.direction));
    r.field(
        "grading.coordinate_degrees",
        format!("{:?}", report.exponents),
    );
    r.field("chain_valid", f.is_valid(&m));
    r.blank();

    for (i, step) in report.steps.iter().enumerate() {
        let g = &m.generators()[step.generator];
        let prefix = format!("step.{}", i + 1);
        r.field(&format!("{prefix}.generator"), &g.name);
        r.field(&format!("{prefix}.weight"), format!("{:?}", g.weight.0));
        let names: Vec<&str> = f.chain()[i]
            .iter()
            .map(|&j| m.generators()[j].name.as_str())
            .collect();
        r.field(&format!("{prefix}.span"), format!("[{}]", names.join(", ")));
        let dims: Vec<String> = step
            .pieces
            .iter()
            .map(|p| format!("{}:{}/{}", p.degree, p.dimension, p.bound))
            .collect();
        r.field(&format!("{prefix}.pieces"), dims.join(" "));
        if step.cap_too_small {
            r.field(&format!("{prefix}.note"), "no nonzero piece up to the cap");
        }
        // Largest excess of a graded piece over the cyclic bound.
        let excess = step
            .pieces
            .iter()
            .map(|p| p.dimension as f64 - p.bound as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        r.check(
            &format!("step_{}_cyclic_bound", i + 1),
            excess,
            Bound::AtMost,
            0.0,
        );
    }
    Ok(r.into())
}
