use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::analyze::{analyze_point, sample_normals, PointAnalysis};
use super::{nums, AnalysisConfig, FaultInjection, Num, ReportError, DEFAULT_SAMPLES, DEFAULT_TOL};
use crate::error::GeometryError;
use crate::linalg::{max_sorted_distance, symmetric_eigenvalues};
use crate::model::{bracket, connection, inner, AlgebraVector, ModelSpace};
use crate::ode::integrate_jacobi_ode;
use crate::sampling::{random_subspace, seeded};
use crate::submanifold::{shape_operator_w, submanifold_spectrum};
use crate::subspace::{NormalSubspace, Preset};
use crate::tube::{classify_tube, propagator_matrices};

/// Tolerance for deciding empirically that spectra do not depend on `ξ`.
pub const SPECTRUM_TOL: f64 = 1e-8;
pub const DEFAULT_RADII: [f64; 3] = [0.5, 1.0, 2.0];
const CONNECTION_TRIPLES: usize = 200;
const ODE_SAMPLES: usize = 2;
const ODE_STEP: f64 = 1e-3;
const ODE_T_END: f64 = 3.0;
const ODE_STRIDE: usize = 50;
/// Failures listed per suite; the count is always complete.
const FAILURE_LIST_CAP: usize = 25;

const SUITES: [&str; 8] = [
    "connection_axioms",
    "jacobi_ode_oracle",
    "determinant_identity",
    "trace_identity",
    "charpoly_identity",
    "mean_curvature_constancy",
    "homogeneity_consistency",
    "submanifold_shape_operator",
];

#[derive(Debug, Clone)]
pub struct VerifySettings {
    pub battery: Vec<(String, NormalSubspace)>,
    pub radii: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl VerifySettings {
    /// The shipped battery with default radii and sample count.
    pub fn shipped(seed: u64, tol: f64) -> Self {
        Self {
            battery: default_battery(seed),
            radii: DEFAULT_RADII.to_vec(),
            samples: DEFAULT_SAMPLES,
            seed,
            tol,
        }
    }

    /// Runs the suites on the configured subspace only.
    pub fn from_config(config: &AnalysisConfig) -> Result<Self, ReportError> {
        let sub = config.subspace()?;
        let radii = if config.radii.is_empty() {
            DEFAULT_RADII.to_vec()
        } else {
            config.sorted_radii()?
        };
        Ok(Self {
            battery: vec![(config.wperp.to_string(), sub)],
            radii,
            samples: config.samples,
            seed: config.seed,
            tol: config.tol,
        })
    }
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self::shipped(super::DEFAULT_SEED, DEFAULT_TOL)
    }
}

/// Presets for `n = 2..=5` plus two seeded random subspaces per `n`.
pub fn default_battery(seed: u64) -> Vec<(String, NormalSubspace)> {
    let mut rng = seeded(seed);
    let mut battery = Vec::new();
    for n in 2..=5 {
        let model = ModelSpace::new(n).expect("n >= 2");
        let mut presets: Vec<Preset> = (1..n).flat_map(|j| [Preset::Complex(j), Preset::TotallyReal(j)]).collect();
        if n >= 3 {
            presets.push(Preset::Mixed3);
            presets.push(Preset::ThetaPlane(FRAC_PI_4));
        }
        for p in presets {
            let sub = p.build(model).expect("preset fits n");
            battery.push((format!("n={n} {p}"), sub));
        }
        for _ in 0..2 {
            let k = rng.random_range(1..=2 * n - 2);
            let sub = random_subspace(model, k, &mut rng).expect("gaussian vectors are independent");
            battery.push((format!("n={n} random(k={k})"), sub));
        }
    }
    battery
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub suite: String,
    pub case: String,
    pub residual: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub checks: usize,
    pub failures: usize,
    pub worst_residual: Num,
    pub tol: Num,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyMeta {
    pub command: String,
    pub seed: u64,
    pub tol: Num,
    pub samples: usize,
    pub radii: Vec<Num>,
    pub battery: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub meta: VerifyMeta,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.suite == name)
    }
}

struct Check {
    suite: usize,
    case: String,
    residual: f64,
    ok: bool,
}

struct Checks {
    tol: f64,
    list: Vec<Check>,
}

impl Checks {
    fn new(tol: f64) -> Self {
        Self { tol, list: Vec::new() }
    }

    fn residual(&mut self, suite: usize, case: impl FnOnce() -> String, residual: f64) {
        let ok = residual <= self.tol;
        self.flag(suite, case, residual, ok);
    }

    fn flag(&mut self, suite: usize, case: impl FnOnce() -> String, residual: f64, ok: bool) {
        let case = if ok { String::new() } else { case() };
        self.list.push(Check { suite, case, residual, ok });
    }
}

fn numerical(label: &str) -> impl Fn(GeometryError) -> ReportError + '_ {
    move |e| ReportError::Numerical(format!("{label}: {e}"))
}

fn random_vector(model: ModelSpace, rng: &mut impl Rng) -> AlgebraVector {
    let flat: Vec<f64> = (0..model.real_dim()).map(|_| rng.sample(StandardNormal)).collect();
    model.from_flat(&flat).expect("length matches")
}

fn connection_checks(model: ModelSpace, seed: u64, checks: &mut Checks) -> Result<(), ReportError> {
    let label = format!("connection n={}", model.n());
    let err = numerical(&label);
    let mut rng = seeded(seed);
    for i in 0..CONNECTION_TRIPLES {
        let (x, y, z) = (random_vector(model, &mut rng), random_vector(model, &mut rng), random_vector(model, &mut rng));
        let torsion = &(&connection(&x, &y).map_err(&err)? - &connection(&y, &x).map_err(&err)?)
            - &bracket(&x, &y).map_err(&err)?;
        let scale = x.norm() * y.norm();
        checks.residual(0, || format!("{label} triple {i}: torsion"), torsion.max_abs() / scale);
        let metric = inner(&connection(&x, &y).map_err(&err)?, &z).map_err(&err)?
            + inner(&y, &connection(&x, &z).map_err(&err)?).map_err(&err)?;
        checks.residual(
            0,
            || format!("{label} triple {i}: metric"),
            metric.abs() / (scale * z.norm()),
        );
    }
    Ok(())
}

fn subspace_checks(
    label: &str,
    sub: &NormalSubspace,
    settings: &VerifySettings,
    seed: u64,
    faults: FaultInjection,
) -> Result<Checks, ReportError> {
    let mut checks = Checks::new(settings.tol);
    let err = numerical(label);
    let samples = sample_normals(sub, settings.samples, seed).map_err(&err)?;

    for (si, (dec, frame)) in samples.iter().enumerate().take(ODE_SAMPLES) {
        let (d0, dp0) = propagator_matrices(frame, dec, 0.0);
        let mut worst: f64 = 0.0;
        for j in 0..frame.len() {
            let traj = integrate_jacobi_ode(&d0.column(j).into(), &dp0.column(j).into(), &frame.j_xi, ODE_T_END, ODE_STEP)
                .map_err(&err)?;
            for (t, v) in traj.times.iter().zip(&traj.values).step_by(ODE_STRIDE).skip(1) {
                let (d, _) = propagator_matrices(frame, dec, *t);
                let col = d.column(j);
                worst = worst.max((v - col).amax() / col.amax().max(1.0));
            }
        }
        checks.residual(1, || format!("{label} sample {si}"), worst);
    }

    let classification = classify_tube(sub);
    for &r in &settings.radii {
        let points: Vec<PointAnalysis> = samples
            .iter()
            .map(|(dec, frame)| analyze_point(sub, frame, dec, r, faults))
            .collect::<Result<_, _>>()
            .map_err(|e| ReportError::Numerical(format!("{label} r = {r}: {e}")))?;
        for (si, p) in points.iter().enumerate() {
            let case = || format!("{label} r={r} sample {si}");
            checks.residual(2, case, p.det_resid);
            checks.residual(3, case, p.trace_resid);
            checks.residual(4, case, p.charpoly_resid);
        }
        let lo = points.iter().map(|p| p.trace).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p.trace).fold(f64::NEG_INFINITY, f64::max);
        checks.residual(5, || format!("{label} r={r}"), hi - lo);

        let spread = points
            .iter()
            .map(|p| max_sorted_distance(&points[0].sorted, &p.sorted))
            .fold(0.0, f64::max);
        let empirical = spread <= SPECTRUM_TOL;
        checks.flag(
            6,
            || {
                format!(
                    "{label} r={r}: classified homogeneous={} but spectra spread {spread:e}",
                    classification.homogeneous
                )
            },
            if classification.homogeneous { spread } else { 0.0 },
            empirical == classification.homogeneous,
        );
    }

    for (si, (dec, _)) in samples.iter().enumerate() {
        let shape = shape_operator_w(sub, dec).map_err(&err)?;
        let m = &shape.matrix;
        let eig = symmetric_eigenvalues(&((m + m.transpose()) * 0.5));
        let mut expected: Vec<f64> = submanifold_spectrum(sub, dec)
            .iter()
            .flat_map(|c| std::iter::repeat_n(c.value, c.multiplicity))
            .collect();
        expected.sort_by(f64::total_cmp);
        let resid = m.trace().abs().max(max_sorted_distance(&eig, &expected));
        checks.residual(7, || format!("{label} sample {si}"), resid);
    }
    Ok(checks)
}

/// Runs every suite; `passed` is true iff no check fails.
pub fn cmd_verify(settings: &VerifySettings, faults: FaultInjection) -> Result<VerifyReport, ReportError> {
    let tol = settings.tol;
    let mut models: Vec<ModelSpace> = settings.battery.iter().map(|(_, s)| s.model()).collect();
    models.dedup();

    let mut parts: Vec<Checks> = models
        .par_iter()
        .map(|&model| {
            let mut checks = Checks::new(tol);
            connection_checks(model, settings.seed.wrapping_add(model.n() as u64), &mut checks)?;
            Ok(checks)
        })
        .collect::<Result<_, ReportError>>()?;
    let per_subspace: Vec<Checks> = settings
        .battery
        .par_iter()
        .enumerate()
        .map(|(i, (label, sub))| subspace_checks(label, sub, settings, settings.seed.wrapping_add(i as u64), faults))
        .collect::<Result<_, _>>()?;
    parts.extend(per_subspace);

    let mut suites: Vec<SuiteResult> = SUITES
        .iter()
        .enumerate()
        .map(|(i, name)| SuiteResult {
            suite: name.to_string(),
            checks: 0,
            failures: 0,
            worst_residual: Num(0.0),
            tol: Num(if i == 6 { SPECTRUM_TOL } else { tol }),
            passed: true,
        })
        .collect();
    let mut failures = Vec::new();
    let mut listed = [0usize; SUITES.len()];
    for check in parts.into_iter().flat_map(|c| c.list) {
        let s = &mut suites[check.suite];
        s.checks += 1;
        s.worst_residual = Num(s.worst_residual.0.max(check.residual));
        if !check.ok {
            s.failures += 1;
            s.passed = false;
            if listed[check.suite] < FAILURE_LIST_CAP {
                listed[check.suite] += 1;
                failures.push(Failure {
                    suite: s.suite.clone(),
                    case: check.case,
                    residual: Num(check.residual),
                });
            }
        }
    }

    Ok(VerifyReport {
        meta: VerifyMeta {
            command: "verify".into(),
            seed: settings.seed,
            tol: Num(tol),
            samples: settings.samples,
            radii: nums(&settings.radii),
            battery: settings.battery.iter().map(|(l, _)| l.clone()).collect(),
        },
        passed: suites.iter().all(|s| s.passed),
        suites,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(tol: f64) -> VerifySettings {
        let model = ModelSpace::new(3).unwrap();
        VerifySettings {
            battery: vec![
                ("mixed3".into(), Preset::Mixed3.build(model).unwrap()),
                ("complex(1)".into(), Preset::Complex(1).build(model).unwrap()),
            ],
            radii: vec![1.0],
            samples: 8,
            seed: 1,
            tol,
        }
    }

    #[test]
    fn quick_battery_passes() {
        let report = cmd_verify(&quick(1e-8), FaultInjection::default()).unwrap();
        assert!(report.passed, "{:?}", report.failures);
        assert_eq!(report.suites.len(), SUITES.len());
        assert!(report.suites.iter().all(|s| s.checks > 0));
    }

    #[test]
    fn sign_flip_fails_trace_identity() {
        let report = cmd_verify(&quick(1e-8), FaultInjection { flip_shape_sign: true }).unwrap();
        assert!(!report.passed);
        assert!(!report.suite("trace_identity").unwrap().passed);
        assert!(report.failures.iter().any(|f| f.suite == "trace_identity"));
    }

    #[test]
    fn precision_floor_fails() {
        let report = cmd_verify(&quick(1e-15), FaultInjection::default()).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn battery_is_seeded() {
        let a: Vec<String> = default_battery(9).into_iter().map(|(l, _)| l).collect();
        let b: Vec<String> = default_battery(9).into_iter().map(|(l, _)| l).collect();
        assert_eq!(a, b);
        assert!(a.iter().any(|l| l.contains("mixed3")));
    }
}
