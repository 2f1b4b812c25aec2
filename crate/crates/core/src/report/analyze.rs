use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::{nums, AnalysisConfig, FaultInjection, Num, ReportError, ORIENTATION};
use crate::charpoly::closed_principal_curvatures;
use crate::error::GeometryError;
use crate::linalg::max_sorted_distance;
use crate::sampling::{sample_unit_normal, seeded};
use crate::submanifold::{adapted_frame, AdaptedFrame};
use crate::subspace::{decompose, KaehlerDecomposition, NormalSubspace};
use crate::tube::{
    classify_tube, det_propagator_closed, log_det_derivative_closed, mean_curvature_closed,
    propagator_in_frame, shape_from_propagator, spectrum_of, CLUSTER_TOL,
};

/// Everything measured at one point `γ_ξ(r)` of one tube.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PointAnalysis {
    pub sorted: Vec<f64>,
    pub groups: Vec<(f64, usize)>,
    pub trace: f64,
    pub h_closed: f64,
    pub det_resid: f64,
    pub charpoly_resid: f64,
    pub trace_resid: f64,
}

pub(crate) fn analyze_point(
    sub: &NormalSubspace,
    frame: &AdaptedFrame,
    dec: &KaehlerDecomposition,
    r: f64,
    faults: FaultInjection,
) -> Result<PointAnalysis, GeometryError> {
    let (n, k) = (sub.n(), sub.k());
    let prop = propagator_in_frame(frame.clone(), dec, r);
    let det_closed = det_propagator_closed(n, k, r);
    let det_resid = ((prop.d.determinant() - det_closed) / det_closed).abs();
    let mut shape = shape_from_propagator(&prop)?;
    if faults.flip_shape_sign {
        shape = -shape;
    }
    let (sorted, groups) = spectrum_of(&shape, CLUSTER_TOL);
    let trace = shape.trace();
    let h_closed = mean_curvature_closed(n, k, r);
    let roots = closed_principal_curvatures(n, k, r, dec.phi)?;
    let scale = roots.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    Ok(PointAnalysis {
        charpoly_resid: max_sorted_distance(&sorted, &roots) / scale,
        trace_resid: (trace - log_det_derivative_closed(n, k, r))
            .abs()
            .max((trace - h_closed).abs())
            / h_closed.abs().max(1.0),
        sorted,
        groups,
        trace,
        h_closed,
        det_resid,
    })
}

/// Draws `samples` unit normals from the seeded generator, in draw order.
pub(crate) fn sample_normals(
    sub: &NormalSubspace,
    samples: usize,
    seed: u64,
) -> Result<Vec<(KaehlerDecomposition, AdaptedFrame)>, GeometryError> {
    let mut rng = seeded(seed);
    let xis: Vec<DVector<f64>> = (0..samples).map(|_| sample_unit_normal(sub, &mut rng)).collect();
    xis.par_iter()
        .map(|xi| {
            let dec = decompose(sub, xi.as_slice())?;
            let frame = adapted_frame(sub, &dec)?;
            Ok((dec, frame))
        })
        .collect()
}

/// Number of classes of spectra that agree to `tol` elementwise.
pub(crate) fn distinct_spectra<'a>(spectra: impl IntoIterator<Item = &'a [f64]>, tol: f64) -> usize {
    let mut reps: Vec<&[f64]> = Vec::new();
    for s in spectra {
        if !reps.iter().any(|r| max_sorted_distance(r, s) <= tol) {
            reps.push(s);
        }
    }
    reps.len()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubeRow {
    pub r: Num,
    pub sample: usize,
    pub phi: Num,
    pub eig_values: Vec<Num>,
    pub eig_mults: Vec<usize>,
    pub trace: Num,
    #[serde(rename = "H_closed")]
    pub h_closed: Num,
    pub det_resid: Num,
    pub charpoly_resid: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub command: String,
    pub n: usize,
    pub k: usize,
    pub wperp: String,
    pub radii: Vec<Num>,
    pub samples: usize,
    pub seed: u64,
    pub tol: Num,
    pub orientation: String,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusSummary {
    pub r: Num,
    #[serde(rename = "H_closed")]
    pub h_closed: Num,
    pub dlogdet_closed: Num,
    pub trace_min: Num,
    pub trace_max: Num,
    pub trace_spread: Num,
    pub worst_trace_resid: Num,
    pub distinct_spectra: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    pub homogeneous: bool,
    pub constant_angle: Option<Num>,
    pub classification_notes: Vec<String>,
    pub distinct_spectra: usize,
    pub per_radius: Vec<RadiusSummary>,
    pub max_det_resid: Num,
    pub max_charpoly_resid: Num,
    pub max_trace_resid: Num,
    pub max_trace_spread: Num,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubeReport {
    pub meta: ReportMeta,
    pub rows: Vec<TubeRow>,
    pub summary: ReportSummary,
}

pub fn cmd_analyze(config: &AnalysisConfig, faults: FaultInjection) -> Result<TubeReport, ReportError> {
    tube_report("analyze", config, faults)
}

/// Same rows as [`cmd_analyze`]; the summary carries one entry per radius.
pub fn cmd_sweep(config: &AnalysisConfig, faults: FaultInjection) -> Result<TubeReport, ReportError> {
    tube_report("sweep", config, faults)
}

fn tube_report(command: &str, config: &AnalysisConfig, faults: FaultInjection) -> Result<TubeReport, ReportError> {
    let sub = config.subspace()?;
    let radii = config.sorted_radii()?;
    let samples = sample_normals(&sub, config.samples, config.seed)
        .map_err(|e| ReportError::Numerical(format!("sampling unit normals: {e}")))?;

    let grid: Vec<(usize, usize)> = (0..radii.len())
        .flat_map(|ri| (0..samples.len()).map(move |si| (ri, si)))
        .collect();
    let points: Vec<PointAnalysis> = grid
        .par_iter()
        .map(|&(ri, si)| {
            let (dec, frame) = &samples[si];
            analyze_point(&sub, frame, dec, radii[ri], faults)
                .map_err(|e| ReportError::Numerical(format!("r = {}, sample = {si}: {e}", radii[ri])))
        })
        .collect::<Result<_, _>>()?;

    let tol = config.tol;
    let mut rows = Vec::with_capacity(points.len());
    let mut per_radius = Vec::with_capacity(radii.len());
    let (n, k) = (sub.n(), sub.k());
    for (ri, &r) in radii.iter().enumerate() {
        let block = &points[ri * samples.len()..(ri + 1) * samples.len()];
        for (si, p) in block.iter().enumerate() {
            rows.push(TubeRow {
                r: Num(r),
                sample: si,
                phi: Num(samples[si].0.phi),
                eig_values: p.groups.iter().map(|(v, _)| Num(*v)).collect(),
                eig_mults: p.groups.iter().map(|(_, m)| *m).collect(),
                trace: Num(p.trace),
                h_closed: Num(p.h_closed),
                det_resid: Num(p.det_resid),
                charpoly_resid: Num(p.charpoly_resid),
            });
        }
        let traces = block.iter().map(|p| p.trace);
        let lo = traces.clone().fold(f64::INFINITY, f64::min);
        let hi = traces.fold(f64::NEG_INFINITY, f64::max);
        per_radius.push(RadiusSummary {
            r: Num(r),
            h_closed: Num(mean_curvature_closed(n, k, r)),
            dlogdet_closed: Num(log_det_derivative_closed(n, k, r)),
            trace_min: Num(lo),
            trace_max: Num(hi),
            trace_spread: Num(hi - lo),
            worst_trace_resid: Num(block.iter().map(|p| p.trace_resid).fold(0.0, f64::max)),
            distinct_spectra: distinct_spectra(block.iter().map(|p| p.sorted.as_slice()), tol),
        });
    }

    let worst = |f: fn(&PointAnalysis) -> f64| points.iter().map(f).fold(0.0, f64::max);
    let max_det = worst(|p| p.det_resid);
    let max_cp = worst(|p| p.charpoly_resid);
    let max_tr = worst(|p| p.trace_resid);
    let max_spread = per_radius.iter().map(|s| s.trace_spread.0).fold(0.0, f64::max);
    let classification = classify_tube(&sub);
    let passed = [max_det, max_cp, max_tr, max_spread].iter().all(|v| *v <= tol);

    let mut notes = Vec::new();
    if k == 1 {
        notes.push("k = 1: the characteristic polynomial is taken with the factor (1/(4 lambda) - x) divided out of q".into());
    }
    if k == 2 * n - 2 {
        notes.push("w = 0: multiplicities of the characteristic polynomial are not generic here; reported, not asserted".into());
    }
    notes.push("phi = 0 when sin(phi) < 1e-9, phi = pi/2 when cos(phi) < 1e-9".into());

    Ok(TubeReport {
        meta: ReportMeta {
            command: command.to_string(),
            n,
            k,
            wperp: config.wperp.to_string(),
            radii: nums(&radii),
            samples: samples.len(),
            seed: config.seed,
            tol: Num(tol),
            orientation: ORIENTATION.to_string(),
            notes,
        },
        rows,
        summary: ReportSummary {
            homogeneous: classification.homogeneous,
            constant_angle: classification.constant_angle.map(Num),
            classification_notes: classification.notes,
            distinct_spectra: per_radius.iter().map(|s| s.distinct_spectra).max().unwrap_or(0),
            per_radius,
            max_det_resid: Num(max_det),
            max_charpoly_resid: Num(max_cp),
            max_trace_resid: Num(max_tr),
            max_trace_spread: Num(max_spread),
            passed,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyMeta {
    pub command: String,
    pub n: usize,
    pub k: usize,
    pub wperp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationOut {
    pub homogeneous: bool,
    pub constant_angle: Option<Num>,
    pub angle_spectrum: Vec<Num>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub meta: ClassifyMeta,
    pub classification: ClassificationOut,
}

pub fn cmd_classify(config: &AnalysisConfig) -> Result<ClassifyReport, ReportError> {
    let sub = config.subspace()?;
    let c = classify_tube(&sub);
    Ok(ClassifyReport {
        meta: ClassifyMeta {
            command: "classify".into(),
            n: c.n,
            k: c.k,
            wperp: config.wperp.to_string(),
        },
        classification: ClassificationOut {
            homogeneous: c.homogeneous,
            constant_angle: c.constant_angle.map(Num),
            angle_spectrum: nums(&c.angle_spectrum),
            notes: c.notes,
        },
    })
}
