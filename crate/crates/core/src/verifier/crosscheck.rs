use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{CheckMeta, ResidualReport, CROSSCHECK_TOLERANCE};
use crate::analytic::{single_mode_report, squeezed_overlap, ModeAmplitudes, SqueezeParam};
use crate::error::Result;
use crate::fock::{
    expectation_and_variance, inner_product, make_state_adaptive, operator_set, FockSpace, OperatorSet,
    StateVector, SAFE_BUFFER,
};
use crate::params::NcParams;

/// Drift allowed in oracle variances when only the amplitudes change.
const DRIFT_TOLERANCE: f64 = 1e-8;

/// One crosscheck input: the state `|alpha, beta; z>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCase {
    pub amps: ModeAmplitudes,
    pub z: SqueezeParam,
}

impl CrossCase {
    pub fn new(amps: ModeAmplitudes, z: SqueezeParam) -> Self {
        Self { amps, z }
    }
}

pub(crate) const VARIANCE_NAMES: [&str; 6] = ["x", "y", "px", "py", "X", "P"];

pub(crate) fn relative(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}

pub(crate) fn relative_c(value: Complex64, reference: Complex64) -> f64 {
    (value - reference).norm() / reference.norm().max(f64::MIN_POSITIVE)
}

/// Oracle variances of `x, y, p_x, p_y, X, P`.
pub(crate) fn oracle_variances(ops: &OperatorSet, state: &StateVector) -> Result<[f64; 6]> {
    let (xx, pp) = ops.two_mode_quadratures();
    let list = [&ops.x, &ops.y, &ops.px, &ops.py, &xx, &pp];
    let mut out = [0.0; 6];
    for (slot, op) in out.iter_mut().zip(list) {
        *slot = expectation_and_variance(state, op)?.1;
    }
    Ok(out)
}

fn analytic_variances(params: &NcParams, z: &SqueezeParam) -> [f64; 6] {
    let v = single_mode_report(params, Some(z));
    [v.dx2, v.dy2, v.dpx2, v.dpy2, v.dX2, v.dP2]
}

/// The coherent bras a case is projected on: the vacuum, its own
/// amplitudes, and the amplitudes with the modes exchanged.
pub(crate) fn probe_bras(amps: &ModeAmplitudes) -> [(&'static str, ModeAmplitudes); 3] {
    [
        ("vacuum", ModeAmplitudes::vacuum()),
        ("self", *amps),
        (
            "mirror",
            ModeAmplitudes {
                alpha: amps.beta,
                beta: amps.alpha,
            },
        ),
    ]
}

fn case_reports(ops: &OperatorSet, state: &StateVector, case: &CrossCase, meta: CheckMeta) -> Result<Vec<ResidualReport>> {
    let params = &ops.params;
    let mut out = Vec::with_capacity(9);
    for (name, bra) in probe_bras(&case.amps) {
        let bra_state = ops.state(&bra, None)?;
        let oracle = inner_product(&bra_state, state)?;
        let analytic = squeezed_overlap(params, &bra, &case.amps, &case.z);
        out.push(ResidualReport::new(
            format!("overlap_{name}"),
            relative_c(oracle, analytic),
            CROSSCHECK_TOLERANCE,
            meta.clone(),
        ));
    }
    let oracle = oracle_variances(ops, state)?;
    let analytic = analytic_variances(params, &case.z);
    for ((name, o), a) in VARIANCE_NAMES.iter().zip(oracle).zip(analytic) {
        out.push(ResidualReport::new(
            format!("variance_{name}"),
            relative(o, a),
            CROSSCHECK_TOLERANCE,
            meta.clone(),
        ));
    }
    Ok(out)
}

/// Oracle overlaps and variances against the closed forms, nine reports
/// per case, in case order. Cases run in parallel.
pub fn crosscheck_suite(params: &NcParams, space: FockSpace, cases: &[CrossCase]) -> Result<Vec<ResidualReport>> {
    let ops = operator_set(params, space)?;
    let per_case = cases
        .par_iter()
        .enumerate()
        .map(|(k, case)| {
            let state = ops.state(&case.amps, Some(&case.z))?;
            let meta = CheckMeta::new(params).with_space(space, SAFE_BUFFER).with_case(k);
            case_reports(&ops, &state, case, meta)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_case.into_iter().flatten().collect())
}

/// [`crosscheck_suite`] with the cutoff chosen per case, raising it in steps
/// of 10 from `start` until the state passes the population guard.
pub fn crosscheck_adaptive(
    params: &NcParams,
    cases: &[CrossCase],
    start: usize,
    max_cutoff: usize,
) -> Result<Vec<ResidualReport>> {
    let per_case = cases
        .par_iter()
        .enumerate()
        .map(|(k, case)| {
            let (ops, state) = make_state_adaptive(params, &case.amps, Some(&case.z), start, max_cutoff)?;
            let meta = CheckMeta::new(params).with_space(ops.space, SAFE_BUFFER).with_case(k);
            case_reports(&ops, &state, case, meta)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_case.into_iter().flatten().collect())
}

/// Largest relative change of any oracle variance across `amplitudes` at
/// fixed `z`, measured against the first entry.
pub fn amplitude_independence(
    params: &NcParams,
    space: FockSpace,
    z: &SqueezeParam,
    amplitudes: &[ModeAmplitudes],
) -> Result<ResidualReport> {
    let ops = operator_set(params, space)?;
    let all = amplitudes
        .par_iter()
        .map(|amps| oracle_variances(&ops, &ops.state(amps, Some(z))?))
        .collect::<Result<Vec<_>>>()?;
    let drift = match all.split_first() {
        Some((first, rest)) => rest
            .iter()
            .flat_map(|v| v.iter().zip(first).map(|(a, b)| relative(*a, *b)))
            .fold(0.0, f64::max),
        None => 0.0,
    };
    let meta = CheckMeta::new(params).with_space(space, SAFE_BUFFER);
    Ok(ResidualReport::new("amplitude_independence", drift, DRIFT_TOLERANCE, meta))
}
