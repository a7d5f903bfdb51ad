use num_complex::Complex64;

use super::crosscheck::{oracle_variances, probe_bras, relative, relative_c, VARIANCE_NAMES};
use super::{CheckMeta, ResidualReport};
use crate::analytic::{ModeAmplitudes, SqueezeParam};
use crate::error::{NcError, Result};
use crate::fock::{build_state, inner_product, operator_set, FockSpace, SAFE_BUFFER};
use crate::params::NcParams;

/// Step differences below this count as converged to rounding.
pub const CONVERGENCE_FLOOR: f64 = 1e-14;

const FINAL_TOLERANCE: f64 = 1e-8;

struct Tracked {
    variances: [f64; 6],
    overlaps: Vec<Complex64>,
}

fn track(params: &NcParams, cutoff: usize, amps: &ModeAmplitudes, z: Option<&SqueezeParam>) -> Result<Tracked> {
    let ops = operator_set(params, FockSpace::new(cutoff)?)?;
    let state = build_state(&ops, amps, z)?;
    let overlaps = probe_bras(amps)
        .iter()
        .map(|(_, bra)| inner_product(&build_state(&ops, bra, None)?, &state))
        .collect::<Result<Vec<_>>>()?;
    Ok(Tracked {
        variances: oracle_variances(&ops, &state)?,
        overlaps,
    })
}

fn differences(new: &Tracked, old: &Tracked) -> Vec<f64> {
    let v = new.variances.iter().zip(&old.variances).map(|(a, b)| relative(*a, *b));
    let o = new.overlaps.iter().zip(&old.overlaps).map(|(a, b)| relative_c(*a, *b));
    v.chain(o).collect()
}

/// Follows oracle variances and overlaps across increasing cutoffs.
///
/// Emits one `convergence_step` report per consecutive pair of cutoffs, with
/// the largest relative change as residual and the previous step's change
/// as tolerance, so a pass means the changes shrink. Then one
/// `convergence_final:<quantity>` report per quantity for the last step,
/// held to `1e-8`. States are built without the population guard so small
/// cutoffs can be probed.
pub fn convergence_probe(
    params: &NcParams,
    amps: &ModeAmplitudes,
    z: Option<&SqueezeParam>,
    cutoffs: &[usize],
) -> Result<Vec<ResidualReport>> {
    if cutoffs.len() < 2 || cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NcError::CutoffsNotIncreasing);
    }
    let tracked = cutoffs
        .iter()
        .map(|&n| track(params, n, amps, z))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    let mut previous = 1.0f64;
    let mut last = Vec::new();
    for (k, pair) in tracked.windows(2).enumerate() {
        let diffs = differences(&pair[1], &pair[0]);
        let worst = diffs.iter().copied().fold(0.0, f64::max);
        let space = FockSpace::new(cutoffs[k + 1])?;
        let meta = CheckMeta::new(params).with_space(space, SAFE_BUFFER);
        out.push(ResidualReport::new(
            "convergence_step",
            worst,
            previous.max(CONVERGENCE_FLOOR),
            meta,
        ));
        previous = worst;
        last = diffs;
    }
    let space = FockSpace::new(*cutoffs.last().expect("at least two cutoffs"))?;
    let names = VARIANCE_NAMES
        .iter()
        .map(|n| format!("variance_{n}"))
        .chain(probe_bras(amps).into_iter().map(|(n, _)| format!("overlap_{n}")));
    for (name, diff) in names.zip(last) {
        let meta = CheckMeta::new(params).with_space(space, SAFE_BUFFER);
        out.push(ResidualReport::new(
            format!("convergence_final:{name}"),
            diff,
            FINAL_TOLERANCE,
            meta,
        ));
    }
    Ok(out)
}
