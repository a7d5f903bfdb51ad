use ncsq_core::analytic::{
    bogoliubov_coefficients, coherent_overlap, heisenberg_report, oscillator_consistency, single_mode_report,
    squeezed_overlap, two_mode_report, variance_products, BogoliubovCoeffs, HeisenbergReport, VarianceReport,
};
use ncsq_core::fock::{inner_product, operator_set, FockSpace, MAX_CUTOFF};
use ncsq_core::verifier::{
    all_passed, constraint_witness, crosscheck_adaptive, fit_bogoliubov, identity_suite_buffered,
    overcompleteness_mc, CrossCase,
};
use ncsq_core::{ConstraintClass, Deformation, NcError, SqueezeParam};
use num_complex::Complex64;
use serde::Serialize;

use crate::args::{
    BogoliubovCmd, CheckCmd, OscillatorCmd, OverlapCmd, OvercompletenessCmd, ParamsCmd, SweepCmd, VarianceCmd,
};
use crate::output::Emission;
use crate::sweep::{base_from, sweep, SweepSpec};
use crate::CliError;

/// Squeeze magnitude used for the constraint witness when none is given.
const WITNESS_R: f64 = 0.5;

#[derive(Debug, Clone, Serialize)]
struct ParamsRow {
    mu: f64,
    nu: f64,
    hbar: f64,
    theta: f64,
    constraint_ratio: f64,
    aspect: f64,
    class: ConstraintClass,
    kappa: Option<f64>,
    lambda_denom: Option<f64>,
}

pub fn params(cmd: &ParamsCmd) -> Result<Emission, CliError> {
    let p = cmd.params.params()?;
    let mut e = Emission::new("params", cmd)?;
    e.push(&ParamsRow {
        mu: p.mu(),
        nu: p.nu(),
        hbar: p.hbar(),
        theta: p.theta(),
        constraint_ratio: p.constraint_ratio(),
        aspect: p.aspect(),
        class: p.class(),
        kappa: p.kappa(),
        lambda_denom: p.lambda_denom(),
    })?;
    Ok(e)
}

/// Every closed-form variance quantity of one state, flattened into one row.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VarianceRow {
    pub theta: f64,
    #[serde(flatten)]
    pub report: VarianceReport,
    pub min_xpx: f64,
    pub min_xy: f64,
    pub min_pxpy: f64,
    pub min_XP: f64,
    pub bounds: HeisenbergReport,
    pub bounds_satisfied: bool,
}

impl VarianceRow {
    pub fn new(d: Deformation, z: &SqueezeParam) -> Self {
        let minima = variance_products(d, z);
        let bounds = heisenberg_report(d, Some(z));
        Self {
            theta: d.theta,
            report: single_mode_report(d, Some(z)),
            min_xpx: minima.min_xpx,
            min_xy: minima.min_xy,
            min_pxpy: minima.min_pxpy,
            min_XP: two_mode_report(d, z).min_XP,
            bounds,
            bounds_satisfied: bounds.all_satisfied(),
        }
    }
}

pub fn variance(cmd: &VarianceCmd) -> Result<Emission, CliError> {
    let p = cmd.params.params()?;
    let z = cmd.squeeze.squeeze()?;
    let mut e = Emission::new("variance", cmd)?;
    e.push(&VarianceRow::new(p.deformation(), &z))?;
    Ok(e)
}

#[derive(Debug, Clone, Serialize)]
struct OverlapRow {
    overlap: Complex64,
    modulus: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_residual: Option<f64>,
}

pub fn overlap(cmd: &OverlapCmd) -> Result<Emission, CliError> {
    let p = cmd.params.params()?;
    let z = cmd.squeeze.squeeze()?;
    let (bra, ket) = (cmd.bra.amps()?, cmd.ket.amps()?);
    let value = if z.is_zero() {
        coherent_overlap(p, &bra, &ket)
    } else {
        squeezed_overlap(p, &bra, &ket, &z)
    };
    let oracle = match cmd.cutoff {
        Some(n) => {
            let ops = operator_set(&p, FockSpace::new(n)?)?;
            let b = ops.state(&bra, None)?;
            let k = ops.state(&ket, Some(&z))?;
            Some(inner_product(&b, &k)?)
        }
        None => None,
    };
    let mut e = Emission::new("overlap", cmd)?;
    e.push(&OverlapRow {
        overlap: value,
        modulus: value.norm(),
        oracle,
        relative_residual: oracle.map(|o| (o - value).norm() / value.norm()),
    })?;
    Ok(e)
}

#[derive(Debug, Clone, Serialize)]
struct BogoliubovRow {
    closed_form: BogoliubovCoeffs,
    #[serde(skip_serializing_if = "Option::is_none")]
    fitted: Option<BogoliubovCoeffs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closure_residual: Option<f64>,
}

pub fn bogoliubov(cmd: &BogoliubovCmd) -> Result<Emission, CliError> {
    let p = cmd.params.params()?;
    let z = cmd.squeeze.squeeze()?;
    let closed_form = bogoliubov_coefficients(p, &z);
    let mut row = BogoliubovRow {
        closed_form,
        fitted: None,
        residual: None,
        closure_residual: None,
    };
    if let Some(n) = cmd.cutoff {
        let space = FockSpace::new(n)?;
        if cmd.buffer > n {
            return Err(NcError::BufferTooLarge { buffer: cmd.buffer, cutoff: n }.into());
        }
        let fit = fit_bogoliubov(&operator_set(&p, space)?, &z, cmd.buffer)?;
        row.residual = Some(fit.coeffs.max_abs_diff(&closed_form));
        row.closure_residual = Some(fit.closure_residual);
        row.fitted = Some(fit.coeffs);
    }
    let mut e = Emission::new("bogoliubov", cmd)?;
    e.push(&row)?;
    Ok(e)
}

#[derive(Debug, Clone, Serialize)]
struct RefusalRow {
    check: &'static str,
    class: ConstraintClass,
    reason: String,
    bounds: HeisenbergReport,
    witness: ncsq_core::verifier::ConstraintWitness,
}

/// Identity suite at the requested cutoff plus oracle crosschecks, whose
/// cutoff is raised from the requested one until the state passes the
/// population guard. Saturated and super-critical sets are refused with the
/// analytic bounds and a constraint witness; exit status 1.
pub fn check(cmd: &CheckCmd) -> Result<Emission, CliError> {
    let p = cmd.params.params()?;
    let z = cmd.squeeze.squeeze()?;
    let amps = cmd.ket.amps()?;
    let space = cmd.space.space()?;
    let mut e = Emission::new("check", cmd)?;
    e.echo("theta", &p.theta())?;
    match identity_suite_buffered(&p, space, cmd.space.buffer, &amps, &z) {
        Ok(reports) => {
            let cross = crosscheck_adaptive(&p, &[CrossCase::new(amps, z)], space.cutoff(), MAX_CUTOFF)?;
            let all: Vec<_> = reports.into_iter().chain(cross).collect();
            e.failed = !all_passed(&all);
            for r in &all {
                e.push(r)?;
            }
            Ok(e)
        }
        Err(err @ NcError::SaturatedOrSuperCritical { .. }) => {
            let r = if z.r() > 0.0 { z.r() } else { WITNESS_R };
            let row = RefusalRow {
                check: "constraint",
                class: p.class(),
                reason: err.to_string(),
                bounds: heisenberg_report(p, Some(&SqueezeParam::new(r, std::f64::consts::FRAC_PI_2)?)),
                witness: constraint_witness(p, r)?,
            };
            e.notes.push(format!("check refused: {err}"));
            if row.witness.violated {
                e.notes.push(format!(
                    "at r = {r}, phi = pi/2 the product dx2*dpx2 = {:.6e} is below hbar^2/4 = {:.6e}",
                    row.witness.product, row.witness.bound
                ));
            }
            e.push(&row)?;
            e.failed = true;
            Ok(e)
        }
        Err(err) => Err(err.into()),
    }
}

pub fn overcompleteness(cmd: &OvercompletenessCmd) -> Result<Emission, CliError> {
    let p = cmd.params.params()?;
    let z = cmd.squeeze.squeeze()?;
    let probe = cmd.probe()?;
    let zref = (!z.is_zero()).then_some(&z);
    let reports = overcompleteness_mc(p, &[probe], cmd.samples, cmd.seed, zref)?;
    let mut e = Emission::new("overcompleteness", cmd)?.with_seed(cmd.seed);
    e.failed = reports.iter().any(|r| !r.passed);
    for r in &reports {
        e.push(r)?;
    }
    Ok(e)
}

pub fn sweep_cmd(cmd: &SweepCmd) -> Result<Emission, CliError> {
    let values = cmd.params.values();
    // Validates the fixed parameters even when the swept one replaces them.
    cmd.params.params()?;
    cmd.squeeze.squeeze()?;
    let spec = SweepSpec::new(cmd.var, cmd.start, cmd.stop, cmd.step)?;
    let base = base_from(values, (cmd.squeeze.r, cmd.squeeze.phi), cmd.theta);
    let rows = sweep(&spec, &base, &cmd.quantity)?;
    let mut e = Emission::new("sweep", cmd)?;
    e.echo("points", &spec.len())?;
    for r in &rows {
        e.push(r)?;
    }
    Ok(e)
}

pub fn oscillator(cmd: &OscillatorCmd) -> Result<Emission, CliError> {
    let p = cmd.params.params()?;
    let osc = cmd.oscillator()?;
    let mut e = Emission::new("oscillator", cmd)?;
    e.push(&oscillator_consistency(&osc, &p))?;
    Ok(e)
}
