use ncsq_core::{Deformation, SqueezeParam};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::SweepVar;
use crate::commands::VarianceRow;
use crate::CliError;

pub const MAX_GRID_POINTS: usize = 10_000_000;

/// A one-variable grid `start, start + step, ...` up to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepSpec {
    pub fn new(variable: SweepVar, start: f64, stop: f64, step: f64) -> Result<Self, CliError> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(CliError::Usage("sweep bounds and step must be finite".into()));
        }
        if step <= 0.0 {
            return Err(CliError::Usage(format!("sweep step must be > 0, got {step}")));
        }
        if start > stop {
            return Err(CliError::Usage(format!("sweep start {start} exceeds stop {stop}")));
        }
        let spec = Self {
            variable,
            start,
            stop,
            step,
        };
        let points = spec.points_f64();
        if points > MAX_GRID_POINTS as f64 {
            return Err(CliError::GridTooLarge(points));
        }
        Ok(spec)
    }

    fn points_f64(&self) -> f64 {
        // Relative slack keeps `stop` on the grid despite rounding in the ratio.
        ((self.stop - self.start) / self.step * (1.0 + 1e-12)).floor() + 1.0
    }

    pub fn len(&self) -> usize {
        self.points_f64() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, index: usize) -> f64 {
        self.start + index as f64 * self.step
    }
}

/// Fixed parameters of a sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepBase {
    pub mu: f64,
    pub nu: f64,
    pub hbar: f64,
    pub r: f64,
    pub phi: f64,
    /// Overrides `sqrt(mu nu)/hbar`.
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub variable: SweepVar,
    pub x: f64,
    pub theta: f64,
    pub r: f64,
    pub phi: f64,
    pub quantity: String,
    pub value: f64,
    pub gain_x: f64,
    pub gain_px: f64,
    /// `gain_x < 1`.
    pub squeezed_x: bool,
    /// `gain_px < 1`.
    pub squeezed_px: bool,
}

fn point(base: &SweepBase, var: SweepVar, x: f64) -> Result<(Deformation, SqueezeParam), CliError> {
    let mut b = *base;
    let theta_override = match var {
        SweepVar::R => {
            b.r = x;
            None
        }
        SweepVar::Phi => {
            b.phi = x;
            None
        }
        SweepVar::Mu => {
            b.mu = x;
            None
        }
        SweepVar::Nu => {
            b.nu = x;
            None
        }
        SweepVar::Theta => Some(x),
    }
    .or(b.theta);
    let z = SqueezeParam::new(b.r, b.phi)?;
    let d = match theta_override {
        // mu/nu and hbar stay fixed, so theta = 0 is reachable.
        Some(theta) => Deformation::new(b.hbar, (b.mu / b.nu).sqrt(), theta)?,
        None => Deformation::from(ncsq_core::make_params(b.mu, b.nu, b.hbar)?),
    };
    Ok((d, z))
}

fn field(row: &serde_json::Value, name: &str) -> Option<f64> {
    row.get(name).and_then(serde_json::Value::as_f64)
}

/// Evaluates `quantity` at every grid point, in grid order.
pub fn sweep(spec: &SweepSpec, base: &SweepBase, quantity: &str) -> Result<Vec<SweepRow>, CliError> {
    if base.theta.is_some() && matches!(spec.variable, SweepVar::Mu | SweepVar::Nu) {
        return Err(CliError::Usage("--theta cannot be fixed while sweeping mu or nu".into()));
    }
    let probe = serde_json::to_value(VarianceRow::new(Deformation::new(1.0, 1.0, 0.5)?, &SqueezeParam::zero()))?;
    if field(&probe, quantity).is_none() {
        return Err(CliError::Usage(format!("unknown sweep quantity `{quantity}`")));
    }
    (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let x = spec.value(i);
            let (d, z) = point(base, spec.variable, x)?;
            let row = VarianceRow::new(d, &z);
            let value = field(&serde_json::to_value(row)?, quantity).unwrap_or(f64::NAN);
            Ok(SweepRow {
                index: i,
                variable: spec.variable,
                x,
                theta: d.theta,
                r: z.r(),
                phi: z.phi(),
                quantity: quantity.to_owned(),
                value,
                gain_x: row.report.gain_x,
                gain_px: row.report.gain_px,
                squeezed_x: row.report.gain_x < 1.0,
                squeezed_px: row.report.gain_px < 1.0,
            })
        })
        .collect()
}

/// Base values taken from already validated parameters.
pub fn base_from(params: (f64, f64, f64), z: (f64, f64), theta: Option<f64>) -> SweepBase {
    SweepBase {
        mu: params.0,
        nu: params.1,
        hbar: params.2,
        r: z.0,
        phi: z.1,
        theta,
    }
}
