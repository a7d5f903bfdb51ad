//! Benchmark fixtures.

use ncsq_core::fock::{operator_set, FockSpace, OperatorSet};
use ncsq_core::verifier::ProbePair;
use ncsq_core::{make_params, ModeAmplitudes, NcParams, SqueezeParam};
use num_complex::Complex64;

pub fn params(theta: f64) -> NcParams {
    make_params(theta * 1.25, theta / 1.25, 1.0).expect("positive parameters")
}

pub fn amps() -> ModeAmplitudes {
    ModeAmplitudes::new(Complex64::new(0.6, -0.2), Complex64::new(-0.3, 0.5)).expect("finite amplitudes")
}

pub fn bra() -> ModeAmplitudes {
    ModeAmplitudes::new(Complex64::new(0.4, 0.1), Complex64::new(0.0, -0.7)).expect("finite amplitudes")
}

pub fn squeeze() -> SqueezeParam {
    SqueezeParam::new(0.3, 0.7).expect("valid squeeze")
}

pub fn operators(theta: f64, cutoff: usize) -> OperatorSet {
    operator_set(&params(theta), FockSpace::new(cutoff).expect("cutoff in range")).expect("subcritical")
}

pub fn probes() -> Vec<ProbePair> {
    vec![ProbePair::new(bra(), amps()), ProbePair::new(amps(), amps())]
}
