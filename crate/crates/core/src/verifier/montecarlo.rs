//! Stochastic check of the coherent-state resolution of the identity.
//!
//! `<psi1| (1 - theta^2) ∫ d²alpha d²beta / pi² |alpha,beta><alpha,beta| |psi2>`
//! is sampled with a Gaussian importance density matched to the overlap
//! kernel. In normal-mode amplitudes `u± = (dalpha ± i dbeta)/√2` the
//! kernel is `exp(-(1+theta)|u+|² - (1-theta)|u-|²)`, which normalizes to
//! `(1 - theta^2)/pi²`, so each weight is the integrand times `exp(Q)`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{coherent_overlap, squeezed_overlap, variance_products, ModeAmplitudes, SqueezeParam};
use crate::error::{NcError, Result};
use crate::params::Deformation;

pub const MC_MIN_SAMPLES: usize = 1000;

/// Largest `|estimate - reference| / stderr` counted as agreement.
pub const MC_Z_LIMIT: f64 = 4.0;

/// Bra and ket coherent amplitudes of one matrix element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbePair {
    pub bra: ModeAmplitudes,
    pub ket: ModeAmplitudes,
}

impl ProbePair {
    pub fn new(bra: ModeAmplitudes, ket: ModeAmplitudes) -> Self {
        Self { bra, ket }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McReport {
    pub estimate: Complex64,
    pub reference: Complex64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    /// Index of the probe; also the stream of the generator.
    pub case: usize,
    pub z_score: f64,
    pub passed: bool,
}

/// Draws `(dalpha, dbeta)` from the kernel density and returns it with `Q`.
fn draw(rng: &mut ChaCha8Rng, sd_plus: f64, sd_minus: f64, theta: f64) -> (Complex64, Complex64, f64) {
    let mut n = || rng.sample::<f64, _>(StandardNormal);
    let up = Complex64::new(n() * sd_plus, n() * sd_plus);
    let um = Complex64::new(n() * sd_minus, n() * sd_minus);
    let q = (1.0 + theta) * up.norm_sqr() + (1.0 - theta) * um.norm_sqr();
    let da = (up + um) * FRAC_1_SQRT_2;
    let db = Complex64::new(0.0, -1.0) * (up - um) * FRAC_1_SQRT_2;
    (da, db, q)
}

fn estimate_one(
    d: Deformation,
    probe: &ProbePair,
    z: Option<&SqueezeParam>,
    samples: usize,
    seed: u64,
    case: usize,
) -> McReport {
    let theta = d.theta;
    let sd_plus = (0.5 / (1.0 + theta)).sqrt();
    let sd_minus = (0.5 / (1.0 - theta)).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    let centre = probe.ket;
    let weights: Vec<Complex64> = (0..samples)
        .map(|_| {
            let (da, db, q) = draw(&mut rng, sd_plus, sd_minus, theta);
            let point = ModeAmplitudes {
                alpha: centre.alpha + da,
                beta: centre.beta + db,
            };
            let left = match z {
                Some(z) => squeezed_overlap(d, &probe.bra, &point, z),
                None => coherent_overlap(d, &probe.bra, &point),
            };
            left * coherent_overlap(d, &point, &probe.ket) * q.exp()
        })
        .collect();
    let n = samples as f64;
    let estimate = weights.iter().sum::<Complex64>() / n;
    let spread: f64 = weights.iter().map(|w| (w - estimate).norm_sqr()).sum();
    let stderr = (spread / (n * (n - 1.0))).sqrt();
    let reference = match z {
        Some(z) => squeezed_overlap(d, &probe.bra, &probe.ket, z),
        None => coherent_overlap(d, &probe.bra, &probe.ket),
    };
    let z_score = (estimate - reference).norm() / stderr;
    McReport {
        estimate,
        reference,
        stderr,
        samples,
        seed,
        case,
        z_score,
        passed: z_score <= MC_Z_LIMIT,
    }
}

/// Monte Carlo estimate of `<bra| I |ket>` for each probe, compared with the
/// direct overlap. With `z`, the bra side carries `S(z)` and the reference is
/// the squeezed overlap.
///
/// Probe `k` draws from stream `k` of a generator seeded with `seed`, so the
/// result does not depend on scheduling.
pub fn overcompleteness_mc(
    params: impl Into<Deformation>,
    probes: &[ProbePair],
    samples: usize,
    seed: u64,
    z: Option<&SqueezeParam>,
) -> Result<Vec<McReport>> {
    let d = params.into();
    if d.theta >= 1.0 {
        return Err(NcError::ThetaAtOrAboveOne(d.theta));
    }
    if samples < MC_MIN_SAMPLES {
        return Err(NcError::SamplesTooFew {
            got: samples,
            min: MC_MIN_SAMPLES,
        });
    }
    Ok(probes
        .par_iter()
        .enumerate()
        .map(|(k, probe)| estimate_one(d, probe, z, samples, seed, k))
        .collect())
}

/// A point where the single-mode product drops below `hbar^2/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintWitness {
    pub r: f64,
    pub phi: f64,
    pub product: f64,
    pub bound: f64,
    pub violated: bool,
}

/// Evaluates `dx2 * dpx2` at `(r, pi/2)`. Above saturation any `r > 0` gives
/// a violation.
pub fn constraint_witness(params: impl Into<Deformation>, r: f64) -> Result<ConstraintWitness> {
    let d = params.into();
    let z = SqueezeParam::new(r, FRAC_PI_2)?;
    let product = variance_products(d, &z).prod_xpx;
    let bound = 0.25 * d.hbar * d.hbar;
    Ok(ConstraintWitness {
        r,
        phi: FRAC_PI_2,
        product,
        bound,
        violated: product < bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn amps(a: Complex64, b: Complex64) -> ModeAmplitudes {
        ModeAmplitudes::new(a, b).unwrap()
    }

    fn deformation(theta: f64) -> Deformation {
        Deformation::new(1.0, 1.0, theta).unwrap()
    }

    #[test]
    fn draws_have_the_kernel_covariance() {
        let theta = 0.6;
        let (sp, sm) = ((0.5 / 1.6f64).sqrt(), (0.5 / 0.4f64).sqrt());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mut q_mean = 0.0;
        let mut a2 = 0.0;
        for _ in 0..n {
            let (da, _, q) = draw(&mut rng, sp, sm, theta);
            q_mean += q;
            a2 += da.norm_sqr();
        }
        // Q is a sum of two chi-square(2)/2 variables.
        assert!((q_mean / n as f64 - 2.0).abs() < 0.02);
        // E|dalpha|^2 = (1/(1+theta) + 1/(1-theta))/2.
        let expected = 0.5 * (1.0 / 1.6 + 1.0 / 0.4);
        assert!((a2 / n as f64 - expected).abs() < 0.02 * expected);
    }

    #[test]
    fn vacuum_resolves_to_one() {
        let probes = [ProbePair::new(ModeAmplitudes::vacuum(), ModeAmplitudes::vacuum())];
        let r = overcompleteness_mc(deformation(0.5), &probes, 100_000, 42, None).unwrap();
        assert!(r[0].passed, "{r:?}");
        assert_eq!(r[0].reference, c(1.0, 0.0));
        assert!((r[0].estimate - 1.0).norm() < 0.05);
    }

    #[test]
    fn commutative_limit_still_runs() {
        let probes = [ProbePair::new(amps(c(0.2, 0.1), c(0.0, 0.0)), amps(c(0.0, 0.3), c(0.5, 0.0)))];
        let r = overcompleteness_mc(deformation(0.0), &probes, 50_000, 1, None).unwrap();
        assert!(r[0].passed, "{r:?}");
    }

    #[test]
    fn distinct_probes_match_overlap() {
        let p = make_params(0.5, 0.5, 1.0).unwrap();
        let probes = [ProbePair::new(amps(c(1.0, 0.0), c(0.0, 0.0)), amps(c(0.0, 0.0), c(1.0, 0.0)))];
        let r = overcompleteness_mc(p, &probes, 100_000, 42, None).unwrap();
        assert!(r[0].passed, "{r:?}");
        assert_eq!(r[0].reference, coherent_overlap(p, &probes[0].bra, &probes[0].ket));
    }

    #[test]
    fn squeezed_probes() {
        let probes = [ProbePair::new(amps(c(0.3, 0.0), c(0.0, -0.2)), amps(c(0.1, 0.1), c(0.2, 0.0)))];
        let z = SqueezeParam::new(0.3, 0.4).unwrap();
        let r = overcompleteness_mc(deformation(0.3), &probes, 100_000, 7, Some(&z)).unwrap();
        assert!(r[0].passed, "{r:?}");
    }

    #[test]
    fn deterministic_and_order_free() {
        let probes = [
            ProbePair::new(ModeAmplitudes::vacuum(), ModeAmplitudes::vacuum()),
            ProbePair::new(amps(c(0.5, 0.0), c(0.0, 0.0)), amps(c(0.0, 0.0), c(0.0, 0.5))),
        ];
        let a = overcompleteness_mc(deformation(0.3), &probes, 2000, 9, None).unwrap();
        let b = overcompleteness_mc(deformation(0.3), &probes, 2000, 9, None).unwrap();
        assert_eq!(a, b);
        let single = overcompleteness_mc(deformation(0.3), &probes[..1], 2000, 9, None).unwrap();
        assert_eq!(single[0], a[0]);
    }

    #[test]
    fn rejects_bad_input() {
        let probes = [ProbePair::new(ModeAmplitudes::vacuum(), ModeAmplitudes::vacuum())];
        assert_eq!(
            overcompleteness_mc(deformation(1.0), &probes, 5000, 0, None),
            Err(NcError::ThetaAtOrAboveOne(1.0))
        );
        assert_eq!(
            overcompleteness_mc(deformation(0.5), &probes, 999, 0, None),
            Err(NcError::SamplesTooFew { got: 999, min: 1000 })
        );
    }

    #[test]
    fn witness_only_above_saturation() {
        let sub = make_params(0.5, 0.5, 1.0).unwrap();
        assert!(!constraint_witness(sub, 0.3).unwrap().violated);
        let sup = make_params(2.0, 2.0, 1.0).unwrap();
        let w = constraint_witness(sup, 0.3).unwrap();
        assert!(w.violated && w.product < w.bound);
    }
}
