use num_complex::Complex64;

use super::{ModeAmplitudes, SqueezeParam, I};
use crate::params::Deformation;

fn norm2(a: &ModeAmplitudes) -> f64 {
    a.alpha.norm_sqr() + a.beta.norm_sqr()
}

/// `<alpha', beta' | alpha, beta>` between normalized deformed coherent states.
///
/// `bra` holds `(alpha', beta')` and `ket` holds `(alpha, beta)`. The exponent
/// is assembled from terms that are exactly symmetric or antisymmetric under
/// exchanging bra and ket, so swapping them conjugates the result bit for bit.
pub fn coherent_overlap(params: impl Into<Deformation>, bra: &ModeAmplitudes, ket: &ModeAmplitudes) -> Complex64 {
    let theta = params.into().theta;
    let (a, b) = (ket.alpha, ket.beta);
    let (ap, bp) = (bra.alpha, bra.beta);
    // Re and Im of alpha'^* alpha and beta'^* beta.
    let re_aa = ap.re * a.re + ap.im * a.im;
    let re_bb = bp.re * b.re + bp.im * b.im;
    let im_aa = ap.re * a.im - ap.im * a.re;
    let im_bb = bp.re * b.im - bp.im * b.re;
    // Im(beta^* alpha) of each state: the self-terms of the theta phase.
    let own = (b.re * a.im - b.im * a.re) + (bp.re * ap.im - bp.im * ap.re);
    // alpha'^* beta - beta'^* alpha, split into real and imaginary parts.
    let mix_im = (ap.re * b.im + a.re * bp.im) - (ap.im * b.re + a.im * bp.re);
    let mix_re = (ap.re * b.re + ap.im * b.im) - (bp.re * a.re + bp.im * a.im);
    let re = -0.5 * (norm2(ket) + norm2(bra)) + (re_aa + re_bb) - theta * own - theta * mix_im;
    let im = (im_aa + im_bb) + theta * mix_re;
    Complex64::new(re, im).exp()
}

/// `<alpha', beta' | alpha, beta; z>`: the squeezed state `S(z)|alpha, beta>`
/// in the coherent-state representation.
///
/// `bra` holds the coherent label `(alpha', beta')`. At `r == 0` this is
/// exactly [`coherent_overlap`].
pub fn squeezed_overlap(
    params: impl Into<Deformation>,
    bra: &ModeAmplitudes,
    ket: &ModeAmplitudes,
    z: &SqueezeParam,
) -> Complex64 {
    let d = params.into();
    if z.is_zero() {
        return coherent_overlap(d, bra, ket);
    }
    let theta = d.theta;
    let (rp, rm) = (z.r() * (1.0 + theta), z.r() * (1.0 - theta));
    let (chp, chm) = (rp.cosh(), rm.cosh());
    let (thp, thm) = (rp.tanh(), rm.tanh());
    let prefactor = 1.0 / (chp * chm).sqrt();

    let (a, b) = (ket.alpha, ket.beta);
    let (ap, bp) = (bra.alpha.conj(), bra.beta.conj());
    let gauss = -0.5
        * (norm2(ket) + norm2(bra)
            + I * theta * (a.conj() * b - b.conj() * a + ap * bra.beta - bp * bra.alpha));
    let cross = (1.0 + theta) * (ap * a + bp * b + I * ap * b - I * bp * a) / (2.0 * chp)
        + (1.0 - theta) * (ap * a + bp * b - I * ap * b + I * bp * a) / (2.0 * chm);
    let ket_phase = Complex64::from_polar(1.0, -z.phi());
    let bra_phase = Complex64::from_polar(1.0, z.phi());
    let ket_sq = (1.0 + theta) / 4.0 * thp * (a + I * b).powi(2) - (1.0 - theta) / 4.0 * thm * (a - I * b).powi(2);
    let bra_sq = (1.0 + theta) / 4.0 * thp * (ap - I * bp).powi(2) - (1.0 - theta) / 4.0 * thm * (ap + I * bp).powi(2);
    let squeeze = -I * ket_phase * ket_sq - I * bra_phase * bra_sq;
    prefactor * (gauss + cross + squeeze).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn d(theta: f64) -> Deformation {
        Deformation::new(1.0, 1.0, theta).unwrap()
    }

    fn amps(a: Complex64, b: Complex64) -> ModeAmplitudes {
        ModeAmplitudes::new(a, b).unwrap()
    }

    #[test]
    fn coherent_normalization() {
        let k = amps(c(0.7, -0.2), c(-0.4, 1.3));
        let o = coherent_overlap(d(0.6), &k, &k);
        assert!((o - 1.0).norm() < 1e-15);
    }

    #[test]
    fn coherent_vacuum_projection() {
        // |<0,0|alpha,beta>|^2 = exp(-(|alpha|^2 + |beta|^2)) regardless of theta.
        let k = amps(c(1.0, 0.0), c(0.0, 0.0));
        let o = coherent_overlap(d(0.5), &ModeAmplitudes::vacuum(), &k);
        assert!((o.norm_sqr() - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn coherent_commutative_limit_factorizes() {
        let (a, b) = (c(0.3, 0.4), c(-0.5, 0.1));
        let (ap, bp) = (c(-0.2, 0.6), c(0.9, -0.3));
        let one_mode = |x: Complex64, y: Complex64| (-0.5 * (x.norm_sqr() + y.norm_sqr()) + y.conj() * x).exp();
        let expect = one_mode(a, ap) * one_mode(b, bp);
        let got = coherent_overlap(d(0.0), &amps(ap, bp), &amps(a, b));
        assert!((got - expect).norm() < 1e-15);
    }

    #[test]
    fn squeezed_matches_coherent_at_zero_squeeze() {
        let bra = amps(c(0.2, 0.1), c(-0.3, 0.5));
        let ket = amps(c(-0.6, 0.2), c(0.4, 0.4));
        let z = SqueezeParam::new(0.0, 1.0).unwrap();
        assert_eq!(squeezed_overlap(d(0.4), &bra, &ket, &z), coherent_overlap(d(0.4), &bra, &ket));
    }

    #[test]
    fn squeezed_vacuum_amplitude() {
        let v = ModeAmplitudes::vacuum();
        for r in [0.1, 0.5, 1.3] {
            let z = SqueezeParam::new(r, PI / 3.0).unwrap();
            let o = squeezed_overlap(d(0.0), &v, &v, &z);
            assert!((o - 1.0 / r.cosh()).norm() < 1e-15);
        }
        // For theta > 0 the vacuum amplitude is the product of the two
        // normal-mode single-mode amplitudes.
        let z = SqueezeParam::new(0.3, PI / 4.0).unwrap();
        let o = squeezed_overlap(d(0.5), &v, &v, &z);
        let expect = 1.0 / ((0.3f64 * 1.5).cosh() * (0.3f64 * 0.5).cosh()).sqrt();
        assert!((o - expect).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn coherent_overlap_is_bounded_and_hermitian(
            theta in 0.0f64..0.99,
            ar in -2.0f64..2.0, ai in -2.0f64..2.0, br in -2.0f64..2.0, bi in -2.0f64..2.0,
            cr in -2.0f64..2.0, ci in -2.0f64..2.0, dr in -2.0f64..2.0, di in -2.0f64..2.0,
        ) {
            let k = amps(c(ar, ai), c(br, bi));
            let b = amps(c(cr, ci), c(dr, di));
            let o = coherent_overlap(d(theta), &b, &k);
            let oc = coherent_overlap(d(theta), &k, &b);
            prop_assert!(o.norm() <= 1.0 + 1e-12);
            prop_assert!((o - oc.conj()).norm() <= 4.0 * f64::EPSILON * o.norm());
        }

        #[test]
        fn squeezed_overlap_is_bounded(
            theta in 0.0f64..0.99, r in 0.0f64..1.0, phi in -3.0f64..3.0,
            ar in -1.5f64..1.5, ai in -1.5f64..1.5, br in -1.5f64..1.5, bi in -1.5f64..1.5,
            cr in -1.5f64..1.5, ci in -1.5f64..1.5, dr in -1.5f64..1.5, di in -1.5f64..1.5,
        ) {
            let z = SqueezeParam::new(r, phi).unwrap();
            let k = amps(c(ar, ai), c(br, bi));
            let b = amps(c(cr, ci), c(dr, di));
            let o = squeezed_overlap(d(theta), &b, &k, &z);
            prop_assert!(o.norm() <= 1.0 + 1e-12, "|o| = {}", o.norm());
        }
    }
}
