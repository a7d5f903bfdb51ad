use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::SqueezeParam;
use crate::params::Deformation;

/// Relative tolerance for calling an uncertainty product saturated.
pub const HEISENBERG_SATURATION_TOLERANCE: f64 = 1e-10;

/// Which Heisenberg bounds the stored products sit on.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Saturation {
    pub xpx: bool,
    pub ypy: bool,
    pub xy: bool,
    pub pxpy: bool,
    pub XP: bool,
}

/// Quadrature variances of a deformed coherent or squeezed state.
///
/// Single-mode variances come from the closed form for `x` and `p_x`; the
/// `y`, `p_y` pair follows from the exchange identities. Products are
/// products of variances and are compared with squared Heisenberg floors.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceReport {
    pub dx2: f64,
    pub dy2: f64,
    pub dpx2: f64,
    pub dpy2: f64,
    pub prod_xpx: f64,
    pub prod_ypy: f64,
    pub prod_xy: f64,
    pub prod_pxpy: f64,
    pub dX2: f64,
    pub dP2: f64,
    pub prod_XP: f64,
    /// `dx2` over its coherent-state value.
    pub gain_x: f64,
    /// `dpx2` over its coherent-state value.
    pub gain_px: f64,
    /// `gain_x < 1` or `gain_px < 1`.
    pub squeezing: bool,
    pub saturation: Saturation,
}

/// Gain factors `(g_x, g_px)` multiplying the coherent-state variances of
/// `x` and `p_x`.
pub fn variance_gains(params: impl Into<Deformation>, z: &SqueezeParam) -> (f64, f64) {
    let theta = params.into().theta;
    let Hyper { c2, s2, ct, st } = Hyper::new(z.r(), theta);
    let sphi = z.phi().sin();
    let gx = c2 * (ct + sphi * st) + theta * s2 * (st + sphi * ct);
    let gp = c2 * (ct - sphi * st) + theta * s2 * (st - sphi * ct);
    (gx, gp)
}

/// `cosh 2r`, `sinh 2r`, `cosh 2r theta`, `sinh 2r theta`.
struct Hyper {
    c2: f64,
    s2: f64,
    ct: f64,
    st: f64,
}

impl Hyper {
    fn new(r: f64, theta: f64) -> Self {
        let (r2, rt2) = (2.0 * r, 2.0 * r * theta);
        Self {
            c2: r2.cosh(),
            s2: r2.sinh(),
            ct: rt2.cosh(),
            st: rt2.sinh(),
        }
    }
}

/// `(dX2, dP2)` for `X = (x + y)/2`, `P = (p_x + p_y)/2`.
fn two_mode_variances(d: &Deformation, z: &SqueezeParam) -> (f64, f64) {
    let Hyper { c2, s2, ct, st } = Hyper::new(z.r(), d.theta);
    let cphi = z.phi().cos();
    let q = 0.25 * d.hbar;
    let gx = ct * (c2 - cphi * s2) + d.theta * st * (s2 - cphi * c2);
    let gp = ct * (c2 + cphi * s2) + d.theta * st * (s2 + cphi * c2);
    (q * d.aspect * gx, q / d.aspect * gp)
}

fn is_saturated(lhs: f64, rhs: f64) -> bool {
    (lhs - rhs).abs() <= HEISENBERG_SATURATION_TOLERANCE * rhs.abs()
}

/// Variances on `|alpha, beta; z>`, or on `|alpha, beta>` when `z` is absent.
/// The amplitudes do not enter.
pub fn single_mode_report(params: impl Into<Deformation>, z: Option<&SqueezeParam>) -> VarianceReport {
    let d = params.into();
    let zero = SqueezeParam::zero();
    let z = z.unwrap_or(&zero);
    let (gain_x, gain_px) = variance_gains(d, z);
    let h = 0.5 * d.hbar;
    let dx2 = h * d.aspect * gain_x;
    let dpx2 = h / d.aspect * gain_px;
    let dy2 = h * d.aspect * gain_px;
    let dpy2 = h / d.aspect * gain_x;
    let (quad_x, quad_p) = two_mode_variances(&d, z);
    let mut report = VarianceReport {
        dx2,
        dy2,
        dpx2,
        dpy2,
        prod_xpx: dx2 * dpx2,
        prod_ypy: dy2 * dpy2,
        prod_xy: dx2 * dy2,
        prod_pxpy: dpx2 * dpy2,
        dX2: quad_x,
        dP2: quad_p,
        prod_XP: quad_x * quad_p,
        gain_x,
        gain_px,
        squeezing: gain_x < 1.0 || gain_px < 1.0,
        saturation: Saturation {
            xpx: false,
            ypy: false,
            xy: false,
            pxpy: false,
            XP: false,
        },
    };
    let floors = Floors::of(&d);
    report.saturation = Saturation {
        xpx: is_saturated(report.prod_xpx, floors.xpx),
        ypy: is_saturated(report.prod_ypy, floors.xpx),
        xy: is_saturated(report.prod_xy, floors.xy),
        pxpy: is_saturated(report.prod_pxpy, floors.pxpy),
        XP: is_saturated(report.prod_XP, floors.xp_two),
    };
    report
}

/// Squared Heisenberg floors: `hbar^2/4`, `mu^2/4`, `nu^2/4`, `hbar^2/16`.
struct Floors {
    xpx: f64,
    xy: f64,
    pxpy: f64,
    xp_two: f64,
}

impl Floors {
    fn of(d: &Deformation) -> Self {
        Self {
            xpx: 0.25 * d.hbar * d.hbar,
            xy: 0.25 * d.mu() * d.mu(),
            pxpy: 0.25 * d.nu() * d.nu(),
            xp_two: d.hbar * d.hbar / 16.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductMinima {
    /// `dx2 * dpx2` at the given `(r, phi)`.
    pub prod_xpx: f64,
    /// Minimum over `phi` of `dx2 * dpx2` at the same `r`.
    pub min_xpx: f64,
    pub min_xy: f64,
    pub min_pxpy: f64,
    /// Minimizing angle; `-pi/2` is equivalent.
    pub argmin_phi: f64,
}

/// Single-mode uncertainty product and its minima over the squeeze angle.
pub fn variance_products(params: impl Into<Deformation>, z: &SqueezeParam) -> ProductMinima {
    let d = params.into();
    let theta = d.theta;
    let Hyper { c2, s2, ct, st } = Hyper::new(z.r(), theta);
    let (sphi, cphi) = z.phi().sin_cos();
    let (s_sq, c_sq) = (sphi * sphi, cphi * cphi);
    let s4 = (4.0 * z.r()).sinh();
    let s4t = (4.0 * z.r() * theta).sinh();
    let h2 = 0.25 * d.hbar * d.hbar;
    let bracket = c2 * c2 * (ct * ct - s_sq * st * st)
        + 0.5 * theta * c_sq * s4 * s4t
        + theta * theta * s2 * s2 * (st * st - s_sq * ct * ct);
    let excess = 1.0 + (1.0 - theta * theta) * s2 * s2;
    let a2 = d.aspect * d.aspect;
    ProductMinima {
        prod_xpx: h2 * bracket,
        min_xpx: h2 * excess,
        min_xy: h2 * a2 * excess,
        min_pxpy: h2 / a2 * excess,
        argmin_phi: FRAC_PI_2,
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoModeReport {
    pub dX2: f64,
    pub dP2: f64,
    pub prod_XP: f64,
    pub min_XP: f64,
    pub argmin_phi: f64,
}

/// Variances of the two-mode quadratures `X = (x + y)/2`, `P = (p_x + p_y)/2`.
pub fn two_mode_report(params: impl Into<Deformation>, z: &SqueezeParam) -> TwoModeReport {
    let d = params.into();
    let theta = d.theta;
    let (quad_x, quad_p) = two_mode_variances(&d, z);
    let Hyper { c2, s2, st, .. } = Hyper::new(z.r(), theta);
    let (sphi, cphi) = z.phi().sin_cos();
    let (s_sq, c_sq) = (sphi * sphi, cphi * cphi);
    let s4 = (4.0 * z.r()).sinh();
    let s4t = (4.0 * z.r() * theta).sinh();
    let h2 = d.hbar * d.hbar / 16.0;
    let bracket = (c2 * c2 - c_sq * s2 * s2)
        + 0.5 * theta * s_sq * s4 * s4t
        + ((c2 * c2 + theta * theta * s2 * s2) - c_sq * (theta * theta * c2 * c2 + s2 * s2)) * st * st;
    TwoModeReport {
        dX2: quad_x,
        dP2: quad_p,
        prod_XP: h2 * bracket,
        min_XP: h2 * (1.0 + (1.0 - theta * theta) * st * st),
        argmin_phi: 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    /// Product of variances.
    pub lhs: f64,
    /// Squared floor.
    pub rhs: f64,
    pub satisfied: bool,
    pub saturated: bool,
}

impl BoundCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        let saturated = is_saturated(lhs, rhs);
        Self {
            lhs,
            rhs,
            satisfied: saturated || lhs >= rhs,
            saturated,
        }
    }
}

/// The five uncertainty relations evaluated on one state.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeisenbergReport {
    pub xpx: BoundCheck,
    pub ypy: BoundCheck,
    pub xy: BoundCheck,
    pub pxpy: BoundCheck,
    pub XP: BoundCheck,
}

impl HeisenbergReport {
    pub fn all_satisfied(&self) -> bool {
        [self.xpx, self.ypy, self.xy, self.pxpy, self.XP]
            .iter()
            .all(|b| b.satisfied)
    }
}

pub fn heisenberg_report(params: impl Into<Deformation>, z: Option<&SqueezeParam>) -> HeisenbergReport {
    let d = params.into();
    let v = single_mode_report(d, z);
    let f = Floors::of(&d);
    HeisenbergReport {
        xpx: BoundCheck::new(v.prod_xpx, f.xpx),
        ypy: BoundCheck::new(v.prod_ypy, f.xpx),
        xy: BoundCheck::new(v.prod_xy, f.xy),
        pxpy: BoundCheck::new(v.prod_pxpy, f.pxpy),
        XP: BoundCheck::new(v.prod_XP, f.xp_two),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn d(theta: f64) -> Deformation {
        Deformation::new(1.0, 1.0, theta).unwrap()
    }

    fn sq(r: f64, phi: f64) -> SqueezeParam {
        SqueezeParam::new(r, phi).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    /// Angles `-pi + k*pi/3142`, which include `0` and `+-pi/2`.
    fn phi_grid() -> impl Iterator<Item = f64> {
        (1..=2 * 3142).map(|k| -PI + k as f64 * PI / 3142.0)
    }

    #[test]
    fn coherent_variances() {
        let p = make_params(4.0, 1.0, 1.0).unwrap();
        let v = single_mode_report(p, None);
        assert_eq!(v.dx2, 1.0);
        assert_eq!(v.dpx2, 0.25);
        assert_eq!(v.dy2, v.dx2);
        assert_eq!(v.dpy2, v.dpx2);
        assert!(!v.squeezing);
        assert!(v.saturation.xpx && v.saturation.ypy);
        assert!(!v.saturation.xy && !v.saturation.pxpy);
    }

    #[test]
    fn commutative_limit_has_no_squeezing_at_zero_phase() {
        for r in [0.1, 0.5, 1.0] {
            let v = single_mode_report(d(0.0), Some(&sq(r, 0.0)));
            let c2 = (2.0 * r).cosh();
            assert!(rel(v.dx2, 0.5 * c2) < 1e-15);
            assert!(rel(v.gain_x, c2) < 1e-15 && rel(v.gain_px, c2) < 1e-15);
            assert!(v.gain_x > 1.0 && !v.squeezing);
        }
    }

    #[test]
    fn quarter_turn_squeezes_momentum() {
        // At phi = pi/2 the position gain is e^{2 r theta}(cosh 2r + theta sinh 2r) > 1
        // and the momentum gain e^{-2 r theta}(cosh 2r - theta sinh 2r) can drop below 1.
        let (theta, r) = (0.5f64, 0.3f64);
        let v = single_mode_report(d(theta), Some(&sq(r, FRAC_PI_2)));
        let et = (2.0 * r * theta).exp();
        let gx = et * ((2.0 * r).cosh() + theta * (2.0 * r).sinh());
        let gp = ((2.0 * r).cosh() - theta * (2.0 * r).sinh()) / et;
        assert!(rel(v.gain_x, gx) < 1e-14);
        assert!(rel(v.gain_px, gp) < 1e-14);
        assert!(v.gain_x > 1.0 && v.gain_px < 1.0 && v.squeezing);
    }

    #[test]
    fn product_minima_examples() {
        let m = variance_products(d(0.7), &sq(0.0, 1.0));
        assert_eq!(m.prod_xpx, 0.25);
        assert_eq!((m.min_xpx, m.min_xy, m.min_pxpy), (0.25, 0.25, 0.25));

        for r in [0.1, 0.6, 1.2] {
            let m = variance_products(d(1.0), &sq(r, FRAC_PI_2));
            assert_eq!(m.min_xpx, 0.25);
            assert!(rel(m.prod_xpx, 0.25) < 1e-12, "{}", m.prod_xpx);
        }

        let z = sq(0.4, 0.0);
        let m = variance_products(d(0.5), &z);
        assert!(rel(m.min_xpx, 0.25 * (1.0 + 0.75 * 0.8f64.sinh().powi(2))) < 1e-15);
        let (best_phi, best) = phi_grid()
            .map(|phi| (phi, variance_products(d(0.5), &sq(0.4, phi)).prod_xpx))
            .fold((0.0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        assert!((best_phi.abs() - FRAC_PI_2).abs() < 1e-12, "{best_phi}");
        assert!(rel(best, m.min_xpx) < 1e-10);
    }

    #[test]
    fn aspect_scales_minima() {
        let p = make_params(2.0, 0.125, 1.0).unwrap();
        let m = variance_products(p, &sq(0.3, 0.0));
        let base = variance_products(d(p.theta()), &sq(0.3, 0.0));
        assert!(rel(m.min_xy, base.min_xpx * 16.0) < 1e-14);
        assert!(rel(m.min_pxpy, base.min_xpx / 16.0) < 1e-14);
    }

    #[test]
    fn two_mode_examples() {
        let p = make_params(4.0, 1.0, 1.0).unwrap();
        let t = two_mode_report(p, &sq(0.0, 0.3));
        assert_eq!(t.dX2, 0.5);
        assert_eq!(t.dP2, 0.125);
        assert_eq!(t.prod_XP, 1.0 / 16.0);

        for r in [0.2, 0.9] {
            let t = two_mode_report(d(1.0), &sq(r, 0.0));
            assert_eq!(t.min_XP, 1.0 / 16.0);
            assert!(rel(t.prod_XP, 1.0 / 16.0) < 1e-12);
        }

        let t = two_mode_report(d(0.5), &sq(0.5, 0.0));
        let (best_phi, best) = phi_grid()
            .map(|phi| (phi, two_mode_report(d(0.5), &sq(0.5, phi)).prod_XP))
            .fold((1.0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        assert!(best_phi.abs() < 1e-12, "{best_phi}");
        assert!(rel(best, t.min_XP) < 1e-10);
    }

    #[test]
    fn heisenberg_examples() {
        let p = make_params(0.3, 0.6, 1.0).unwrap();
        let h = heisenberg_report(p, None);
        assert!(h.xpx.saturated && h.ypy.saturated);
        assert!(h.xy.satisfied && !h.xy.saturated && h.xy.lhs > h.xy.rhs);
        assert!(h.pxpy.satisfied && !h.pxpy.saturated);
        assert!(h.all_satisfied());

        let h = heisenberg_report(d(1.0), Some(&sq(0.7, FRAC_PI_2)));
        assert!(h.xpx.saturated);

        let sup = make_params(2.0, 2.0, 1.0).unwrap();
        let m = variance_products(sup, &sq(0.3, FRAC_PI_2));
        assert!(m.min_xpx < 0.25);
        let h = heisenberg_report(sup, Some(&sq(0.3, FRAC_PI_2)));
        assert!(!h.xpx.satisfied);
        assert!(!h.all_satisfied());
    }

    #[test]
    fn variances_ignore_amplitudes() {
        // The report has no amplitude input: equal (params, z) give equal output.
        let a = single_mode_report(d(0.4), Some(&sq(0.2, 0.9)));
        let b = single_mode_report(d(0.4), Some(&sq(0.2, 0.9)));
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn exchange_identities(theta in 1e-3f64..1.0, r in 0.0f64..1.5, phi in -PI..PI, aspect in 0.05f64..20.0) {
            let p = Deformation::new(1.3, aspect, theta).unwrap();
            let v = single_mode_report(p, Some(&sq(r, phi)));
            let fwd = (p.nu() / p.mu()).sqrt();
            let back = (p.mu() / p.nu()).sqrt();
            let ulp = |x: f64| 4.0 * f64::EPSILON * x.abs();
            prop_assert!((fwd * v.dx2 - back * v.dpy2).abs() <= ulp(fwd * v.dx2));
            prop_assert!((fwd * v.dy2 - back * v.dpx2).abs() <= ulp(fwd * v.dy2));
        }

        #[test]
        fn phase_symmetry(theta in 0.0f64..1.0, r in 0.0f64..1.5, phi in -3.1f64..3.1, aspect in 0.05f64..20.0) {
            let p = Deformation::new(0.7, aspect, theta).unwrap();
            let plus = single_mode_report(p, Some(&sq(r, phi)));
            let minus = single_mode_report(p, Some(&sq(r, -phi)));
            let lhs = plus.dx2 / aspect;
            let rhs = minus.dpx2 * aspect;
            prop_assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * lhs);
        }

        #[test]
        fn commutative_gains_exceed_one(r in 1e-3f64..2.0, phi in -PI..PI) {
            let v = single_mode_report(d(0.0), Some(&sq(r, phi)));
            prop_assert!(v.gain_x > 1.0 && v.gain_px > 1.0);
        }

        #[test]
        fn products_match_variances(theta in 0.0f64..1.0, r in 0.0f64..1.0, phi in -PI..PI) {
            let z = sq(r, phi);
            let v = single_mode_report(d(theta), Some(&z));
            let m = variance_products(d(theta), &z);
            prop_assert!(rel(m.prod_xpx, v.prod_xpx) < 1e-12);
            prop_assert!(m.prod_xpx >= m.min_xpx * (1.0 - 1e-12));
            let t = two_mode_report(d(theta), &z);
            prop_assert!(rel(t.prod_XP, v.prod_XP) < 1e-12);
            prop_assert!(t.prod_XP >= t.min_XP * (1.0 - 1e-12));
            prop_assert!(v.dx2 > 0.0 && v.dpx2 > 0.0 && v.dX2 > 0.0 && v.dP2 > 0.0);
        }
    }
}
