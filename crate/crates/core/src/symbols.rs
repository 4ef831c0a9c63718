//! Fourier symbols of shifted Grünwald operators and their combinations.
//!
//! The symbol of `sign * A_{h,p}` is
//! `psi(k) = sign * h^-alpha * e^{-ikhp} (1 - e^{ikh})^alpha`, which is
//! `2 pi / h` periodic whenever `p` lands on the grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grunwald::{FracOrder, Scheme};
use crate::series;

/// Taylor coefficients of `omega_{p,alpha}(z) = ((1 - e^{-z}) / z)^alpha e^{pz}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaSeries {
    pub p: f64,
    pub alpha: f64,
    pub coeffs: Vec<f64>,
}

/// `((1 - e^{-z}) / z)^alpha e^{pz}` on the principal branch.
pub fn omega_eval(p: f64, alpha: f64, z: Complex64) -> Result<Complex64> {
    let base = if z.norm() < 1e-6 {
        // 1 - z/2 + z^2/6 - z^3/24
        Complex64::new(1.0, 0.0) - z / 2.0 + z * z / 6.0 - z * z * z / 24.0
    } else {
        (Complex64::new(1.0, 0.0) - (-z).exp()) / z
    };
    if base.im == 0.0 && base.re <= 0.0 {
        return Err(Error::BranchCut { re: z.re, im: z.im });
    }
    Ok((alpha * base.ln() + p * z).exp())
}

/// Coefficients `a_0..=a_n` of `omega_{p,alpha}`.
pub fn omega_taylor(p: f64, alpha: f64, n: usize) -> OmegaSeries {
    let len = n + 1;
    let u = series::pow(&series::one_minus_exp_over_z(len), alpha, len);
    let coeffs = series::mul(&u, &series::exp_linear(p, len), len);
    OmegaSeries { p, alpha, coeffs }
}

/// `(1 - e^{i theta})^alpha` for real `theta` via the polar form
/// `|.| = 2 |sin(theta/2)|`, `arg = theta/2 -+ pi/2`, after reducing `theta` to `(-pi, pi]`.
fn one_minus_cis_pow(theta: f64, alpha: f64) -> Complex64 {
    let th = reduce_angle(theta);
    if th == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let modulus = (2.0 * (th / 2.0).sin().abs()).powf(alpha);
    let arg = if th > 0.0 {
        th / 2.0 - PI / 2.0
    } else {
        th / 2.0 + PI / 2.0
    };
    Complex64::from_polar(modulus, alpha * arg)
}

fn reduce_angle(theta: f64) -> f64 {
    // tiny negative angles must not round-trip through 2*pi
    if theta > -PI && theta <= PI {
        return theta;
    }
    let r = theta.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Symbol of `sign * A_{h,p}` at wavenumber `k`.
pub fn psi_eval(order: FracOrder, h: f64, p: f64, k: f64) -> Complex64 {
    let alpha = order.alpha();
    let phase = Complex64::from_polar(1.0, -k * h * p);
    order.sign() * h.powf(-alpha) * phase * one_minus_cis_pow(k * h, alpha)
}

/// `d/dk` of [`psi_eval`]; `psi * (-i h p - i h alpha e^{ikh} / (1 - e^{ikh}))`.
pub fn psi_derivative(order: FracOrder, h: f64, p: f64, k: f64) -> Complex64 {
    let theta = reduce_angle(k * h);
    let i = Complex64::i();
    if theta == 0.0 {
        let alpha = order.alpha();
        // |psi'| ~ |k|^(alpha-1) near the origin
        return if alpha > 1.0 {
            Complex64::new(0.0, 0.0)
        } else if alpha == 1.0 {
            order.sign() * (-i)
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        };
    }
    let e = Complex64::from_polar(1.0, theta);
    let psi = psi_eval(order, h, p, k);
    psi * (-i * h * p - i * h * order.alpha() * e / (Complex64::new(1.0, 0.0) - e))
}

/// `Re psi` at `h = 1` from the closed form
/// `(-1)^(q+1-p) 2^alpha sin^alpha(k/2) cos((alpha/2 - p)(k - pi))`; any real `k`.
pub fn psi_real_closed_form(order: FracOrder, p: i64, k: f64) -> f64 {
    let alpha = order.alpha();
    // the real part is even and 2 pi periodic; the formula holds on [0, 2 pi]
    let k = ((k + PI).rem_euclid(2.0 * PI) - PI).abs();
    let parity = (order.q() as i64 + 1 - p).rem_euclid(2);
    let sign = if parity == 0 { 1.0 } else { -1.0 };
    sign * 2f64.powf(alpha)
        * (k / 2.0).sin().powf(alpha)
        * ((alpha / 2.0 - p as f64) * (k - PI)).cos()
}

/// `k -> sum_j b_j psi^{p_j}_{c_j h}(k)` for a scheme at spacing `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolFn {
    scheme: Scheme,
    h: f64,
}

impl SymbolFn {
    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn alpha(&self) -> f64 {
        self.scheme.alpha()
    }

    pub fn eval(&self, k: f64) -> Complex64 {
        let order = self.scheme.order();
        self.scheme
            .terms()
            .iter()
            .map(|t| t.weight * psi_eval(order, t.scale * self.h, t.shift, k))
            .sum()
    }

    pub fn derivative(&self, k: f64) -> Complex64 {
        let order = self.scheme.order();
        self.scheme
            .terms()
            .iter()
            .map(|t| t.weight * psi_derivative(order, t.scale * self.h, t.shift, k))
            .sum()
    }

    /// Same scheme at another spacing.
    pub fn with_h(&self, h: f64) -> Self {
        Self {
            scheme: self.scheme.clone(),
            h,
        }
    }
}

pub fn combined_symbol(scheme: &Scheme, h: f64) -> SymbolFn {
    SymbolFn {
        scheme: scheme.clone(),
        h,
    }
}

/// Measured constants of the symbol bounds
/// `|phi(k)| <= C |k|^alpha`, `|phi'(k)| <= C' |k|^(alpha-1)`, `Re phi(k) <= -c |k|^alpha`.
///
/// `c_coercivity` is reported with its sign, so a symbol whose real part
/// crosses zero shows up with `c_coercivity <= 0`. `cprime_bound` is infinite
/// when a scale-2 term with `alpha < 1` puts a derivative singularity at `k = pi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub c_bound: f64,
    pub cprime_bound: f64,
    pub c_coercivity: f64,
    pub sign_change: bool,
    pub k_grid_size: usize,
}

/// Composite grid on `(0, pi]`: geometric from `1e-8 pi` plus uniform.
fn stability_grid(samples: usize) -> Vec<f64> {
    let n_geo = samples / 2;
    let n_uni = samples - n_geo;
    let lo = (1e-8f64).ln();
    let mut k: Vec<f64> = (0..n_geo)
        .map(|i| PI * (lo * (1.0 - i as f64 / n_geo as f64)).exp())
        .chain((1..=n_uni).map(|i| PI * i as f64 / n_uni as f64))
        .collect();
    k.sort_by(f64::total_cmp);
    k.dedup();
    k
}

/// Samples the symbol at `h = 1` on `(0, pi]`; by periodicity, conjugate
/// symmetry and scaling this covers every `h` and `k`.
pub fn certify_stability(sym: &SymbolFn, k_samples: usize) -> Result<StabilityReport> {
    if k_samples < 1024 {
        return Err(Error::InvalidArgument(format!(
            "need at least 1024 k samples, got {k_samples}"
        )));
    }
    let unit = sym.with_h(1.0);
    let alpha = unit.alpha();
    let grid = stability_grid(k_samples);
    let mut c_bound = 0.0f64;
    let mut cprime = 0.0f64;
    let mut coerc = f64::INFINITY;
    let mut peak = 0.0f64;
    for &k in &grid {
        let v = unit.eval(k);
        let d = unit.derivative(k);
        if !(v.re.is_finite() && v.im.is_finite()) || d.re.is_nan() || d.im.is_nan() {
            return Err(Error::NonFinite(format!("symbol at k = {k}")));
        }
        let ka = k.powf(alpha);
        peak = peak.max(v.norm());
        c_bound = c_bound.max(v.norm() / ka);
        cprime = cprime.max(d.norm() / k.powf(alpha - 1.0));
        coerc = coerc.min(-v.re / ka);
    }
    if peak == 0.0 {
        return Err(Error::DegenerateSymbol);
    }
    Ok(StabilityReport {
        c_bound,
        cprime_bound: cprime,
        c_coercivity: coerc,
        sign_change: coerc <= 0.0,
        k_grid_size: grid.len(),
    })
}

/// The integer `q` with `|q - alpha/2| < 1/2`.
pub fn optimal_shift(order: FracOrder) -> Result<i64> {
    if order.is_odd_integer() {
        return Err(Error::UnsupportedOrder(
            order.alpha(),
            "odd integer orders have no optimal shift".into(),
        ));
    }
    Ok(order.q() as i64)
}

/// Lower bound `2^alpha cos((alpha/2 - p) pi) / pi^alpha` on `-Re psi(k) / k^alpha`.
pub fn coercivity_lower_bound(order: FracOrder, p: f64) -> f64 {
    let alpha = order.alpha();
    2f64.powf(alpha) * ((alpha / 2.0 - p) * PI).cos() / PI.powf(alpha)
}

/// Largest `|sum_j b_j a_{j,n} c_j^n - delta_{n,0}|` over `n = 0..=degree`.
pub fn taylor_cancellation_check(scheme: &Scheme, degree: usize) -> f64 {
    let alpha = scheme.alpha();
    let series: Vec<(f64, OmegaSeries)> = scheme
        .terms()
        .iter()
        .map(|t| (t.weight, omega_taylor(t.shift, alpha, degree)))
        .collect();
    (0..=degree)
        .map(|n| {
            let sum: f64 = scheme
                .terms()
                .iter()
                .zip(&series)
                .map(|(t, (b, s))| b * s.coeffs[n] * t.scale.powi(n as i32))
                .sum();
            (sum - if n == 0 { 1.0 } else { 0.0 }).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grunwald::{second_order_scheme, third_order_scheme};
    use proptest::prelude::*;

    fn ord(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    #[test]
    fn omega_values() {
        assert_eq!(
            omega_eval(0.3, 1.7, Complex64::new(0.0, 0.0)).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        let v = omega_eval(0.0, 1.0, Complex64::new(1.0, 0.0)).unwrap();
        assert!((v.re - (1.0 - (-1f64).exp())).abs() < 1e-15);
        let v = omega_eval(1.0, 1.8, Complex64::new(0.1, 0.0)).unwrap();
        assert!((v.re - 1.01).abs() < 0.01);
        // (1 - e^{-z})/z = 0 at z = 2 pi i
        assert!(matches!(
            omega_eval(0.0, 0.5, Complex64::new(0.0, 2.0 * PI)),
            Err(Error::BranchCut { .. })
        ));
    }

    #[test]
    fn omega_series_matches_evaluation() {
        for &(p, alpha) in &[(1.0, 1.8), (0.0, 0.8), (0.5, 1.3)] {
            let s = omega_taylor(p, alpha, 12);
            assert_eq!(s.coeffs[0], 1.0);
            assert!((s.coeffs[1] - (p - alpha / 2.0)).abs() < 1e-15);
            let z = Complex64::new(0.2, 0.15);
            let direct = omega_eval(p, alpha, z).unwrap();
            let summed: Complex64 = s
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * z.powu(n as u32))
                .sum();
            assert!((direct - summed).norm() < 1e-12);
        }
    }

    #[test]
    fn psi_at_pi() {
        let v = psi_eval(ord(1.8), 1.0, 1.0, PI);
        assert!((v.re + 2f64.powf(1.8)).abs() < 1e-13);
        assert!(v.im.abs() < 1e-13);
        assert_eq!(psi_eval(ord(1.8), 0.3, 1.0, 0.0), Complex64::new(0.0, 0.0));
        let c = psi_real_closed_form(ord(1.8), 1, PI);
        assert!((c + 3.4822022531844965).abs() < 1e-12);
        assert_eq!(psi_real_closed_form(ord(1.8), 1, 0.0), 0.0);
    }

    #[test]
    fn closed_form_agrees_with_direct() {
        for &alpha in &[0.8, 1.8, 2.5] {
            let o = ord(alpha);
            for p in 0..=3 {
                for i in 0..=10_000 {
                    let k = PI * i as f64 / 10_000.0;
                    let d = psi_eval(o, 1.0, p as f64, k).re;
                    let c = psi_real_closed_form(o, p, k);
                    assert!((d - c).abs() < 1e-12, "alpha {alpha} p {p} k {k}");
                }
            }
        }
    }

    #[test]
    fn shift_zero_changes_sign_at_1_8() {
        let small = psi_real_closed_form(ord(1.8), 0, 0.1);
        let big = psi_real_closed_form(ord(1.8), 0, PI);
        assert!(small * big < 0.0);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let s = second_order_scheme(ord(1.8)).unwrap();
        let sym = combined_symbol(&s, 1.0);
        for &k in &[0.01, 0.5, 2.0, 3.1] {
            let e = 1e-6;
            let fd = (sym.eval(k + e) - sym.eval(k - e)) / (2.0 * e);
            assert!((fd - sym.derivative(k)).norm() < 1e-6 * (1.0 + fd.norm()));
        }
    }

    #[test]
    fn combined_second_order_at_pi() {
        let o = ord(1.8);
        let s = second_order_scheme(o).unwrap();
        let sym = combined_symbol(&s, 1.0);
        let a = 2.0 - 2.0 / 1.8;
        let expect = a * psi_eval(o, 1.0, 1.0, PI) + (1.0 - a) * psi_eval(o, 2.0, 0.5, PI);
        assert!((sym.eval(PI) - expect).norm() < 1e-14);
        assert_eq!(sym.eval(0.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn certificates() {
        let o = ord(1.8);
        let r = certify_stability(&combined_symbol(&Scheme::first_order(o), 1.0), 4096).unwrap();
        assert!(!r.sign_change);
        assert!(r.c_coercivity >= coercivity_lower_bound(o, 1.0) - 1e-10);
        assert!((coercivity_lower_bound(o, 1.0) - 0.42187).abs() < 1e-4);
        assert!(r.c_bound.is_finite() && r.cprime_bound.is_finite());

        let r = certify_stability(&combined_symbol(&Scheme::shifted(o, 0.0), 1.0), 4096).unwrap();
        assert!(r.sign_change);
        let r = certify_stability(&combined_symbol(&Scheme::shifted(ord(0.8), 0.0), 1.0), 4096)
            .unwrap();
        assert!(!r.sign_change);
        let r = certify_stability(
            &combined_symbol(&second_order_scheme(ord(0.8)).unwrap(), 1.0),
            4096,
        )
        .unwrap();
        assert!(!r.sign_change);
        assert!(r.cprime_bound.is_infinite());
        let r = certify_stability(&combined_symbol(&third_order_scheme(o).unwrap(), 1.0), 4096)
            .unwrap();
        assert!(!r.sign_change);

        assert!(certify_stability(&combined_symbol(&Scheme::first_order(o), 1.0), 100).is_err());
    }

    #[test]
    fn dichotomy_table() {
        for &alpha in &[0.8, 1.8, 2.5] {
            let o = ord(alpha);
            let q = optimal_shift(o).unwrap();
            for p in [q - 1, q, q + 1] {
                let r =
                    certify_stability(&combined_symbol(&Scheme::shifted(o, p as f64), 1.0), 2048)
                        .unwrap();
                assert_eq!(
                    r.sign_change,
                    (p as f64 - alpha / 2.0).abs() > 0.5,
                    "alpha {alpha} p {p}"
                );
            }
        }
    }

    #[test]
    fn optimal_shifts() {
        assert_eq!(optimal_shift(ord(0.8)).unwrap(), 0);
        assert_eq!(optimal_shift(ord(1.8)).unwrap(), 1);
        assert_eq!(optimal_shift(ord(4.6)).unwrap(), 2);
        assert!(optimal_shift(ord(3.0)).is_err());
    }

    #[test]
    fn cancellation_residuals() {
        let o = ord(1.8);
        assert!(taylor_cancellation_check(&second_order_scheme(o).unwrap(), 1) < 1e-12);
        assert!(taylor_cancellation_check(&third_order_scheme(o).unwrap(), 2) < 1e-12);
        assert_eq!(taylor_cancellation_check(&Scheme::first_order(o), 0), 0.0);
        // the single-term scheme does not cancel the first-order term
        assert!(taylor_cancellation_check(&Scheme::first_order(o), 1) > 0.05);
    }

    proptest! {
        #[test]
        fn scaling_identity(h in 1e-3f64..2.0, k in -50.0f64..50.0, alpha in 0.2f64..2.9) {
            prop_assume!(!(alpha - 1.0).abs().lt(&1e-3) && !(alpha - 3.0).abs().lt(&1e-3));
            let o = ord(alpha);
            let scheme = Scheme::first_order(o);
            let sym_h = combined_symbol(&scheme, h);
            let sym_1 = combined_symbol(&scheme, 1.0);
            let lhs = sym_h.eval(k);
            let rhs = h.powf(-alpha) * sym_1.eval(h * k);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        }

        #[test]
        fn conjugate_symmetry(k in 0.0f64..10.0, alpha in 1.05f64..1.95) {
            let s = third_order_scheme(ord(alpha)).unwrap();
            let sym = combined_symbol(&s, 0.7);
            let a = sym.eval(-k);
            let b = sym.eval(k).conj();
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
        }

        #[test]
        fn periodic_in_k(k in -3.0f64..3.0, alpha in 1.05f64..1.95) {
            let s = second_order_scheme(ord(alpha)).unwrap();
            let h = 0.25;
            let sym = combined_symbol(&s, h);
            let a = sym.eval(k);
            let b = sym.eval(k + 2.0 * PI / h);
            prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
        }
    }
}
