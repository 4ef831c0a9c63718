//! Grünwald weights, shifted Grünwald operators on uniform grids, and
//! combinations of shifted operators with different step scales.
//!
//! A shifted Grünwald operator of order `alpha` with shift `p` and step `h` acts as
//!
//! ```text
//! A f(x) = h^-alpha * sum_{m >= 0} w_m f(x - (m - p) h),   w_m = (-1)^m binom(alpha, m)
//! ```
//!
//! and a [`Scheme`] is a weighted sum `sum_j b_j A_{c_j h, p_j}` whose weights
//! cancel the low-order terms of the consistency error.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbols::omega_taylor;

const ALIGN_TOL: f64 = 1e-12;

/// A positive fractional order together with its "band" index `q`, the
/// integer with `2q - 1 < alpha < 2q + 1`.
///
/// Odd integer orders sit on a band boundary; for them `q = (alpha - 1) / 2`
/// is used, which makes `alpha = 1` with `q = 0` the upwind first derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracOrder {
    alpha: f64,
    q: u32,
}

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "fractional order must be positive and finite, got {alpha}"
            )));
        }
        let q = if is_odd_integer(alpha) {
            ((alpha - 1.0) / 2.0).round() as u32
        } else {
            (alpha / 2.0).round() as u32
        };
        Ok(Self { alpha, q })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// `(-1)^(q+1)`, the sign making `sign * d^alpha/dx^alpha` dissipative.
    #[inline]
    pub fn sign(&self) -> f64 {
        if self.q % 2 == 0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn is_odd_integer(&self) -> bool {
        is_odd_integer(self.alpha)
    }
}

fn is_odd_integer(x: f64) -> bool {
    x.fract() == 0.0 && (x as i64) % 2 == 1
}

/// One term `b * A_{c h, p}` of a combined scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeTerm {
    pub weight: f64,
    pub scale: f64,
    pub shift: f64,
}

impl SchemeTerm {
    pub const fn new(weight: f64, scale: f64, shift: f64) -> Self {
        Self {
            weight,
            scale,
            shift,
        }
    }

    /// Integer step multiple and index offset `(c, c p)` when the term is
    /// grid aligned.
    pub fn grid_offsets(&self) -> Result<(usize, isize)> {
        let c = self.scale.round();
        let cp = self.scale * self.shift;
        if (self.scale - c).abs() > ALIGN_TOL || c < 1.0 || (cp - cp.round()).abs() > ALIGN_TOL {
            return Err(Error::GridMisalignment {
                scale: self.scale,
                shift: self.shift,
            });
        }
        Ok((c as usize, cp.round() as isize))
    }
}

/// A linear combination of shifted Grünwald operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scheme {
    order: FracOrder,
    terms: Vec<SchemeTerm>,
    design_order: usize,
}

impl Scheme {
    /// Builds a scheme, checking that the weights sum to one and all scales are positive.
    pub fn new(order: FracOrder, terms: Vec<SchemeTerm>, design_order: usize) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument(
                "scheme needs at least one term".into(),
            ));
        }
        if let Some(t) = terms
            .iter()
            .find(|t| !(t.scale > 0.0) || !t.weight.is_finite() || !t.shift.is_finite())
        {
            return Err(Error::InvalidArgument(format!("invalid scheme term {t:?}")));
        }
        let total: f64 = terms.iter().map(|t| t.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "scheme weights sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            order,
            terms,
            design_order,
        })
    }

    /// Single shifted Grünwald operator with shift `p`.
    pub fn shifted(order: FracOrder, p: f64) -> Self {
        Self {
            order,
            terms: vec![SchemeTerm::new(1.0, 1.0, p)],
            design_order: 1,
        }
    }

    /// Single operator with the optimal shift `q`.
    pub fn first_order(order: FracOrder) -> Self {
        Self::shifted(order, order.q() as f64)
    }

    pub fn order(&self) -> FracOrder {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.order.alpha
    }

    pub fn terms(&self) -> &[SchemeTerm] {
        &self.terms
    }

    pub fn design_order(&self) -> usize {
        self.design_order
    }

    /// Largest number of grid cells any term reaches to the right of the
    /// evaluation point.
    pub fn max_forward_offset(&self) -> Result<isize> {
        let mut best = 0;
        for t in &self.terms {
            best = best.max(t.grid_offsets()?.1);
        }
        Ok(best)
    }
}

/// Second-order combination `a A_{h,p1} + (1 - a) A_{2h,p2}`.
///
/// `0 < alpha < 1`: `a = 2`, `p1 = p2 = 0`.
/// `1 < alpha < 2`: `a = 2 - 2/alpha`, `p1 = 1`, `p2 = 1/2`.
pub fn second_order_scheme(order: FracOrder) -> Result<Scheme> {
    let alpha = order.alpha();
    let terms = if alpha > 0.0 && alpha < 1.0 {
        vec![
            SchemeTerm::new(2.0, 1.0, 0.0),
            SchemeTerm::new(-1.0, 2.0, 0.0),
        ]
    } else if alpha > 1.0 && alpha < 2.0 {
        let a = 2.0 - 2.0 / alpha;
        vec![
            SchemeTerm::new(a, 1.0, 1.0),
            SchemeTerm::new(1.0 - a, 2.0, 0.5),
        ]
    } else {
        return Err(Error::UnsupportedOrder(
            alpha,
            "second-order recipe needs 0 < alpha < 1 or 1 < alpha < 2".into(),
        ));
    };
    Scheme::new(order, terms, 2)
}

/// Third-order combination `a A_{h,1} + b A_{2h,1/2} + c A_{h,0}` for `1 < alpha < 2`.
pub fn third_order_scheme(order: FracOrder) -> Result<Scheme> {
    let alpha = order.alpha();
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::UnsupportedOrder(
            alpha,
            "third-order recipe needs 1 < alpha < 2".into(),
        ));
    }
    let den = 3.0 * (alpha - 1.0);
    let a = (7.0 - 8.0 * alpha + 3.0 * alpha * alpha) / den;
    let b = (-7.0 + 3.0 * alpha) / den;
    let c = 1.0 - a - b;
    Scheme::new(
        order,
        vec![
            SchemeTerm::new(a, 1.0, 1.0),
            SchemeTerm::new(b, 2.0, 0.5),
            SchemeTerm::new(c, 1.0, 0.0),
        ],
        3,
    )
}

/// Solves for weights `b_j` such that `sum_j b_j a_{j,n} c_j^n = delta_{n,0}` for
/// `n = 0..=degree`, where `a_{j,n}` are the Taylor coefficients of
/// `omega_{p_j, alpha}`. `pairs` holds `(c_j, p_j)` and must have `degree + 1` entries.
pub fn solve_scheme_coefficients(
    order: FracOrder,
    pairs: &[(f64, f64)],
    degree: usize,
) -> Result<Vec<f64>> {
    let size = degree + 1;
    if pairs.len() != size {
        return Err(Error::InvalidArgument(format!(
            "need {size} (scale, shift) pairs for cancellation degree {degree}, got {}",
            pairs.len()
        )));
    }
    let mut m = DMatrix::<f64>::zeros(size, size);
    for (j, &(c, p)) in pairs.iter().enumerate() {
        if !(c > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "scale must be positive, got {c}"
            )));
        }
        let series = omega_taylor(p, order.alpha(), degree);
        for n in 0..size {
            m[(n, j)] = series.coeffs[n] * c.powi(n as i32);
        }
    }
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let lu = m.lu();
    let u = lu.u();
    let pivot = (0..size)
        .map(|i| u[(i, i)].abs())
        .fold(f64::INFINITY, f64::min);
    if !(pivot > 1e-12 * scale.max(1.0)) {
        return Err(Error::SingularSystem { pivot });
    }
    let mut rhs = DVector::<f64>::zeros(size);
    rhs[0] = 1.0;
    let b = lu.solve(&rhs).ok_or(Error::SingularSystem { pivot })?;
    Ok(b.iter().copied().collect())
}

/// Grünwald weights `w_0..=w_m` of order `alpha > 0` by the recurrence
/// `w_0 = 1`, `w_k = w_{k-1} (k - 1 - alpha) / k`.
pub fn grunwald_weights(alpha: f64, m: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(m + 1);
    w.push(1.0);
    for k in 1..=m {
        let prev = w[k - 1];
        w.push(prev * ((k as f64 - 1.0 - alpha) / k as f64));
    }
    w
}

/// Where samples live and how they extend off the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    FullLine,
    /// `[0, inf)`; samples left of the origin read as zero.
    HalfLine,
    Interval(f64, f64),
}

/// Samples `f(x_i)` at `x_i = (i - origin_index) h`. Every sample off the grid reads as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    samples: Vec<f64>,
    h: f64,
    origin_index: isize,
    domain: Domain,
}

impl GridFunction {
    pub fn new(samples: Vec<f64>, h: f64, origin_index: isize, domain: Domain) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("grid samples must be finite".into()));
        }
        let mut g = Self {
            samples,
            h,
            origin_index,
            domain,
        };
        if domain == Domain::HalfLine {
            let cut = origin_index.clamp(0, g.samples.len() as isize) as usize;
            g.samples[..cut].iter_mut().for_each(|v| *v = 0.0);
        }
        Ok(g)
    }

    /// Samples `f` at `n` nodes.
    pub fn from_fn(
        f: impl Fn(f64) -> f64,
        n: usize,
        h: f64,
        origin_index: isize,
        domain: Domain,
    ) -> Result<Self> {
        let samples = (0..n)
            .map(|i| f((i as isize - origin_index) as f64 * h))
            .collect();
        Self::new(samples, h, origin_index, domain)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin_index(&self) -> isize {
        self.origin_index
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as isize - self.origin_index) as f64 * self.h
    }

    /// Same grid, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != self.samples.len() {
            return Err(Error::InvalidArgument("sample count mismatch".into()));
        }
        Self::new(samples, self.h, self.origin_index, self.domain)
    }
}

/// How many Grünwald terms to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    /// Every term that touches an in-range sample; on the full line terms
    /// stop once `|w_m| max|f| < 1e-16`.
    #[default]
    Auto,
    Terms(usize),
}

/// `h^-alpha sum_{m=0}^{M} w_m f(x - (m - p) h)` on the grid of `f`, for integer `p`.
pub fn apply_shifted_grunwald(
    f: &GridFunction,
    alpha: f64,
    p: f64,
    truncation: Truncation,
) -> Result<GridFunction> {
    if (p - p.round()).abs() > ALIGN_TOL {
        return Err(Error::NonIntegerShift(p));
    }
    let mut out = vec![0.0; f.len()];
    accumulate_term(&mut out, f, alpha, 1, p.round() as isize, 1.0, truncation);
    f.with_samples(out)
}

/// `sum_j b_j A_{c_j h, p_j} f` on the grid of `f`.
pub fn apply_scheme(
    f: &GridFunction,
    scheme: &Scheme,
    truncation: Truncation,
) -> Result<GridFunction> {
    let offsets: Vec<(usize, isize)> = scheme
        .terms()
        .iter()
        .map(|t| t.grid_offsets())
        .collect::<Result<_>>()?;
    let mut out = vec![0.0; f.len()];
    for (term, (c, off)) in scheme.terms().iter().zip(offsets) {
        accumulate_term(&mut out, f, scheme.alpha(), c, off, term.weight, truncation);
    }
    f.with_samples(out)
}

/// out[i] += b (c h)^-alpha sum_m w_m f[i - c m + off]
fn accumulate_term(
    out: &mut [f64],
    f: &GridFunction,
    alpha: f64,
    c: usize,
    off: isize,
    b: f64,
    truncation: Truncation,
) {
    let n = f.len() as isize;
    let samples = f.samples();
    let c_i = c as isize;
    // Largest m with an in-range sample: i - c m + off >= 0 for some i < n.
    let reach = ((n - 1 + off).max(0) / c_i) as usize;
    let max_m = match truncation {
        Truncation::Terms(m) => m.min(reach),
        Truncation::Auto => reach,
    };
    let fmax = samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let weights = grunwald_weights(alpha, max_m);
    let scale = b * (c as f64 * f.h()).powf(-alpha);
    for (m, &w) in weights.iter().enumerate() {
        if matches!(truncation, Truncation::Auto)
            && f.domain() == Domain::FullLine
            && m as f64 > alpha + 1.0
            && w.abs() * fmax < 1e-16
        {
            break;
        }
        if w == 0.0 {
            continue;
        }
        let shift = c_i * m as isize - off; // out[i] reads samples[i - shift]
        let lo = shift.max(0);
        let hi = (n + shift).min(n);
        let coef = scale * w;
        for i in lo..hi {
            out[i as usize] += coef * samples[(i - shift) as usize];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    fn gamma_weight(alpha: f64, m: usize) -> f64 {
        // Gamma(m - alpha) / (Gamma(-alpha) Gamma(m + 1))
        gamma(m as f64 - alpha) / (gamma(-alpha) * gamma(m as f64 + 1.0))
    }

    #[test]
    fn integer_orders_give_finite_differences() {
        assert_eq!(grunwald_weights(1.0, 3), vec![1.0, -1.0, 0.0, 0.0]);
        assert_eq!(grunwald_weights(2.0, 3), vec![1.0, -2.0, 1.0, 0.0]);
    }

    #[test]
    fn recurrence_matches_gamma_quotient() {
        let w = grunwald_weights(0.8, 2);
        assert!((w[1] + 0.8).abs() < 1e-15);
        assert!((w[2] + 0.08).abs() < 1e-15);
        for &alpha in &[0.3, 0.8, 1.5, 1.8, 2.5] {
            let w = grunwald_weights(alpha, 60);
            for (m, &wm) in w.iter().enumerate() {
                let g = gamma_weight(alpha, m);
                assert!(
                    (wm - g).abs() <= 1e-12 * g.abs(),
                    "alpha {alpha} m {m}: {wm} vs {g}"
                );
            }
        }
    }

    #[test]
    fn weights_share_sign_except_w1() {
        for &alpha in &[1.2, 1.5, 1.8] {
            let w = grunwald_weights(alpha, 200);
            assert!(w[1] < 0.0);
            assert!(w
                .iter()
                .enumerate()
                .filter(|(m, _)| *m != 1)
                .all(|(_, v)| *v >= 0.0));
            // partial sums tend to zero
            let s: f64 = w.iter().sum();
            assert!(s.abs() < 1e-3);
        }
    }

    #[test]
    fn frac_order_bands() {
        assert_eq!(FracOrder::new(0.8).unwrap().q(), 0);
        assert_eq!(FracOrder::new(1.8).unwrap().q(), 1);
        assert_eq!(FracOrder::new(4.6).unwrap().q(), 2);
        assert_eq!(FracOrder::new(1.0).unwrap().q(), 0);
        assert_eq!(FracOrder::new(1.8).unwrap().sign(), 1.0);
        assert_eq!(FracOrder::new(0.8).unwrap().sign(), -1.0);
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(f64::NAN).is_err());
    }

    #[test]
    fn published_second_order_weights() {
        let s = second_order_scheme(FracOrder::new(1.8).unwrap()).unwrap();
        let t = s.terms();
        assert!((t[0].weight - (2.0 - 2.0 / 1.8)).abs() < 1e-15);
        assert_eq!((t[0].scale, t[0].shift), (1.0, 1.0));
        assert!((t[1].weight - (2.0 / 1.8 - 1.0)).abs() < 1e-15);
        assert_eq!((t[1].scale, t[1].shift), (2.0, 0.5));

        let s = second_order_scheme(FracOrder::new(0.5).unwrap()).unwrap();
        assert_eq!(
            s.terms(),
            &[
                SchemeTerm::new(2.0, 1.0, 0.0),
                SchemeTerm::new(-1.0, 2.0, 0.0)
            ]
        );

        assert!(matches!(
            second_order_scheme(FracOrder::new(2.5).unwrap()),
            Err(Error::UnsupportedOrder(..))
        ));
        assert!(matches!(
            second_order_scheme(FracOrder::new(1.0).unwrap()),
            Err(Error::UnsupportedOrder(..))
        ));
    }

    #[test]
    fn third_order_weights_at_1_8() {
        let s = third_order_scheme(FracOrder::new(1.8).unwrap()).unwrap();
        let w: Vec<f64> = s.terms().iter().map(|t| t.weight).collect();
        // a = 2.32 / 2.4, b = -1.6 / 2.4, c = 1 - a - b
        assert!((w[0] - 29.0 / 30.0).abs() < 1e-14);
        assert!((w[1] + 2.0 / 3.0).abs() < 1e-14);
        assert!((w[2] - 0.7).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(third_order_scheme(FracOrder::new(0.8).unwrap()).is_err());
    }

    #[test]
    fn coefficient_solve_recovers_published_sets() {
        let order = FracOrder::new(1.8).unwrap();
        let b = solve_scheme_coefficients(order, &[(1.0, 1.0), (2.0, 0.5)], 1).unwrap();
        assert!((b[0] - (2.0 - 2.0 / 1.8)).abs() < 1e-12);
        assert!((b[1] - (2.0 / 1.8 - 1.0)).abs() < 1e-12);

        let b = solve_scheme_coefficients(order, &[(1.0, 1.0), (2.0, 0.5), (1.0, 0.0)], 2).unwrap();
        let third = third_order_scheme(order).unwrap();
        for (x, t) in b.iter().zip(third.terms()) {
            assert!((x - t.weight).abs() < 1e-12);
        }

        let b = solve_scheme_coefficients(order, &[(1.0, 1.0)], 0).unwrap();
        assert_eq!(b, vec![1.0]);
    }

    #[test]
    fn duplicated_pairs_are_singular() {
        let order = FracOrder::new(1.8).unwrap();
        let err = solve_scheme_coefficients(order, &[(1.0, 1.0), (1.0, 1.0)], 1).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { .. }));
        assert!(solve_scheme_coefficients(order, &[(1.0, 1.0)], 1).is_err());
    }

    #[test]
    fn misaligned_terms_are_rejected() {
        let order = FracOrder::new(1.8).unwrap();
        let s = Scheme::new(order, vec![SchemeTerm::new(1.0, 1.0, 0.5)], 1).unwrap();
        let f = GridFunction::from_fn(|x| x, 10, 0.1, 0, Domain::HalfLine).unwrap();
        assert!(matches!(
            apply_scheme(&f, &s, Truncation::Auto),
            Err(Error::GridMisalignment { .. })
        ));
        assert!(matches!(
            apply_shifted_grunwald(&f, 1.8, 0.5, Truncation::Auto),
            Err(Error::NonIntegerShift(_))
        ));
        assert!(Scheme::new(order, vec![SchemeTerm::new(0.5, 1.0, 1.0)], 1).is_err());
    }

    #[test]
    fn upwind_derivative_of_cubic() {
        let h = 0.01;
        let f =
            GridFunction::from_fn(|x| x * x * x, 401, h, 0, Domain::Interval(0.0, 4.0)).unwrap();
        let d = apply_shifted_grunwald(&f, 1.0, 0.0, Truncation::Auto).unwrap();
        // backward difference at x = 2: 12 - 6h + O(h^2)
        assert!((d.samples()[200] - 12.0).abs() < 10.0 * h);
    }

    #[test]
    fn zero_in_zero_out() {
        let f = GridFunction::new(vec![0.0; 50], 0.1, 25, Domain::FullLine).unwrap();
        let s = third_order_scheme(FracOrder::new(1.8).unwrap()).unwrap();
        let out = apply_scheme(&f, &s, Truncation::Auto).unwrap();
        assert!(out.samples().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn half_line_power_derivative() {
        // D^0.5 x = Gamma(2)/Gamma(1.5) x^0.5
        let h = 1e-3;
        let f = GridFunction::from_fn(|x| x, 1001, h, 0, Domain::HalfLine).unwrap();
        let d = apply_shifted_grunwald(&f, 0.5, 0.0, Truncation::Auto).unwrap();
        let exact = 1.0 / gamma(1.5);
        assert!((d.samples()[1000] - exact).abs() < 0.01 * exact);
    }

    #[test]
    fn single_term_scheme_equals_shifted_operator() {
        let order = FracOrder::new(1.8).unwrap();
        let f = GridFunction::from_fn(|x: f64| (-x * x).exp(), 200, 0.05, 100, Domain::FullLine)
            .unwrap();
        let a = apply_scheme(&f, &Scheme::first_order(order), Truncation::Auto).unwrap();
        let b = apply_shifted_grunwald(&f, 1.8, 1.0, Truncation::Auto).unwrap();
        assert_eq!(a, b);
    }
}
