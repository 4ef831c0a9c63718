//! Operator norms on `L1` of periodic Fourier multipliers, computed as the
//! `l1` sum of Fourier coefficients.
//!
//! Both `h` and `t` enter the semigroup `e^{t phi_h}` only through
//! `s = t / h^alpha`, so every norm here is evaluated at `h = 1`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grunwald::Scheme;
use crate::symbols::{certify_stability, combined_symbol, SymbolFn};

/// Largest transform size tried by the adaptive routines.
pub const MAX_FFT_SIZE: usize = 1 << 22;
/// Kernels wider than this many cells are evaluated on a dilated grid.
const DIRECT_WIDTH: f64 = 4096.0;
/// Width in cells of a dilated kernel.
const ZOOM_WIDTH: f64 = 1024.0;

/// Coefficients `a_k`, `k = -n/2 .. n/2 - 1`, of `g(x) = sum_k a_k e^{ikx}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCoeffs {
    pub values: Vec<Complex64>,
    pub t: f64,
    pub n: usize,
}

impl FourierCoeffs {
    /// `a_k`, or zero outside the stored band.
    pub fn get(&self, k: isize) -> Complex64 {
        let half = (self.n / 2) as isize;
        if k < -half || k >= half {
            return Complex64::new(0.0, 0.0);
        }
        self.values[(k + half) as usize]
    }

    /// Largest `|a_k|` over the outer eighth of the band on each side.
    pub fn boundary_magnitude(&self) -> f64 {
        let band = (self.n / 16).max(1);
        self.values[..band]
            .iter()
            .chain(&self.values[self.n - band..])
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// `n`-point trapezoidal coefficients. These are the aliased sums
/// `sum_j a_{k + j n}`, i.e. exactly the coefficients of the circulant
/// operator with the same symbol on `n` points.
pub fn fourier_coeffs_n<G>(g: &G, n: usize, t: f64) -> Result<FourierCoeffs>
where
    G: Fn(f64) -> Complex64 + Sync,
{
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "transform size must be a power of two, got {n}"
        )));
    }
    let mut buf: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|j| g(2.0 * PI * j as f64 / n as f64))
        .collect();
    if let Some(bad) = buf.iter().find(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::NonFinite(format!("multiplier sample {bad}")));
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let half = n / 2;
    let values = (0..n).map(|i| buf[(i + half) % n] * scale).collect();
    Ok(FourierCoeffs { values, t, n })
}

/// When to stop doubling the transform size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffTolerance {
    /// Accept once the outer coefficients fall below this.
    pub boundary: f64,
    /// Or once `sum |a_k|` changes by less than this, relative, under doubling.
    pub rel_change: f64,
}

impl Default for CoeffTolerance {
    fn default() -> Self {
        Self {
            boundary: 1e-14,
            rel_change: 1e-10,
        }
    }
}

/// Doubles `n` from `n_start` until `tol` is met.
///
/// Symbols with a `|k|^alpha` cusp have coefficients decaying only like
/// `|k|^(-1-alpha)`, which is why the relative-change test exists.
pub fn periodic_fourier_coeffs<G>(
    g: &G,
    n_start: usize,
    t: f64,
    tol: CoeffTolerance,
) -> Result<FourierCoeffs>
where
    G: Fn(f64) -> Complex64 + Sync,
{
    let mut n = n_start.max(64).next_power_of_two();
    let mut current = fourier_coeffs_n(g, n, t)?;
    if current.boundary_magnitude() < tol.boundary {
        return Ok(current);
    }
    let mut change = f64::INFINITY;
    while n < MAX_FFT_SIZE {
        n *= 2;
        let next = fourier_coeffs_n(g, n, t)?;
        let (a, b) = (l1_multiplier_norm(&current), l1_multiplier_norm(&next));
        change = (b - a).abs() / b.max(f64::MIN_POSITIVE);
        if next.boundary_magnitude() < tol.boundary || change < tol.rel_change {
            return Ok(next);
        }
        current = next;
    }
    Err(Error::NonConvergent { n, change })
}

/// `sum_k |a_k|`, the norm of the multiplier on `L1`.
pub fn l1_multiplier_norm(c: &FourierCoeffs) -> f64 {
    c.values.iter().map(|v| v.norm()).sum()
}

/// `l1` norm of the coefficients of a multiplier whose kernel spreads over
/// roughly `width` cells. Wide kernels are sampled on the dilated variable
/// `u = sigma k`, `sigma = width / 1024`, which turns the coefficient sum into a
/// Riemann sum of the same continuous kernel with step `sigma`.
pub fn kernel_l1_norm<G>(g: &G, width: f64, tol: CoeffTolerance) -> Result<f64>
where
    G: Fn(f64) -> Complex64 + Sync,
{
    if width <= DIRECT_WIDTH {
        let n0 = ((16.0 * width.max(4.0)) as usize).next_power_of_two();
        return periodic_fourier_coeffs(g, n0, 0.0, tol).map(|c| l1_multiplier_norm(&c));
    }
    let sigma = width / ZOOM_WIDTH;
    let zoomed = |u: f64| {
        // u in [0, 2 pi) stands for k = wrap(u) / sigma near the origin
        let uu = if u > PI { u - 2.0 * PI } else { u };
        g(uu / sigma)
    };
    let n0 = (16.0 * ZOOM_WIDTH) as usize;
    periodic_fourier_coeffs(&zoomed, n0, 0.0, tol).map(|c| l1_multiplier_norm(&c))
}

fn kernel_width(alpha: f64, s: f64) -> f64 {
    s.powf(1.0 / alpha).max(1.0)
}

/// `||T_{e^{s phi}}||` for the unit-spacing symbol.
pub fn semigroup_norm(sym: &SymbolFn, s: f64, tol: CoeffTolerance) -> Result<f64> {
    if s == 0.0 {
        return Ok(1.0);
    }
    let unit = sym.with_h(1.0);
    let g = |k: f64| (s * unit.eval(k)).exp();
    kernel_l1_norm(&g, kernel_width(unit.alpha(), s), tol)
}

/// `s ||T_{phi e^{s phi}}||` for the unit-spacing symbol.
pub fn analyticity_product(sym: &SymbolFn, s: f64, tol: CoeffTolerance) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let unit = sym.with_h(1.0);
    let g = |k: f64| {
        let v = unit.eval(k);
        s * v * (s * v).exp()
    };
    kernel_l1_norm(&g, kernel_width(unit.alpha(), s), tol)
}

pub const SEMIGROUP_TOL: CoeffTolerance = CoeffTolerance {
    boundary: 1e-14,
    rel_change: 1e-9,
};
pub const ANALYTICITY_TOL: CoeffTolerance = CoeffTolerance {
    boundary: 1e-14,
    rel_change: 1e-5,
};

/// Spacings with `h^alpha = 1, 1e-1, ..., 1e-5`.
pub fn default_h_grid(alpha: f64) -> Vec<f64> {
    (0..=5).map(|j| 10f64.powf(-(j as f64) / alpha)).collect()
}

/// `count` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Semigroup norms and analyticity products on a `t x h` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormScan {
    pub t_grid: Vec<f64>,
    pub h_grid: Vec<f64>,
    /// `norms[i][j] = ||T_{exp(t_i phi_{h_j})}||`
    pub norms: Vec<Vec<f64>>,
    /// `analyticity_products[i][j] = t_i ||T_{phi_{h_j} exp(t_i phi_{h_j})}||`
    pub analyticity_products: Vec<Vec<f64>>,
}

impl NormScan {
    /// Largest semigroup norm, the measured `K`.
    pub fn k_max(&self) -> f64 {
        self.norms.iter().flatten().cloned().fold(0.0, f64::max)
    }

    /// Largest analyticity product, the measured `M`.
    pub fn m_max(&self) -> f64 {
        self.analyticity_products
            .iter()
            .flatten()
            .cloned()
            .fold(0.0, f64::max)
    }
}

fn check_grids(t_grid: &[f64], h_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() || h_grid.is_empty() {
        return Err(Error::InvalidArgument("empty t or h grid".into()));
    }
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0))
        || h_grid.iter().any(|h| !(h.is_finite() && *h > 0.0))
    {
        return Err(Error::InvalidArgument("t must be >= 0 and h > 0".into()));
    }
    Ok(())
}

fn require_certified(scheme: &Scheme) -> Result<SymbolFn> {
    let sym = combined_symbol(scheme, 1.0);
    let report = certify_stability(&sym, 4096)?;
    if report.sign_change {
        return Err(Error::UnstableSymbol(format!(
            "real part of the symbol changes sign (c = {:.3e})",
            report.c_coercivity
        )));
    }
    Ok(sym)
}

/// Scans `||e^{t phi_h}||` and `t ||phi_h e^{t phi_h}||` for a certified scheme.
pub fn semigroup_norm_scan(scheme: &Scheme, t_grid: &[f64], h_grid: &[f64]) -> Result<NormScan> {
    check_grids(t_grid, h_grid)?;
    let sym = require_certified(scheme)?;
    let alpha = scheme.alpha();
    let cells: Vec<(usize, usize)> = (0..t_grid.len())
        .flat_map(|i| (0..h_grid.len()).map(move |j| (i, j)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(i, j)| {
            let s = t_grid[i] / h_grid[j].powf(alpha);
            Ok((
                semigroup_norm(&sym, s, SEMIGROUP_TOL)?,
                analyticity_product(&sym, s, ANALYTICITY_TOL)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let width = h_grid.len();
    let norms = (0..t_grid.len())
        .map(|i| (0..width).map(|j| results[i * width + j].0).collect())
        .collect();
    let products = (0..t_grid.len())
        .map(|i| (0..width).map(|j| results[i * width + j].1).collect())
        .collect();
    Ok(NormScan {
        t_grid: t_grid.to_vec(),
        h_grid: h_grid.to_vec(),
        norms,
        analyticity_products: products,
    })
}

/// `sup_h t ||phi_h e^{t phi_h}||` as a function of `t`, with its end slopes in log-log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticityScan {
    pub t_grid: Vec<f64>,
    pub h_grid: Vec<f64>,
    /// `products[i][j] = t_i ||phi_{h_j} e^{t_i phi_{h_j}}||`
    pub products: Vec<Vec<f64>>,
    /// `envelope[i] = max_j products[i][j]`
    pub envelope: Vec<f64>,
    pub m_hat: f64,
    pub slope_small_t: f64,
    pub slope_large_t: f64,
}

/// Like the product half of [`semigroup_norm_scan`] but without requiring a
/// stability certificate, so growth of unstable schemes can be observed.
pub fn analyticity_scan(
    scheme: &Scheme,
    t_grid: &[f64],
    h_grid: &[f64],
) -> Result<AnalyticityScan> {
    check_grids(t_grid, h_grid)?;
    if t_grid.len() < 2 {
        return Err(Error::InvalidArgument("need at least two t values".into()));
    }
    let sym = combined_symbol(scheme, 1.0);
    let alpha = scheme.alpha();
    let width = h_grid.len();
    let cells: Vec<(usize, usize)> = (0..t_grid.len())
        .flat_map(|i| (0..width).map(move |j| (i, j)))
        .collect();
    let flat = cells
        .par_iter()
        .map(|&(i, j)| {
            analyticity_product(&sym, t_grid[i] / h_grid[j].powf(alpha), ANALYTICITY_TOL)
        })
        .collect::<Result<Vec<_>>>()?;
    let products: Vec<Vec<f64>> = (0..t_grid.len())
        .map(|i| flat[i * width..(i + 1) * width].to_vec())
        .collect();
    let envelope: Vec<f64> = products
        .iter()
        .map(|row| row.iter().cloned().fold(0.0, f64::max))
        .collect();
    let m_hat = envelope.iter().cloned().fold(0.0, f64::max);
    let slope =
        |a: usize, b: usize| (envelope[b] / envelope[a]).ln() / (t_grid[b] / t_grid[a]).ln();
    let last = t_grid.len() - 1;
    Ok(AnalyticityScan {
        t_grid: t_grid.to_vec(),
        h_grid: h_grid.to_vec(),
        slope_small_t: slope(0, 1),
        slope_large_t: slope(last - 1, last),
        products,
        envelope,
        m_hat,
    })
}

/// The four quantities of the Carlson-type bound
/// `sum |a_k| <= |a_0| + C ||g||_r^(1/s) ||g'||_r^(1/r)`, `1/r + 1/s = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlsonComparison {
    pub lhs: f64,
    pub a0: f64,
    pub norm_g: f64,
    pub norm_gprime: f64,
    pub r: f64,
}

impl CarlsonComparison {
    /// `(lhs - |a_0|) / (||g||^(1/s) ||g'||^(1/r))`; zero when the numerator vanishes.
    pub fn ratio(&self) -> f64 {
        let num = self.lhs - self.a0;
        if num.abs() < 1e-14 {
            return 0.0;
        }
        let s = self.r / (self.r - 1.0);
        num / (self.norm_g.powf(1.0 / s) * self.norm_gprime.powf(1.0 / self.r))
    }
}

fn simpson_lr_norm<G: Fn(f64) -> Complex64 + Sync>(g: &G, r: f64) -> f64 {
    const N: usize = 1 << 16;
    let h = 2.0 * PI / N as f64;
    let sum: f64 = (0..=N)
        .into_par_iter()
        .map(|i| {
            let w = if i == 0 || i == N {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * g(-PI + i as f64 * h).norm().powf(r)
        })
        .sum();
    (sum * h / 3.0).powf(1.0 / r)
}

pub fn carlson_bound_compare<G, D>(g: &G, gprime: &D, r: f64) -> Result<CarlsonComparison>
where
    G: Fn(f64) -> Complex64 + Sync,
    D: Fn(f64) -> Complex64 + Sync,
{
    if !(r > 1.0 && r <= 2.0) {
        return Err(Error::InvalidArgument(format!("need 1 < r <= 2, got {r}")));
    }
    let coeffs = periodic_fourier_coeffs(
        g,
        256,
        0.0,
        CoeffTolerance {
            boundary: 1e-14,
            rel_change: 1e-8,
        },
    )?;
    Ok(CarlsonComparison {
        lhs: l1_multiplier_norm(&coeffs),
        a0: coeffs.get(0).norm(),
        norm_g: simpson_lr_norm(g, r),
        norm_gprime: simpson_lr_norm(gprime, r),
        r,
    })
}

/// First column of the `n`-point circulant matrix of the scheme at `h = 1`.
/// Each term's weights are wrapped modulo `n` up to `terms`; the remainder of
/// the weight sum (which is zero in total) is spread evenly over the residues
/// the term visits.
pub fn circulant_generator(scheme: &Scheme, n: usize, terms: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "circulant size must be at least 2".into(),
        ));
    }
    let alpha = scheme.alpha();
    let sign = scheme.order().sign();
    let mut col = vec![0.0; n];
    for term in scheme.terms() {
        let (c, off) = term.grid_offsets()?;
        let coef = sign * term.weight * (c as f64).powf(-alpha);
        let idx = |m: usize| ((c * m) as i64 - off as i64).rem_euclid(n as i64) as usize;
        // weights by the same recurrence as `grunwald_weights`, streamed
        let mut partial = 0.0;
        let mut wm = 1.0;
        for m in 0..=terms {
            if m > 0 {
                wm *= (m as f64 - 1.0 - alpha) / m as f64;
            }
            col[idx(m)] += coef * wm;
            partial += wm;
        }
        let period = n / gcd(c, n);
        let share = -partial / period as f64;
        for m in terms + 1..=terms + period {
            col[idx(m)] += coef * share;
        }
    }
    Ok(col)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `exp(a)` by Taylor series with scaling and squaring.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);
    let mut result = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        result += &term;
        if term.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Column `l1` norm of `exp(t C)` for the circulant `C` against the `n`-point
/// coefficient sum of `exp(t phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirculantCheck {
    pub n: usize,
    pub t: f64,
    pub matrix_norm: f64,
    pub fourier_norm: f64,
}

pub fn circulant_norm_check(scheme: &Scheme, n: usize, t: f64) -> Result<CirculantCheck> {
    let col = circulant_generator(scheme, n, 1 << 24)?;
    let c = DMatrix::from_fn(n, n, |i, j| col[(i + n - j) % n]);
    let e = expm(&(c * t));
    let matrix_norm = e.column(0).iter().map(|v| v.abs()).sum();
    let sym = combined_symbol(scheme, 1.0);
    let g = |k: f64| (t * sym.eval(k)).exp();
    let fourier_norm = l1_multiplier_norm(&fourier_coeffs_n(&g, n, t)?);
    Ok(CirculantCheck {
        n,
        t,
        matrix_norm,
        fourier_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grunwald::{second_order_scheme, third_order_scheme, FracOrder};

    fn ord(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    #[test]
    fn single_mode_and_constant() {
        let g = |x: f64| Complex64::from_polar(1.0, 3.0 * x);
        let c = periodic_fourier_coeffs(&g, 64, 0.0, CoeffTolerance::default()).unwrap();
        assert!((c.get(3) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        for k in -32..32 {
            if k != 3 {
                assert!(c.get(k).norm() < 1e-14);
            }
        }
        assert!((l1_multiplier_norm(&c) - 1.0).abs() < 1e-13);
        let one = |_: f64| Complex64::new(1.0, 0.0);
        let c = periodic_fourier_coeffs(&one, 64, 0.0, CoeffTolerance::default()).unwrap();
        assert!((c.get(0).re - 1.0).abs() < 1e-15);
        assert!((l1_multiplier_norm(&c) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trigonometric_polynomial_norm_is_exact() {
        let g = |x: f64| {
            Complex64::new(0.5, 0.0)
                + Complex64::from_polar(-0.25, 2.0 * x)
                + Complex64::from_polar(0.125, -5.0 * x)
        };
        let c = periodic_fourier_coeffs(&g, 64, 0.0, CoeffTolerance::default()).unwrap();
        assert!((l1_multiplier_norm(&c) - 0.875).abs() < 1e-13);
    }

    #[test]
    fn optimal_semigroup_is_positive_contraction() {
        let sym = combined_symbol(&Scheme::first_order(ord(1.8)), 1.0);
        let g = |k: f64| sym.eval(k).exp();
        let c = periodic_fourier_coeffs(&g, 64, 1.0, CoeffTolerance::default()).unwrap();
        let sum: Complex64 = c.values.iter().sum();
        assert!((sum - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(c.values.iter().all(|a| a.im.abs() < 1e-12 && a.re > -1e-12));
        for &alpha in &[0.5, 0.8, 1.2, 1.8] {
            let sym = combined_symbol(&Scheme::first_order(ord(alpha)), 1.0);
            for &s in &[1e-3, 1.0, 1e3, 1e6] {
                let v = semigroup_norm(&sym, s, SEMIGROUP_TOL).unwrap();
                assert!((v - 1.0).abs() < 1e-10, "alpha {alpha} s {s}: {v}");
            }
        }
    }

    #[test]
    fn scale_collapse() {
        let scheme = second_order_scheme(ord(0.8)).unwrap();
        let scan = semigroup_norm_scan(&scheme, &[0.5, 0.5 * 2f64.powf(0.8)], &[1.0, 2.0]).unwrap();
        // (t, h) = (0.5, 1) and (0.5 * 2^0.8, 2) share t / h^alpha
        let a = scan.norms[0][0];
        let b = scan.norms[1][1];
        assert!((a - b).abs() <= 1e-10 * a);
        assert!(a > 1.0);
        let scan = semigroup_norm_scan(&scheme, &[0.0], &[1.0]).unwrap();
        assert_eq!(scan.norms[0][0], 1.0);
    }

    #[test]
    fn scaled_symbol_keeps_its_norm() {
        // g(x) and g(2x) have the same coefficient sum
        let sym = combined_symbol(&second_order_scheme(ord(1.8)).unwrap(), 1.0);
        let g1 = |k: f64| (0.7 * sym.eval(k)).exp();
        let g2 = |k: f64| (0.7 * sym.eval(2.0 * k)).exp();
        let tol = CoeffTolerance {
            boundary: 1e-14,
            rel_change: 1e-9,
        };
        let a = l1_multiplier_norm(&periodic_fourier_coeffs(&g1, 64, 0.0, tol).unwrap());
        let b = l1_multiplier_norm(&periodic_fourier_coeffs(&g2, 64, 0.0, tol).unwrap());
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn unstable_scheme_is_refused_then_grows() {
        let scheme = Scheme::shifted(ord(1.8), 2.0);
        assert!(matches!(
            semigroup_norm_scan(&scheme, &[1.0], &[1.0]),
            Err(Error::UnstableSymbol(_))
        ));
        let scan = analyticity_scan(&scheme, &[1.0, 3.0, 10.0], &[1.0]).unwrap();
        assert!(scan.envelope[2] > 10.0 * scan.envelope[1]);
        assert!(scan.slope_large_t > 1.0);
    }

    #[test]
    fn zoomed_and_direct_agree() {
        let sym = combined_symbol(&third_order_scheme(ord(1.8)).unwrap(), 1.0);
        let s = 2000.0;
        let g = |k: f64| {
            let v = sym.eval(k);
            s * v * (s * v).exp()
        };
        let direct = periodic_fourier_coeffs(&g, 8192, 0.0, ANALYTICITY_TOL)
            .map(|c| l1_multiplier_norm(&c))
            .unwrap();
        let sigma = 2.0;
        let zoomed = |u: f64| g(if u > PI { u - 2.0 * PI } else { u } / sigma);
        let z = periodic_fourier_coeffs(&zoomed, 8192, 0.0, ANALYTICITY_TOL)
            .map(|c| l1_multiplier_norm(&c))
            .unwrap();
        assert!((direct - z).abs() < 1e-4 * direct, "{direct} vs {z}");
    }

    #[test]
    fn carlson_examples() {
        let one = |_: f64| Complex64::new(1.0, 0.0);
        let zero = |_: f64| Complex64::new(0.0, 0.0);
        let c = carlson_bound_compare(&one, &zero, 1.5).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-14 && (c.a0 - 1.0).abs() < 1e-14);
        assert_eq!(c.ratio(), 0.0);

        let e = |x: f64| Complex64::from_polar(1.0, x);
        let de = |x: f64| Complex64::i() * Complex64::from_polar(1.0, x);
        let c = carlson_bound_compare(&e, &de, 2.0).unwrap();
        assert!((c.lhs - c.a0 - 1.0).abs() < 1e-13);
        let exact = (2.0 * PI).sqrt();
        assert!((c.norm_g - exact).abs() < 1e-10 && (c.norm_gprime - exact).abs() < 1e-10);
        assert!(carlson_bound_compare(&e, &de, 1.0).is_err());
    }

    #[test]
    fn expm_scalar_and_rotation() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let e = expm(&(a * 3.0));
        assert!((e[(0, 0)] - 3f64.cos()).abs() < 1e-13);
        assert!((e[(1, 0)] - 3f64.sin()).abs() < 1e-13);
        let e = expm(&DMatrix::from_element(1, 1, -20.0));
        assert!((e[(0, 0)] - (-20f64).exp()).abs() < 1e-20);
    }

    #[test]
    fn circulant_generator_matches_weights() {
        let col = circulant_generator(&Scheme::shifted(ord(1.8), 1.0), 1 << 12, 100).unwrap();
        let w = crate::grunwald::grunwald_weights(1.8, 100);
        // weight m sits at index m - 1
        assert!((col[0] - w[1] - (col[200] - 0.0)).abs() < 1e-12);
        assert!((col[(1 << 12) - 1] - w[0] - col[200]).abs() < 1e-12);
        assert!((col[5] - w[6] - col[200]).abs() < 1e-12);
    }

    #[test]
    fn circulant_generator_sums_to_zero() {
        for scheme in [
            Scheme::first_order(ord(0.8)),
            second_order_scheme(ord(1.8)).unwrap(),
        ] {
            let col = circulant_generator(&scheme, 64, 1 << 16).unwrap();
            assert!(col.iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn circulant_routes_agree_for_second_order() {
        let scheme = second_order_scheme(ord(0.8)).unwrap();
        let r = circulant_norm_check(&scheme, 64, 0.5).unwrap();
        assert!(r.fourier_norm > 1.0);
        assert!((r.matrix_norm - r.fourier_norm).abs() < 1e-8, "{r:?}");
    }
}
