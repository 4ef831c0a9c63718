//! Error tables over resolutions with successive ratios and a least-squares
//! order fit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grunwald::{apply_scheme, Domain, GridFunction, Scheme, Truncation};
use crate::oracles::{example1_reference, spectral_fractional_derivative, Example1Reference};
use crate::pde::{
    solve_example1_against, solve_tadjeran, Example1Data, TadjeranScheme, TimeControl,
    EXAMPLE1_ALPHA, EXAMPLE1_FINE_N,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    /// Number of cells (or `1/h`).
    pub resolution: usize,
    pub h: f64,
    pub error: f64,
    /// `error[k-1] / error[k]`; absent in the first row.
    pub ratio: Option<f64>,
    /// `log(ratio) / log(h[k-1] / h[k])`.
    pub local_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Slope of the least-squares line through `(log h, log error)`.
    pub fitted_order: f64,
}

impl ConvergenceTable {
    /// Builds the table from matching `h` and error lists.
    pub fn from_errors(resolutions: &[usize], h: &[f64], errors: &[f64]) -> Result<Self> {
        if resolutions.len() != h.len() || h.len() != errors.len() {
            return Err(Error::InvalidArgument(
                "resolution, h and error lists differ in length".into(),
            ));
        }
        check_resolutions(resolutions)?;
        if let Some(e) = errors.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(Error::NonFinite(format!(
                "error {e} cannot enter a log-log fit"
            )));
        }
        let rows = (0..h.len())
            .map(|k| {
                let (ratio, local_order) = if k == 0 {
                    (None, None)
                } else {
                    let r = errors[k - 1] / errors[k];
                    (Some(r), Some(r.ln() / (h[k - 1] / h[k]).ln()))
                };
                ConvergenceRow {
                    resolution: resolutions[k],
                    h: h[k],
                    error: errors[k],
                    ratio,
                    local_order,
                }
            })
            .collect();
        Ok(Self {
            rows,
            fitted_order: fitted_slope(h, errors),
        })
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.ratio).collect()
    }
}

fn check_resolutions(resolutions: &[usize]) -> Result<()> {
    if resolutions.len() < 3 {
        return Err(Error::InvalidArgument(
            "a convergence study needs at least 3 resolutions".into(),
        ));
    }
    if resolutions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "resolutions must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Least-squares slope of `log e` against `log h`.
pub fn fitted_slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let lx: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Runs `error_at(n)` for each resolution in parallel, with `h = length / n`.
pub fn convergence_study<F>(
    resolutions: &[usize],
    length: f64,
    error_at: F,
) -> Result<ConvergenceTable>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    check_resolutions(resolutions)?;
    let errors: Vec<f64> = resolutions
        .par_iter()
        .map(|&n| error_at(n))
        .collect::<Result<_>>()?;
    let h: Vec<f64> = resolutions.iter().map(|&n| length / n as f64).collect();
    ConvergenceTable::from_errors(resolutions, &h, &errors)
}

/// Max-norm errors of the Tadjeran problem at `t = 1`.
pub fn tadjeran_study(
    kind: TadjeranScheme,
    resolutions: &[usize],
    control: &TimeControl,
) -> Result<ConvergenceTable> {
    convergence_study(resolutions, 1.0, |nx| {
        Ok(solve_tadjeran(kind, nx, control)?.max_error)
    })
}

/// Reference for Example 1 on the nodes `i / n`, `i = 0..n`.
pub fn example1_grid_reference(f: Example1Data, n: usize) -> Result<Example1Reference> {
    let x: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    example1_reference(&f.data(), EXAMPLE1_ALPHA, 1.0, &x, EXAMPLE1_FINE_N)
}

/// L¹ errors of Example 1 at `t = 1`. The reference is computed once on the
/// finest grid, which every other resolution must divide.
pub fn example1_study(
    f: Example1Data,
    scheme_order: usize,
    resolutions: &[usize],
    control: &TimeControl,
    reference: Option<&Example1Reference>,
) -> Result<ConvergenceTable> {
    check_resolutions(resolutions)?;
    let finest = *resolutions.last().expect("checked non-empty");
    let owned;
    let reference = match reference {
        Some(r) => r,
        None => {
            owned = example1_grid_reference(f, finest)?;
            &owned
        }
    };
    convergence_study(resolutions, 1.0, |nx| {
        Ok(solve_example1_against(f, scheme_order, nx, control, reference)?.l1_error)
    })
}

/// Domain half-width and zero-padding factor of the Gaussian consistency study.
pub const CONSISTENCY_HALF_WIDTH: f64 = 8.0;
pub const CONSISTENCY_PAD: usize = 512;

/// `h sum_i |A_h f - D^alpha f|` for `f = exp(-x^2)` sampled on
/// `[-8, 8)`, against the spectral derivative.
pub fn gaussian_consistency_error(scheme: &Scheme, inv_h: usize) -> Result<f64> {
    if inv_h == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let h = 1.0 / inv_h as f64;
    let n = (2.0 * CONSISTENCY_HALF_WIDTH * inv_h as f64) as usize;
    let origin = (CONSISTENCY_HALF_WIDTH * inv_h as f64) as isize;
    let f = GridFunction::from_fn(|x| (-x * x).exp(), n, h, origin, Domain::FullLine)?;
    let approx = apply_scheme(&f, scheme, Truncation::Auto)?;
    let exact = spectral_fractional_derivative(f.samples(), h, scheme.alpha(), CONSISTENCY_PAD)?;
    Ok(h * approx
        .samples()
        .iter()
        .zip(&exact.values)
        .map(|(a, e)| (a - e).abs())
        .sum::<f64>())
}

/// Gaussian consistency study over `h = 1/n` for each `n` in `inv_h`.
pub fn consistency_study(scheme: &Scheme, inv_h: &[usize]) -> Result<ConvergenceTable> {
    convergence_study(inv_h, 1.0, |n| gaussian_consistency_error(scheme, n))
}

/// `[2^lo, ..., 2^hi]`.
pub fn powers_of_two(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}
