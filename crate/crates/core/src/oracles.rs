//! Reference solutions that do not depend on the Grünwald machinery:
//! one-sided stable densities, the exact Example-1 convolution, a spectral
//! fractional derivative and closed forms for power functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::quadrature;

const DENSITY_RTOL: f64 = 1e-11;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::UnsupportedOrder(
            alpha,
            "one-sided stable densities need 0 < alpha < 1".into(),
        ));
    }
    Ok(())
}

/// Density at `x` of the one-sided stable law with Laplace transform `exp(-t s^alpha)`.
pub fn stable_density(alpha: f64, t: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time must be positive, got {t}"
        )));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let scale = t.powf(-1.0 / alpha);
    Ok(scale * unit_density(alpha, x * scale)?)
}

fn unit_density(alpha: f64, x: f64) -> Result<f64> {
    if x.powf(-alpha) <= 0.5 {
        Ok(density_series(alpha, x))
    } else {
        density_integral(alpha, x)
    }
}

/// `(1/pi) sum_k (-1)^(k+1) Gamma(k alpha + 1) / k! sin(k pi alpha) x^(-k alpha - 1)`.
fn density_series(alpha: f64, x: f64) -> f64 {
    let lz = -alpha * x.ln();
    let mut sum = 0.0;
    for k in 1..400 {
        let kf = k as f64;
        let mag = (ln_gamma(kf * alpha + 1.0) - ln_gamma(kf + 1.0) + kf * lz).exp();
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * mag * (kf * PI * alpha).sin();
        if mag < 1e-18 * sum.abs() {
            break;
        }
    }
    sum / (PI * x)
}

/// Mass of the unit density beyond `x`, from the termwise-integrated series.
fn tail_mass(alpha: f64, x: f64) -> f64 {
    let lz = -alpha * x.ln();
    let mut sum = 0.0;
    for k in 1..400 {
        let kf = k as f64;
        let mag = (ln_gamma(kf * alpha + 1.0) - ln_gamma(kf + 1.0) + kf * lz).exp() / (kf * alpha);
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * mag * (kf * PI * alpha).sin();
        if mag < 1e-18 * sum.abs() {
            break;
        }
    }
    sum / PI
}

/// `[sin(alpha phi)^alpha sin((1-alpha) phi)^(1-alpha) / sin(phi)]^(1/(1-alpha))`.
fn zolotarev_a(alpha: f64, phi: f64) -> f64 {
    let e = 1.0 / (1.0 - alpha);
    if phi < 1e-9 {
        return (alpha.powf(alpha) * (1.0 - alpha).powf(1.0 - alpha)).powf(e);
    }
    ((alpha * phi).sin().powf(alpha) * ((1.0 - alpha) * phi).sin().powf(1.0 - alpha) / phi.sin())
        .powf(e)
}

fn density_integral(alpha: f64, x: f64) -> Result<f64> {
    let e = 1.0 / (1.0 - alpha);
    let eps = x.powf(-alpha * e);
    let a0 = zolotarev_a(alpha, 0.0);
    if eps * a0 > 745.0 {
        // below the smallest subnormal
        return Ok(0.0);
    }
    let integrand = |phi: f64| {
        let a = zolotarev_a(alpha, phi);
        let arg = eps * (a - a0);
        if !a.is_finite() || arg > 740.0 {
            0.0
        } else {
            a * (-arg).exp()
        }
    };
    let integral = quadrature::integrate(&integrand, 0.0, PI, DENSITY_RTOL, 0.0)?;
    Ok(alpha * e / PI * x.powf(-e) * (-eps * a0).exp() * integral)
}

/// Total mass of the unit-time density, integrated numerically up to `4^(1/alpha)`
/// on dyadic pieces and completed with the series tail.
pub fn stable_total_mass(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let cut = 4f64.powf(1.0 / alpha);
    let mut mass = 0.0;
    let mut hi = cut;
    for _ in 0..80 {
        let lo = hi / 2.0;
        let f = |x: f64| unit_density(alpha, x).unwrap_or(f64::NAN);
        mass += quadrature::integrate(&f, lo, hi, 1e-12, 1e-18)?;
        hi = lo;
    }
    Ok(mass + tail_mass(alpha, cut))
}

/// Stable density sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableDensityTable {
    pub alpha: f64,
    pub t: f64,
    pub x_grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl StableDensityTable {
    pub fn new(alpha: f64, t: f64, x_grid: Vec<f64>) -> Result<Self> {
        let values = x_grid
            .par_iter()
            .map(|&x| stable_density(alpha, t, x))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            alpha,
            t,
            x_grid,
            values,
        })
    }

    /// Trapezoid mass on the grid.
    pub fn trapezoid_mass(&self) -> f64 {
        self.x_grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
            .sum()
    }
}

/// Initial data `sum_i c_i x^(beta_i)` on `[0, 1]`, zero for `x < 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerData {
    pub terms: Vec<(f64, f64)>,
}

impl PowerData {
    pub fn power(beta: f64) -> Self {
        Self {
            terms: vec![(1.0, beta)],
        }
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.terms.iter().map(|&(c, b)| c * x.powf(b)).sum()
    }

    /// Average over `[a, b]` with `0 <= a < b`.
    pub fn cell_average(&self, a: f64, b: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, beta)| c * (b.powf(beta + 1.0) - a.powf(beta + 1.0)) / (beta + 1.0))
            .sum::<f64>()
            / (b - a)
    }
}

/// Exact solution of the Example-1 evolution at time `t`, together with the
/// largest change observed when the density grid is refined once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1Reference {
    pub alpha: f64,
    pub t: f64,
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    pub fine_n: usize,
    pub self_error: f64,
}

/// Nodes in the scaled variable `y = s t^(-1/alpha)`: `fine_n` uniform cells on
/// `[0, min(ymax, 2)]`, then geometric cells up to `ymax`.
fn density_nodes(ymax: f64, fine_n: usize) -> Vec<f64> {
    let y0 = ymax.min(2.0);
    let mut nodes: Vec<f64> = (0..=fine_n)
        .map(|i| y0 * i as f64 / fine_n as f64)
        .collect();
    let ratio = 1.0 + 2.0 / fine_n as f64;
    let mut y = y0;
    while y < ymax {
        y = (y * ratio).min(ymax);
        nodes.push(y);
    }
    nodes
}

/// `int_0^x g_alpha(t, s) f(x - s) ds` for each `x` in `x_eval`, with `f` a
/// [`PowerData`]. The density is piecewise linear on a fine grid and the
/// powers of `x - s` are integrated exactly on each cell.
pub fn exact_solution_example1(
    f: &PowerData,
    alpha: f64,
    t: f64,
    x_eval: &[f64],
    fine_n: usize,
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    if fine_n < 2 {
        return Err(Error::InvalidArgument(
            "fine grid needs at least two cells".into(),
        ));
    }
    if f.terms.is_empty() {
        return Ok(vec![0.0; x_eval.len()]);
    }
    let tau = t.powf(1.0 / alpha);
    let xmax = x_eval.iter().cloned().fold(0.0, f64::max);
    if xmax <= 0.0 {
        return Ok(vec![0.0; x_eval.len()]);
    }
    let nodes = density_nodes(xmax / tau, fine_n);
    let g: Vec<f64> = nodes
        .par_iter()
        .map(|&y| stable_density(alpha, 1.0, y))
        .collect::<Result<_>>()?;
    Ok(x_eval
        .par_iter()
        .map(|&x| {
            f.terms
                .iter()
                .map(|&(c, beta)| c * tau.powf(beta) * product_integral(&nodes, &g, x / tau, beta))
                .sum()
        })
        .collect())
}

/// `int_0^X g(y) (X - y)^beta dy` with `g` linear between nodes.
fn product_integral(nodes: &[f64], g: &[f64], xx: f64, beta: f64) -> f64 {
    if xx <= 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for j in 0..nodes.len() - 1 {
        let ya = nodes[j];
        if ya >= xx {
            break;
        }
        let slope = (g[j + 1] - g[j]) / (nodes[j + 1] - ya);
        let (m0, m1) = cell_moments(xx - ya, nodes[j + 1].min(xx) - ya, beta);
        total += g[j] * m0 + slope * m1;
    }
    total
}

/// `(int_0^w (d - u)^beta du, int_0^w u (d - u)^beta du)` for `0 < w <= d`,
/// by binomial series when `w / d` is small so that nothing cancels.
fn cell_moments(d: f64, w: f64, beta: f64) -> (f64, f64) {
    let r = w / d;
    if r < 0.5 {
        let (mut s0, mut s1) = (0.0, 0.0);
        let mut c = 1.0;
        let mut rk = 1.0;
        for k in 0..200 {
            let kf = k as f64;
            let t = c * rk;
            s0 += t / (kf + 1.0);
            s1 += t / (kf + 2.0);
            if t.abs() < 1e-17 * s0.abs() {
                break;
            }
            c *= (beta - kf) / (kf + 1.0);
            rk *= -r;
        }
        let db = d.powf(beta);
        (db * w * s0, db * w * w * s1)
    } else {
        let (b1, b2) = (beta + 1.0, beta + 2.0);
        let e = d - w;
        let m0 = (d.powf(b1) - e.powf(b1)) / b1;
        let j1 = (d.powf(b2) - e.powf(b2)) / b2;
        (m0, d * m0 - j1)
    }
}

/// [`exact_solution_example1`] at `fine_n` and `2 fine_n`; returns the finer
/// values and the largest difference between the two.
pub fn example1_reference(
    f: &PowerData,
    alpha: f64,
    t: f64,
    x_eval: &[f64],
    fine_n: usize,
) -> Result<Example1Reference> {
    let coarse = exact_solution_example1(f, alpha, t, x_eval, fine_n)?;
    let fine = exact_solution_example1(f, alpha, t, x_eval, 2 * fine_n)?;
    let self_error = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Example1Reference {
        alpha,
        t,
        x: x_eval.to_vec(),
        values: fine,
        fine_n: 2 * fine_n,
        self_error,
    })
}

/// Fractional derivative of samples on a uniform full-line grid through the
/// multiplier `(i xi)^alpha` (principal branch), after zero padding the input
/// to `pad` times its length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDerivative {
    pub values: Vec<f64>,
    /// Largest imaginary part discarded after the inverse transform.
    pub imag_residue: f64,
}

pub fn spectral_fractional_derivative(
    samples: &[f64],
    h: f64,
    alpha: f64,
    pad: usize,
) -> Result<SpectralDerivative> {
    if samples.len() < 2 || !(h > 0.0) || !(alpha >= 0.0) || pad < 1 {
        return Err(Error::InvalidArgument(
            "spectral derivative needs n >= 2, h > 0, alpha >= 0, pad >= 1".into(),
        ));
    }
    let edge = samples[0].abs().max(samples[samples.len() - 1].abs());
    if edge > 1e-14 {
        return Err(Error::InsufficientDecay(edge));
    }
    let n = (samples.len() * pad).next_power_of_two();
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(n, Complex64::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let nf = n as f64;
    for (j, c) in buf.iter_mut().enumerate() {
        let m = if j <= n / 2 { j as f64 } else { j as f64 - nf };
        if m == 0.0 {
            *c = if alpha == 0.0 {
                *c
            } else {
                Complex64::new(0.0, 0.0)
            };
            continue;
        }
        let xi = 2.0 * PI * m / (nf * h);
        let mult = Complex64::from_polar(xi.abs().powf(alpha), 0.5 * PI * alpha * xi.signum());
        *c *= mult / nf;
    }
    // the Nyquist mode has no conjugate partner
    if n % 2 == 0 && alpha != 0.0 {
        buf[n / 2] = Complex64::new(buf[n / 2].re, 0.0);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let values: Vec<f64> = buf[..samples.len()].iter().map(|c| c.re).collect();
    let imag_residue = buf[..samples.len()]
        .iter()
        .map(|c| c.im.abs())
        .fold(0.0, f64::max);
    Ok(SpectralDerivative {
        values,
        imag_residue,
    })
}

/// `Gamma(mu+1) / Gamma(mu+1-alpha) x^(mu-alpha)`, the left-sided fractional
/// derivative of `x^mu`; zero where `1/Gamma(mu+1-alpha)` vanishes.
pub fn rl_derivative_power(mu: f64, alpha: f64, x: f64) -> f64 {
    let d = mu + 1.0 - alpha;
    if d <= 0.0 && d.fract() == 0.0 {
        return 0.0;
    }
    gamma(mu + 1.0) / gamma(d) * x.powf(mu - alpha)
}

/// `e^-t x^3`.
pub fn tadjeran_exact(x: f64, t: f64) -> f64 {
    (-t).exp() * x * x * x
}

/// `Gamma(2.2) / 6 * x^2.8`.
pub fn tadjeran_coefficient(x: f64) -> f64 {
    gamma(2.2) / 6.0 * x.powf(2.8)
}

/// `-(1 + x) e^-t x^3`.
pub fn tadjeran_source(x: f64, t: f64) -> f64 {
    -(1.0 + x) * (-t).exp() * x * x * x
}

/// `u_t - d(x) D^1.8 u - s(x, t)` for the exact solution.
pub fn tadjeran_residual(x: f64, t: f64) -> f64 {
    let ut = -tadjeran_exact(x, t);
    let frac = (-t).exp() * rl_derivative_power(3.0, 1.8, x);
    ut - tadjeran_coefficient(x) * frac - tadjeran_source(x, t)
}
