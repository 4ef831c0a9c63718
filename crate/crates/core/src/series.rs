//! Truncated power-series arithmetic on coefficient vectors `c[0] + c[1] z + ...`.
//!
//! All routines return exactly `len` coefficients.

/// Cauchy product truncated to `len` terms.
pub fn mul(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (n, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for k in 0..=n {
            if let (Some(x), Some(y)) = (a.get(k), b.get(n - k)) {
                acc += x * y;
            }
        }
        *slot = acc;
    }
    out
}

/// Real power `a^p` of a series with nonzero constant term, via the
/// J. C. P. Miller recurrence `n a_0 v_n = sum_{k=1}^n ((p + 1) k - n) a_k v_{n-k}`.
///
/// The constant term of the result is `a_0^p` (principal branch, so `a_0 > 0`
/// is required for non-integer `p`).
pub fn pow(a: &[f64], p: f64, len: usize) -> Vec<f64> {
    assert!(
        !a.is_empty() && a[0] != 0.0,
        "series power needs a nonzero constant term"
    );
    let mut v = vec![0.0; len];
    if len == 0 {
        return v;
    }
    v[0] = a[0].powf(p);
    for n in 1..len {
        let mut acc = 0.0;
        for k in 1..=n.min(a.len() - 1) {
            acc += ((p + 1.0) * k as f64 - n as f64) * a[k] * v[n - k];
        }
        v[n] = acc / (n as f64 * a[0]);
    }
    v
}

/// `exp(a(z))` via `n b_n = sum_{k=1}^n k a_k b_{n-k}`.
pub fn exp(a: &[f64], len: usize) -> Vec<f64> {
    let mut b = vec![0.0; len];
    if len == 0 {
        return b;
    }
    b[0] = a.first().copied().unwrap_or(0.0).exp();
    for n in 1..len {
        let mut acc = 0.0;
        for k in 1..=n.min(a.len().saturating_sub(1)) {
            acc += k as f64 * a[k] * b[n - k];
        }
        b[n] = acc / n as f64;
    }
    b
}

/// Coefficients of `exp(p z)`.
pub fn exp_linear(p: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut term = 1.0;
    for n in 0..len {
        out.push(term);
        term *= p / (n + 1) as f64;
    }
    out
}

/// Coefficients of `(1 - e^{-z}) / z = sum_n (-1)^n z^n / (n+1)!`.
pub fn one_minus_exp_over_z(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut fact = 1.0;
    for n in 0..len {
        fact *= (n + 1) as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        out.push(sign / fact);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_matches_binomial_series() {
        // (1 + z)^0.5
        let v = pow(&[1.0, 1.0], 0.5, 5);
        let expect = [1.0, 0.5, -0.125, 0.0625, -0.0390625];
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn exp_of_log_series_is_identity() {
        // log(1 + z) = z - z^2/2 + z^3/3 - ...
        let log: Vec<f64> = (0..8)
            .map(|n| {
                if n == 0 {
                    0.0
                } else {
                    (-1f64).powi(n as i32 + 1) / n as f64
                }
            })
            .collect();
        let e = exp(&log, 8);
        assert!((e[0] - 1.0).abs() < 1e-15);
        assert!((e[1] - 1.0).abs() < 1e-15);
        for c in &e[2..] {
            assert!(c.abs() < 1e-14);
        }
    }

    #[test]
    fn product_of_exponentials() {
        let a = exp_linear(0.3, 6);
        let b = exp_linear(0.7, 6);
        let ab = mul(&a, &b, 6);
        let c = exp_linear(1.0, 6);
        for (x, y) in ab.iter().zip(&c) {
            assert!((x - y).abs() < 1e-15);
        }
    }
}
