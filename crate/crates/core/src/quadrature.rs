//! Adaptive bisection on top of tanh-sinh quadrature.

use crate::error::{Error, Result};

const MAX_INTERVALS: usize = 4000;
const INITIAL_PIECES: usize = 4;

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn piece<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let out = quadrature::integrate(f, a, b, 0.0);
    // estimates at the rounding floor count as converged
    let error = if out.error_estimate <= 64.0 * f64::EPSILON * out.integral.abs() {
        0.0
    } else {
        out.error_estimate
    };
    Piece {
        a,
        b,
        value: out.integral,
        error,
    }
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol * |I|)`, repeatedly
/// halving the piece with the largest tanh-sinh error estimate.
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut pieces: Vec<Piece> = (0..INITIAL_PIECES)
        .map(|i| {
            let w = (b - a) / INITIAL_PIECES as f64;
            piece(
                f,
                a + i as f64 * w,
                if i + 1 == INITIAL_PIECES {
                    b
                } else {
                    a + (i + 1) as f64 * w
                },
            )
        })
        .collect();
    loop {
        let total: f64 = pieces.iter().map(|p| p.value).sum();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        if error <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureFailure {
                estimate: total,
                error,
            });
        }
        let worst = (0..pieces.len())
            .max_by(|&i, &j| pieces[i].error.total_cmp(&pieces[j].error))
            .unwrap_or(0);
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return Err(Error::QuadratureFailure {
                estimate: total,
                error,
            });
        }
        pieces.push(piece(f, p.a, mid));
        pieces.push(piece(f, mid, p.b));
    }
}
