//! Real-argument Mittag-Leffler functions `E_α(z)` and `E_{α,α}(z)`.
//!
//! Three regimes:
//! - power series `Σ z^k/Γ(αk+β)` for `z ≥ -10`, as long as the largest term does
//!   not swamp the sum;
//! - the algebraic asymptotic expansion `-Σ_{k≥1} z^{-k}/Γ(β-αk)` for `z < -10`,
//!   truncated at its smallest term;
//! - otherwise the Laplace-type integral
//!   `E_α(-x) = sin(απ)/(2απ) ∫ exp(-(x e^w)^{1/α}) / (cosh w + cos απ) dw`
//!   (and its `x`-derivative for `E_{α,α}`), summed with the trapezoidal rule,
//!   which converges geometrically for this analytic integrand.

use std::f64::consts::PI;

use libm::{lgamma as ln_gamma, tgamma as gamma};

use crate::error::{domain, numeric, Result};

const MAX_TERMS: usize = 10_000;
const SERIES_SWITCH: f64 = -10.0;

#[derive(Clone, Copy, PartialEq)]
enum Second {
    One,
    Alpha,
}

/// `E_α(z) = Σ_k z^k / Γ(αk + 1)` for `α ∈ (0,1]` and real `z`.
pub fn mittag_leffler(alpha: f64, z: f64) -> Result<f64> {
    evaluate(alpha, Second::One, z)
}

/// `E_{α,α}(z) = α·E_α'(z)`; used for the density of the resolvent mollifier.
pub(crate) fn mittag_leffler_alpha_alpha(alpha: f64, z: f64) -> Result<f64> {
    evaluate(alpha, Second::Alpha, z)
}

fn evaluate(alpha: f64, second: Second, z: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!(
            "Mittag-Leffler order {alpha} must lie in (0,1]"
        )));
    }
    if !z.is_finite() {
        return Err(domain(format!("Mittag-Leffler argument {z} is not finite")));
    }
    let beta = match second {
        Second::One => 1.0,
        Second::Alpha => alpha,
    };
    if z == 0.0 {
        return Ok(1.0 / gamma(beta));
    }
    if alpha == 1.0 {
        return Ok(z.exp());
    }
    if z > 0.0 {
        return series(alpha, beta, z).map(|(sum, _)| sum);
    }
    if z >= SERIES_SWITCH {
        // cancellation costs log10(largest/|sum|) digits
        if let Ok((sum, largest)) = series(alpha, beta, z) {
            if largest <= 1e3 * sum.abs() {
                return Ok(sum);
            }
        }
    } else if let Some(sum) = asymptotic(alpha, beta, z) {
        return Ok(sum);
    }
    Ok(integral(alpha, second, -z))
}

/// Partial sums with term-ratio stopping; also returns the largest term.
fn series(alpha: f64, beta: f64, z: f64) -> Result<(f64, f64)> {
    let log_abs_z = z.abs().ln();
    let mut sum = 0.0;
    let mut largest: f64 = 0.0;
    let mut previous = f64::INFINITY;
    for k in 0..MAX_TERMS {
        let magnitude = (k as f64 * log_abs_z - ln_gamma(alpha * k as f64 + beta)).exp();
        let term = if z < 0.0 && k % 2 == 1 {
            -magnitude
        } else {
            magnitude
        };
        sum += term;
        largest = largest.max(magnitude);
        if !sum.is_finite() {
            return Err(numeric(format!(
                "Mittag-Leffler series overflows at z = {z}"
            )));
        }
        if k > 0 && magnitude < previous && magnitude < 1e-15 * sum.abs() {
            return Ok((sum, largest));
        }
        previous = magnitude;
    }
    Err(numeric(format!(
        "Mittag-Leffler series did not converge within {MAX_TERMS} terms (alpha = {alpha}, z = {z})"
    )))
}

/// Reciprocal gamma function on the whole real line (zero at the poles).
pub(crate) fn recip_gamma(x: f64) -> f64 {
    if x > 0.0 {
        1.0 / gamma(x)
    } else if x == x.floor() {
        0.0
    } else {
        gamma(1.0 - x) * (PI * x).sin() / PI
    }
}

/// Optimally truncated expansion; `None` when it cannot reach full precision.
fn asymptotic(alpha: f64, beta: f64, z: f64) -> Option<f64> {
    let mut sum = 0.0;
    let mut previous = f64::INFINITY;
    for k in 1..=400 {
        let arg = beta - alpha * k as f64;
        // poles of Γ contribute nothing
        if arg <= 0.0 && (arg - arg.round()).abs() < 1e-12 {
            continue;
        }
        let term = -recip_gamma(arg) * z.powi(-k);
        let magnitude = term.abs();
        if !magnitude.is_finite() || magnitude > previous {
            break;
        }
        sum += term;
        previous = magnitude;
        if magnitude < 1e-16 * sum.abs() {
            return Some(sum);
        }
    }
    (previous < 1e-14 * sum.abs()).then_some(sum)
}

/// Trapezoidal sum of the integral representation at `z = -x`, `x > 0`.
fn integral(alpha: f64, second: Second, x: f64) -> f64 {
    // Half-width of the strip of analyticity: poles of 1/(cosh w + cos απ) at
    // |Im w| = π(1-α), and exp(-(x e^w)^{1/α}) stops decaying at |Im w| = απ/2.
    let strip = 0.8 * (0.5 * alpha * PI).min(PI * (1.0 - alpha));
    let h = 2.0 * PI * strip / 38.0;
    let upper = alpha * 50f64.ln() - x.ln();
    let lower = upper.min(0.0) - 40.0;
    let count = ((upper - lower) / h).ceil() as usize;
    let h = (upper - lower) / count as f64;
    let cos_ap = (alpha * PI).cos();
    let sum: f64 = (0..=count)
        .map(|i| {
            let w = lower + i as f64 * h;
            let y = (x.ln() + w) / alpha;
            let y = y.exp();
            let weight = if i == 0 || i == count { 0.5 } else { 1.0 };
            let base = (-y).exp() / (w.cosh() + cos_ap);
            weight
                * match second {
                    Second::One => base,
                    Second::Alpha => base * y / x,
                }
        })
        .sum();
    (alpha * PI).sin() / (2.0 * alpha * PI) * h * sum
}
