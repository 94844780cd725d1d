//! Standard normal CDF, complement, inverse and a two-sided envelope of
//! the upper tail.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Above this argument `ln_phi_c` switches to the asymptotic series.
const ASYMPTOTIC_FROM: f64 = 30.0;

/// Standard normal density.
pub fn phi_density(t: f64) -> f64 {
    (-0.5 * t * t - LN_SQRT_2PI).exp()
}

/// Standard normal CDF.
pub fn phi(t: f64) -> f64 {
    0.5 * libm::erfc(-t * FRAC_1_SQRT_2)
}

/// Upper tail `1 - phi(t)`, accurate in the far tail.
pub fn phi_c(t: f64) -> f64 {
    // erfc loses relative precision once its result is subnormal
    if t > ASYMPTOTIC_FROM {
        return ln_phi_c(t).exp();
    }
    0.5 * libm::erfc(t * FRAC_1_SQRT_2)
}

/// `ln phi_c(t)`, finite for every finite `t`.
pub fn ln_phi_c(t: f64) -> f64 {
    if t < 0.0 {
        return (-phi(t)).ln_1p();
    }
    if t <= ASYMPTOTIC_FROM {
        return (0.5 * libm::erfc(t * FRAC_1_SQRT_2)).ln();
    }
    // phi_c(t) = phi_density(t)/t * Σ (-1)^k (2k-1)!! / t^{2k}
    let inv_t2 = 1.0 / (t * t);
    let mut term = 1.0;
    let mut series = 1.0;
    for k in 1..40 {
        term *= -((2 * k - 1) as f64) * inv_t2;
        series += term;
        if term.abs() < 1e-17 {
            break;
        }
    }
    -0.5 * t * t - LN_SQRT_2PI - t.ln() + series.ln()
}

/// `ln phi(t)`.
pub fn ln_phi(t: f64) -> f64 {
    ln_phi_c(-t)
}

// Acklam's rational approximation; relative error about 1.2e-9 before polishing.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];

fn acklam(p: f64) -> f64 {
    const P_LOW: f64 = 0.024_25;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -acklam(1.0 - p)
    }
}

/// Inverse of `phi` on `(0, 1)`.
pub fn phi_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DomainError(p));
    }
    if p > 0.5 {
        // 1 - p is exact here.
        return Ok(-lower_inverse(1.0 - p));
    }
    Ok(lower_inverse(p))
}

// p <= 1/2: polish Acklam's estimate with Newton steps against phi.
fn lower_inverse(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let mut x = acklam(p);
    for _ in 0..3 {
        let dens = phi_density(x);
        if dens == 0.0 {
            break;
        }
        let step = (phi(x) - p) / dens;
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Bounds `(lo, hi)` with `lo <= phi_c(t) <= hi` for `t >= 0`:
/// `sqrt(2/π) e^{-t²/2} / (t + sqrt(t² + c))` with `c = 4` and `c = 8/π`.
///
/// Scaled through by `sqrt(2π)` so that `hi(0) = 2/4` is exact.
pub fn phi_c_envelope(t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(Error::NegativeArgument(t));
    }
    if t > ASYMPTOTIC_FROM {
        let (lo, hi) = ln_phi_c_envelope(t)?;
        return Ok((lo.exp(), hi.exp()));
    }
    let s = (2.0 * PI).sqrt() * t;
    let num = 2.0 * (-0.5 * t * t).exp();
    let lo = num / (s + (s * s + 8.0 * PI).sqrt());
    let hi = num / (s + (s * s + 16.0).sqrt());
    Ok((lo, hi))
}

/// Logarithms of the `phi_c_envelope` bounds.
pub fn ln_phi_c_envelope(t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(Error::NegativeArgument(t));
    }
    let s = (2.0 * PI).sqrt() * t;
    let ln_num = 2f64.ln() - 0.5 * t * t;
    let lo = ln_num - (s + (s * s + 8.0 * PI).sqrt()).ln();
    let hi = ln_num - (s + (s * s + 16.0).sqrt()).ln();
    Ok((lo, hi))
}
