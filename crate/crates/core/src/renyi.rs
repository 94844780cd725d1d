//! Rényi-type quantities of orders in `[0, 1]` and the exponent-domain upper
//! bound on `ln β_{1-e^{-r}}`:
//!
//! `ln β <= inf_{0<s<1} -D_s(P||Q) - s/(s-1) r + h_b(s)/(s-1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{binary_entropy, golden_section_max, log_sum_exp};
use crate::spectrum::DiscretePair;

/// Edge of the open search interval for the order `s`.
pub const ORDER_MARGIN: f64 = 1e-6;
const ORDER_TOL: f64 = 1e-10;
const CHECK_POINTS: usize = 101;
const FALLBACK_STEP: f64 = 1e-4;

/// One point of the order sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenyiCurve {
    pub s: f64,
    pub g_s: f64,
    pub d_s: f64,
    pub bound_value: f64,
}

/// `g_s(P, Q) = ln Σ P(w)^s Q(w)^{1-s}` for `s` in `[0, 1]`.
///
/// Outcomes where either mass vanishes drop out. The endpoints are the
/// one-sided limits, `g_0 = ln Q{P > 0}` and `g_1 = ln P{Q > 0}`.
pub fn g_s(pair: &DiscretePair, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OrderOutOfRange(s));
    }
    let terms: Vec<f64> = pair
        .p()
        .iter()
        .zip(pair.q())
        .filter(|&(&p, &q)| p > 0.0 && q > 0.0)
        .map(|(&p, &q)| {
            if s == 0.0 {
                q.ln()
            } else if s == 1.0 {
                p.ln()
            } else {
                s * p.ln() + (1.0 - s) * q.ln()
            }
        })
        .collect();
    Ok(log_sum_exp(&terms))
}

/// `D_s(P||Q) = g_s / (s - 1)` for `s` in `(0, 1)`; `+inf` for disjoint
/// supports.
pub fn renyi_divergence(pair: &DiscretePair, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::OrderOutOfRange(s));
    }
    let g = g_s(pair, s)?;
    if g == f64::NEG_INFINITY {
        return Ok(f64::INFINITY);
    }
    // g_s <= 0 exactly; rounding can leave a positive residue of a few ulps.
    Ok((g / (s - 1.0)).max(0.0))
}

/// `-D_s - s/(s-1) r + h_b(s)/(s-1)`, in nats.
pub fn beta_bound_at_s(pair: &DiscretePair, r: f64, s: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::OutOfRange(format!("r must be >= 0, got {r}")));
    }
    let d = renyi_divergence(pair, s)?;
    if d == f64::INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(-d - s / (s - 1.0) * r + binary_entropy(s) / (s - 1.0))
}

/// Full sweep point at order `s`.
pub fn renyi_curve(pair: &DiscretePair, r: f64, s: f64) -> Result<RenyiCurve> {
    Ok(RenyiCurve {
        s,
        g_s: g_s(pair, s)?,
        d_s: renyi_divergence(pair, s)?,
        bound_value: beta_bound_at_s(pair, r, s)?,
    })
}

/// Minimum of [`beta_bound_at_s`] over `s` in `(δ, 1-δ)`, `δ = 1e-6`.
/// Returns `(bound, s*)`.
///
/// Golden-section search, checked against a coarse grid; if the grid finds
/// a lower value the body is not unimodal here and a fine grid scan with
/// local refinement takes over.
pub fn beta_bound(pair: &DiscretePair, r: f64) -> Result<(f64, f64)> {
    if !(r >= 0.0) {
        return Err(Error::OutOfRange(format!("r must be >= 0, got {r}")));
    }
    let body = |s: f64| beta_bound_at_s(pair, r, s).unwrap_or(f64::INFINITY);
    if body(0.5) == f64::NEG_INFINITY {
        return Ok((f64::NEG_INFINITY, 0.5));
    }
    let (lo, hi) = (ORDER_MARGIN, 1.0 - ORDER_MARGIN);
    let (s_star, neg) = golden_section_max(|s| -body(s), lo, hi, ORDER_TOL);
    let mut best = (-neg, s_star);

    let step = (hi - lo) / (CHECK_POINTS - 1) as f64;
    let unimodal = (0..CHECK_POINTS).all(|i| body(lo + i as f64 * step) >= best.0 - 1e-12 * best.0.abs().max(1.0));
    if !unimodal {
        let mut s = lo;
        while s <= hi {
            let v = body(s);
            if v < best.0 {
                best = (v, s);
            }
            s += FALLBACK_STEP;
        }
        let a = (best.1 - FALLBACK_STEP).max(lo);
        let b = (best.1 + FALLBACK_STEP).min(hi);
        let (s_ref, neg_ref) = golden_section_max(|s| -body(s), a, b, ORDER_TOL);
        if -neg_ref < best.0 {
            best = (-neg_ref, s_ref);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(p: &[f64], q: &[f64]) -> DiscretePair {
        DiscretePair::from_masses(p.to_vec(), q.to_vec()).unwrap()
    }

    #[test]
    fn bhattacharyya() {
        let pq = pair(&[0.5, 0.5], &[0.9, 0.1]);
        let expect = (0.45f64.sqrt() + 0.05f64.sqrt()).ln();
        assert!((g_s(&pq, 0.5).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn identical_pair_is_zero() {
        let pq = pair(&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5]);
        for s in [0.0, 0.1, 0.5, 0.9, 1.0] {
            assert!(g_s(&pq, s).unwrap().abs() < 1e-15);
        }
        assert_eq!(renyi_divergence(&pq, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn endpoints_follow_supports() {
        // P has an outcome Q misses, and Q one that P misses.
        let pq = pair(&[0.5, 0.5, 0.0], &[0.0, 0.6, 0.4]);
        assert!((g_s(&pq, 0.0).unwrap() - 0.6f64.ln()).abs() < 1e-15);
        assert!((g_s(&pq, 1.0).unwrap() - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn order_out_of_range() {
        let pq = pair(&[0.5, 0.5], &[0.9, 0.1]);
        assert!(matches!(g_s(&pq, 1.5), Err(Error::OrderOutOfRange(_))));
        assert!(matches!(g_s(&pq, f64::NAN), Err(Error::OrderOutOfRange(_))));
        assert!(matches!(renyi_divergence(&pq, 1.0), Err(Error::OrderOutOfRange(_))));
        assert!(matches!(renyi_divergence(&pq, 0.0), Err(Error::OrderOutOfRange(_))));
    }

    #[test]
    fn disjoint_supports() {
        let pq = pair(&[1.0, 0.0], &[0.0, 1.0]);
        assert_eq!(g_s(&pq, 0.5).unwrap(), f64::NEG_INFINITY);
        assert_eq!(renyi_divergence(&pq, 0.5).unwrap(), f64::INFINITY);
        assert_eq!(beta_bound(&pq, 1.0).unwrap().0, f64::NEG_INFINITY);
    }

    #[test]
    fn half_order_form() {
        let pq = pair(&[0.5, 0.5], &[0.9, 0.1]);
        let r = 0.7;
        let d = renyi_divergence(&pq, 0.5).unwrap();
        let expect = -d + r - 2.0 * 2f64.ln();
        assert!((beta_bound_at_s(&pq, r, 0.5).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn divergence_nondecreasing_in_order() {
        let pq = pair(&[0.1, 0.6, 0.3], &[0.5, 0.2, 0.3]);
        let mut prev = 0.0;
        for i in 1..1000 {
            let d = renyi_divergence(&pq, i as f64 / 1000.0).unwrap();
            assert!(d.is_finite() && d >= prev - 1e-15);
            prev = d;
        }
    }

    #[test]
    fn g_is_convex() {
        let pq = pair(&[0.1, 0.6, 0.3, 0.0], &[0.5, 0.2, 0.1, 0.2]);
        for i in 1..99 {
            let (a, b) = (i as f64 / 100.0, (i + 2) as f64 / 100.0);
            let mid = g_s(&pq, 0.5 * (a + b)).unwrap();
            let chord = 0.5 * (g_s(&pq, a).unwrap() + g_s(&pq, b).unwrap());
            assert!(mid <= chord + 1e-15);
        }
    }

    #[test]
    fn minimum_beats_samples() {
        let pq = pair(&[0.5, 0.5], &[0.9, 0.1]);
        for r in [0.0, 0.1, 0.5, 1.0, 2.0] {
            let (b, s_star) = beta_bound(&pq, r).unwrap();
            assert!(s_star > 0.0 && s_star < 1.0);
            for i in 1..200 {
                let v = beta_bound_at_s(&pq, r, i as f64 / 200.0).unwrap();
                assert!(b <= v + 1e-12, "r = {r}");
            }
        }
    }

    #[test]
    fn identical_pair_dominates_exact() {
        let pq = pair(&[0.25, 0.75], &[0.25, 0.75]);
        for r in [0.1, 2f64.ln(), 1.0, 3.0] {
            let (b, _) = beta_bound(&pq, r).unwrap();
            assert!(b >= (-(-r).exp()).ln_1p() - 1e-12);
        }
    }

    #[test]
    fn curve_point() {
        let pq = pair(&[0.5, 0.5], &[0.9, 0.1]);
        let c = renyi_curve(&pq, 0.5, 0.3).unwrap();
        assert!(c.g_s <= 0.0 && c.d_s >= 0.0);
        assert!((c.d_s - c.g_s / (0.3 - 1.0)).abs() < 1e-15);
    }
}
