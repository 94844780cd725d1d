//! Distribution pairs and their log-likelihood-ratio spectrum.
//!
//! Every power computation in this crate runs on the distribution of
//! `L(w) = ln(P(w)/Q(w))` under `P`. Outcomes with `Q(w) = 0` carry `L = +inf`
//! and are pooled into `p_inf`; outcomes with `P(w) = 0` never enter the
//! distribution of `L` under `P` and are pooled into `q_orphan`. The Q-mass of
//! a finite atom is recovered as `p * e^{-z}`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussianModel;
use crate::normal::phi;
use crate::numeric::{log_add_exp, log_sum_exp};

/// Tolerance on input sums; inputs off by less are renormalized.
pub const INPUT_SUM_TOLERANCE: f64 = 1e-9;
/// Tolerance on `Σ p + p_inf = 1` for a spectrum.
pub const P_SUM_TOLERANCE: f64 = 1e-12;
/// Tolerance on `Σ p e^{-z} + q_orphan = 1` for a spectrum.
pub const Q_SUM_TOLERANCE: f64 = 1e-9;
/// Relative tolerance under which two log-likelihood values are one atom.
pub const MERGE_TOLERANCE: f64 = 1e-14;
/// Default cap on the number of atoms a product may hold.
pub const DEFAULT_ATOM_CAP: usize = 10_000_000;

/// A validated pair of probability mass functions on a shared finite support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePair {
    support: Vec<String>,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl DiscretePair {
    pub fn support(&self) -> &[String] {
        &self.support
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Builds a pair with generated labels `w0, w1, ...`.
    pub fn from_masses(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        let support = (0..p.len()).map(|i| format!("w{i}")).collect();
        validate_pair(support, p, q)
    }
}

fn check_masses(which: &'static str, masses: &mut [f64]) -> Result<()> {
    for (index, &value) in masses.iter().enumerate() {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::NegativeMass { which, index, value });
        }
    }
    let sum: f64 = masses.iter().sum();
    if (sum - 1.0).abs() > INPUT_SUM_TOLERANCE {
        return Err(Error::NotNormalized { which, sum });
    }
    if sum != 1.0 {
        masses.iter_mut().for_each(|m| *m /= sum);
    }
    Ok(())
}

/// Validates raw parallel lists into a [`DiscretePair`].
///
/// Sums within `1e-9` of one are renormalized; anything further off is
/// rejected.
pub fn validate_pair(support: Vec<String>, mut p: Vec<f64>, mut q: Vec<f64>) -> Result<DiscretePair> {
    if support.len() != p.len() || p.len() != q.len() {
        return Err(Error::LengthMismatch {
            support: support.len(),
            p: p.len(),
            q: q.len(),
        });
    }
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let mut seen = HashSet::with_capacity(support.len());
    for label in &support {
        if !seen.insert(label.as_str()) {
            return Err(Error::DuplicateLabel(label.clone()));
        }
    }
    check_masses("p", &mut p)?;
    check_masses("q", &mut q)?;
    Ok(DiscretePair { support, p, q })
}

/// One finite value of the log-likelihood ratio and its P-mass.
///
/// `ln_p` is authoritative; `p` is its exponential and may underflow to zero
/// deep in the tails of large products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub z: f64,
    pub p: f64,
    pub ln_p: f64,
}

impl Atom {
    pub fn new(z: f64, p: f64) -> Self {
        Atom { z, p, ln_p: p.ln() }
    }

    pub fn from_log(z: f64, ln_p: f64) -> Self {
        Atom { z, p: ln_p.exp(), ln_p }
    }

    /// Q-mass of the atom, `p e^{-z}`.
    pub fn q(&self) -> f64 {
        self.ln_q().exp()
    }

    pub fn ln_q(&self) -> f64 {
        self.ln_p - self.z
    }

    /// Likelihood ratio `Q/P = e^{-z}`.
    pub fn ratio(&self) -> f64 {
        (-self.z).exp()
    }
}

/// Distribution of the log-likelihood ratio under `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlrSpectrum {
    atoms: Vec<Atom>,
    p_inf: f64,
    q_orphan: f64,
}

impl LlrSpectrum {
    /// Builds a spectrum from `(z, p)` atoms, merging ties and checking both
    /// normalizations.
    pub fn from_parts(atoms: Vec<(f64, f64)>, p_inf: f64, q_orphan: f64) -> Result<Self> {
        for &(z, p) in &atoms {
            if !z.is_finite() || !(p > 0.0) || !p.is_finite() {
                return Err(Error::InvalidSpectrum(format!("bad atom ({z}, {p})")));
            }
        }
        let atoms = merge_atoms(atoms.into_iter().map(|(z, p)| Atom::new(z, p)).collect());
        let spectrum = LlrSpectrum { atoms, p_inf, q_orphan };
        spectrum.check()?;
        Ok(spectrum)
    }

    fn check(&self) -> Result<()> {
        for (name, v) in [("p_inf", self.p_inf), ("q_orphan", self.q_orphan)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidSpectrum(format!("{name} = {v}")));
            }
        }
        let p_sum = self.p_mass_total() + self.p_inf;
        if (p_sum - 1.0).abs() > P_SUM_TOLERANCE {
            return Err(Error::InvalidSpectrum(format!("P-masses sum to {p_sum}")));
        }
        let q_sum = self.q_mass_total() + self.q_orphan;
        if (q_sum - 1.0).abs() > Q_SUM_TOLERANCE {
            return Err(Error::InvalidSpectrum(format!("Q-masses sum to {q_sum}")));
        }
        Ok(())
    }

    /// Finite atoms, strictly increasing in `z`.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// P-mass where `Q = 0` (`z = +inf`).
    pub fn p_inf(&self) -> f64 {
        self.p_inf
    }

    /// Q-mass where `P = 0`.
    pub fn q_orphan(&self) -> f64 {
        self.q_orphan
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn p_mass_total(&self) -> f64 {
        self.atoms.iter().map(|a| a.p).sum()
    }

    pub fn q_mass_total(&self) -> f64 {
        self.atoms.iter().map(Atom::q).sum()
    }

    pub fn min_z(&self) -> Option<f64> {
        self.atoms.first().map(|a| a.z)
    }

    pub fn max_z(&self) -> Option<f64> {
        self.atoms.last().map(|a| a.z)
    }

    pub fn cdf(&self) -> StepCdf {
        cdf(self)
    }
}

// ln(p/q) with the ratio near one routed through ln_1p, where p - q is exact.
fn log_ratio(p: f64, q: f64) -> f64 {
    let ratio = p / q;
    if (0.5..=2.0).contains(&ratio) {
        ((p - q) / q).ln_1p()
    } else if ratio.is_normal() {
        ratio.ln()
    } else {
        p.ln() - q.ln()
    }
}

/// Sorts atoms and merges values of `z` equal within [`MERGE_TOLERANCE`]
/// relative to the largest `|z|` present.
fn merge_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    if atoms.is_empty() {
        return atoms;
    }
    atoms.sort_by(|a, b| a.z.total_cmp(&b.z).then(a.ln_p.total_cmp(&b.ln_p)));
    let scale = atoms.iter().map(|a| a.z.abs()).fold(f64::MIN_POSITIVE, f64::max);
    let tol = MERGE_TOLERANCE * scale;
    let mut merged = Vec::with_capacity(atoms.len());
    let mut start = 0;
    while start < atoms.len() {
        let head = atoms[start].z;
        let mut end = start + 1;
        while end < atoms.len() && atoms[end].z - head <= tol {
            end += 1;
        }
        if end - start == 1 {
            merged.push(atoms[start]);
        } else {
            let group = &atoms[start..end];
            let ln_ps: Vec<f64> = group.iter().map(|a| a.ln_p).collect();
            let ln_p = log_sum_exp(&ln_ps);
            let z = group.iter().map(|a| a.z * (a.ln_p - ln_p).exp()).sum::<f64>();
            merged.push(Atom::from_log(z, ln_p));
        }
        start = end;
    }
    merged
}

/// Reduces a pair to the spectrum of its log-likelihood ratio.
pub fn llr_spectrum(pair: &DiscretePair) -> LlrSpectrum {
    let mut atoms = Vec::with_capacity(pair.len());
    let mut p_inf = 0.0;
    let mut q_orphan = 0.0;
    for (&p, &q) in pair.p.iter().zip(&pair.q) {
        match (p > 0.0, q > 0.0) {
            (true, true) => atoms.push(Atom::new(log_ratio(p, q), p)),
            (true, false) => p_inf += p,
            (false, true) => q_orphan += q,
            (false, false) => {}
        }
    }
    LlrSpectrum {
        atoms: merge_atoms(atoms),
        p_inf,
        q_orphan,
    }
}

// 1 - (1 - a)(1 - b)
fn absorb(a: f64, b: f64) -> f64 {
    a + b - a * b
}

/// Spectrum of the product pair `(P_a ⊗ P_b, Q_a ⊗ Q_b)`.
pub fn convolve(a: &LlrSpectrum, b: &LlrSpectrum, cap: usize) -> Result<LlrSpectrum> {
    let pairs = a.atoms.len().saturating_mul(b.atoms.len());
    if pairs > cap.saturating_mul(8) {
        return Err(Error::AtomExplosion { cap });
    }
    let mut atoms = Vec::with_capacity(pairs);
    for x in &a.atoms {
        for y in &b.atoms {
            atoms.push(Atom::from_log(x.z + y.z, x.ln_p + y.ln_p));
        }
    }
    let atoms = merge_atoms(atoms);
    if atoms.len() > cap {
        return Err(Error::AtomExplosion { cap });
    }
    Ok(LlrSpectrum {
        atoms,
        p_inf: absorb(a.p_inf, b.p_inf),
        q_orphan: absorb(a.q_orphan, b.q_orphan),
    })
}

/// `ln C(n + k - 1, k - 1)`, the number of count vectors of `n` draws from `k` atoms.
fn ln_composition_count(n: usize, k: usize) -> f64 {
    if k <= 1 {
        return 0.0;
    }
    libm::lgamma((n + k) as f64) - libm::lgamma((n + 1) as f64) - libm::lgamma(k as f64)
}

/// Spectrum of the `n`-fold i.i.d. product with the default atom cap.
pub fn iid_product(spectrum: &LlrSpectrum, n: usize) -> Result<LlrSpectrum> {
    iid_product_with_cap(spectrum, n, DEFAULT_ATOM_CAP)
}

/// Spectrum of `(P^{⊗n}, Q^{⊗n})`.
///
/// A block lands in `p_inf` (`q_orphan`) as soon as one coordinate does. The
/// finite atoms are enumerated by count vectors with multinomial masses, so
/// each atom is computed once rather than through repeated convolution;
/// when the count bound exceeds `cap` the product falls back to sequential
/// convolution, which only fails if the merged spectrum itself is too large.
pub fn iid_product_with_cap(spectrum: &LlrSpectrum, n: usize, cap: usize) -> Result<LlrSpectrum> {
    if n == 0 {
        return Err(Error::ZeroBlockLength);
    }
    if n == 1 {
        return Ok(spectrum.clone());
    }
    let nf = n as f64;
    let p_inf = -(nf * (-spectrum.p_inf).ln_1p()).exp_m1();
    let q_orphan = -(nf * (-spectrum.q_orphan).ln_1p()).exp_m1();
    let base = &spectrum.atoms;
    let k = base.len();
    if k == 0 {
        return Ok(LlrSpectrum {
            atoms: Vec::new(),
            p_inf,
            q_orphan,
        });
    }
    if ln_composition_count(n, k) <= (cap as f64).ln() {
        let atoms = enumerate_counts(base, n);
        let atoms = merge_atoms(atoms);
        if atoms.len() > cap {
            return Err(Error::AtomExplosion { cap });
        }
        return Ok(LlrSpectrum { atoms, p_inf, q_orphan });
    }
    let mut acc = spectrum.clone();
    for _ in 1..n {
        acc = convolve(&acc, spectrum, cap)?;
    }
    Ok(acc)
}

fn enumerate_counts(base: &[Atom], n: usize) -> Vec<Atom> {
    let k = base.len();
    let ln_fact: Vec<f64> = (0..=n).map(|m| libm::lgamma(m as f64 + 1.0)).collect();
    let mut out = Vec::new();
    let mut counts = vec![0usize; k];
    fn recurse(
        base: &[Atom],
        ln_fact: &[f64],
        counts: &mut [usize],
        idx: usize,
        remaining: usize,
        out: &mut Vec<Atom>,
    ) {
        let k = base.len();
        if idx == k - 1 {
            counts[idx] = remaining;
            let n = counts.iter().sum::<usize>();
            let mut z = 0.0;
            let mut ln_p = ln_fact[n];
            for (c, a) in counts.iter().zip(base) {
                if *c > 0 {
                    z += *c as f64 * a.z;
                    ln_p += *c as f64 * a.ln_p - ln_fact[*c];
                }
            }
            out.push(Atom::from_log(z, ln_p));
            return;
        }
        for c in 0..=remaining {
            counts[idx] = c;
            recurse(base, ln_fact, counts, idx + 1, remaining - c, out);
        }
    }
    recurse(base, &ln_fact, &mut counts, 0, n, &mut out);
    out
}

/// Right-continuous CDF `F(z) = P{L <= z}` of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    jumps: Vec<f64>,
    values: Vec<f64>,
    ln_values: Vec<f64>,
}

impl StepCdf {
    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    /// `F` at each jump point.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `ln F` at each jump point, accurate where `F` underflows.
    pub fn ln_values(&self) -> &[f64] {
        &self.ln_values
    }

    /// Number of jumps at or below `z`.
    pub fn rank(&self, z: f64) -> usize {
        self.jumps.partition_point(|&j| j <= z)
    }

    pub fn evaluate(&self, z: f64) -> f64 {
        match self.rank(z) {
            0 => 0.0,
            i => self.values[i - 1],
        }
    }

    pub fn ln_evaluate(&self, z: f64) -> f64 {
        match self.rank(z) {
            0 => f64::NEG_INFINITY,
            i => self.ln_values[i - 1],
        }
    }

    /// `F(z^-) = P{L < z}`.
    pub fn left_limit(&self, z: f64) -> f64 {
        match self.jumps.partition_point(|&j| j < z) {
            0 => 0.0,
            i => self.values[i - 1],
        }
    }

    /// Value of `F` beyond every jump, `1 - p_inf`.
    pub fn total(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

pub fn cdf(spectrum: &LlrSpectrum) -> StepCdf {
    let mut values = Vec::with_capacity(spectrum.atoms.len());
    let mut ln_values = Vec::with_capacity(spectrum.atoms.len());
    let mut acc = 0.0;
    let mut ln_acc = f64::NEG_INFINITY;
    for a in &spectrum.atoms {
        acc += a.p;
        ln_acc = log_add_exp(ln_acc, a.ln_p);
        values.push(acc);
        ln_values.push(ln_acc);
    }
    StepCdf {
        jumps: spectrum.atoms.iter().map(|a| a.z).collect(),
        values,
        ln_values,
    }
}

/// Smallest `(d_l, d_h)` with `G - d_l <= F <= G + d_h` everywhere, where
/// `G(z) = phi((z - D)/sqrt(V))`.
///
/// `F` is flat between jumps and `G` is continuous and increasing, so
/// `F - G` peaks at the right of a jump and `G - F` just left of one.
pub fn sup_gap(cdf: &StepCdf, model: &GaussianModel) -> Result<(f64, f64)> {
    let sd = model.std_dev()?;
    let g = |z: f64| phi((z - model.mean) / sd);
    let mut d_l: f64 = 0.0;
    let mut d_h: f64 = 0.0;
    let mut below = 0.0;
    for (&z, &f) in cdf.jumps.iter().zip(&cdf.values) {
        let gz = g(z);
        d_l = d_l.max(gz - below);
        d_h = d_h.max(f - gz);
        below = f;
    }
    // G -> 1 beyond the last jump while F stays at 1 - p_inf.
    d_l = d_l.max(1.0 - below);
    Ok((d_l.clamp(0.0, 1.0), d_h.clamp(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| ["a", "b", "c", "d"][i].to_string()).collect()
    }

    #[test]
    fn validates_well_formed_pair() {
        let pair = validate_pair(labels(2), vec![0.5, 0.5], vec![0.9, 0.1]).unwrap();
        assert_eq!(pair.len(), 2);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            validate_pair(labels(1), vec![1.0], vec![0.7]),
            Err(Error::NotNormalized { which: "q", .. })
        ));
        assert!(matches!(
            validate_pair(labels(2), vec![1.5, -0.5], vec![0.5, 0.5]),
            Err(Error::NegativeMass {
                which: "p",
                index: 1,
                ..
            })
        ));
        assert!(matches!(
            validate_pair(labels(2), vec![1.0], vec![0.5, 0.5]),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(validate_pair(vec![], vec![], vec![]), Err(Error::EmptySupport));
        assert!(matches!(
            validate_pair(vec!["x".into(), "x".into()], vec![0.5, 0.5], vec![0.5, 0.5]),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn renormalizes_small_drift() {
        let pair = validate_pair(labels(2), vec![0.5, 0.5 + 1e-10], vec![0.9, 0.1]).unwrap();
        assert!((pair.p().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn disjoint_supports_are_legal() {
        let pair = validate_pair(labels(2), vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let s = llr_spectrum(&pair);
        assert!(s.atoms().is_empty());
        assert_eq!(s.p_inf(), 1.0);
        assert_eq!(s.q_orphan(), 1.0);
    }

    #[test]
    fn worked_spectrum() {
        let pair = DiscretePair::from_masses(vec![0.5, 0.5], vec![0.9, 0.1]).unwrap();
        let s = llr_spectrum(&pair);
        let a = s.atoms();
        assert_eq!(a.len(), 2);
        assert!((a[0].z - (5.0f64 / 9.0).ln()).abs() < 1e-15);
        assert!((a[1].z - 5f64.ln()).abs() < 1e-15);
        assert_eq!(a[0].p, 0.5);
        assert_eq!(s.p_inf(), 0.0);
        assert_eq!(s.q_orphan(), 0.0);
    }

    #[test]
    fn identical_hypotheses_collapse() {
        let pair = DiscretePair::from_masses(vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
        let s = llr_spectrum(&pair);
        assert_eq!(s.atoms().len(), 1);
        assert_eq!(s.atoms()[0].z, 0.0);
        assert_eq!(s.atoms()[0].p, 1.0);
    }

    #[test]
    fn equal_ratios_merge() {
        let pair = DiscretePair::from_masses(vec![0.1, 0.3, 0.6], vec![0.2, 0.6, 0.2]).unwrap();
        let s = llr_spectrum(&pair);
        assert_eq!(s.atoms().len(), 2);
        assert!((s.atoms()[0].p - 0.4).abs() < 1e-15);
    }

    #[test]
    fn product_of_two_atoms_is_binomial() {
        let pair = DiscretePair::from_masses(vec![0.5, 0.5], vec![0.9, 0.1]).unwrap();
        let s = llr_spectrum(&pair);
        let s2 = iid_product(&s, 2).unwrap();
        // outcome pairs: (a,a) (a,b) (b,a) (b,b)
        let z1 = (5.0f64 / 9.0).ln();
        let z2 = 5f64.ln();
        let expect = [(2.0 * z1, 0.25), (z1 + z2, 0.5), (2.0 * z2, 0.25)];
        assert_eq!(s2.atoms().len(), 3);
        for (a, (z, p)) in s2.atoms().iter().zip(expect) {
            assert!((a.z - z).abs() < 1e-14);
            assert!((a.p - p).abs() < 1e-15);
        }
        assert_eq!(iid_product(&s, 1).unwrap(), s);
        assert_eq!(iid_product(&s, 0), Err(Error::ZeroBlockLength));
    }

    #[test]
    fn product_of_equal_hypotheses_stays_point_mass() {
        let pair = DiscretePair::from_masses(vec![0.2, 0.3, 0.5], vec![0.2, 0.3, 0.5]).unwrap();
        let s = iid_product(&llr_spectrum(&pair), 37).unwrap();
        assert_eq!(s.atoms().len(), 1);
        assert!((s.atoms()[0].p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_absorbs_orphans() {
        let pair = DiscretePair::from_masses(vec![0.5, 0.5, 0.0], vec![0.0, 0.5, 0.5]).unwrap();
        let s = iid_product(&llr_spectrum(&pair), 3).unwrap();
        assert!((s.p_inf() - (1.0 - 0.125)).abs() < 1e-15);
        assert!((s.q_orphan() - (1.0 - 0.125)).abs() < 1e-15);
        assert!((s.p_mass_total() + s.p_inf() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn commensurate_products_merge() {
        // z in {-a, 0, a}: count vectors with equal c3 - c1 collide
        let pair = DiscretePair::from_masses(vec![0.2, 0.3, 0.5], vec![0.5, 0.3, 0.2]).unwrap();
        let s = iid_product(&llr_spectrum(&pair), 50).unwrap();
        assert_eq!(s.atoms().len(), 101);
    }

    #[test]
    fn atom_cap_is_enforced() {
        let pair = DiscretePair::from_masses(vec![0.1, 0.2, 0.3, 0.4], vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let s = llr_spectrum(&pair);
        // z = ±ln 4, ±ln(2/3): sums are not all distinct but far above 50
        assert_eq!(iid_product_with_cap(&s, 30, 50), Err(Error::AtomExplosion { cap: 50 }));
    }

    #[test]
    fn cdf_of_point_mass() {
        let pair = DiscretePair::from_masses(vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
        let f = cdf(&llr_spectrum(&pair));
        assert_eq!(f.evaluate(-1e-12), 0.0);
        assert_eq!(f.evaluate(0.0), 1.0);
        assert_eq!(f.evaluate(-1e9), 0.0);
        assert_eq!(f.left_limit(0.0), 0.0);
    }

    #[test]
    fn cdf_worked_value() {
        let pair = DiscretePair::from_masses(vec![0.5, 0.5], vec![0.9, 0.1]).unwrap();
        let f = cdf(&llr_spectrum(&pair));
        assert_eq!(f.evaluate(0.0), 0.5);
        assert_eq!(f.evaluate(-1e9), 0.0);
        assert_eq!(f.total(), 1.0);
    }

    #[test]
    fn sup_gap_point_mass_vs_standard_normal() {
        let pair = DiscretePair::from_masses(vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
        let f = cdf(&llr_spectrum(&pair));
        let (d_l, d_h) = sup_gap(&f, &GaussianModel::new(0.0, 1.0)).unwrap();
        assert!((d_l - 0.5).abs() < 1e-15);
        assert!((d_h - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sup_gap_far_shifted_gaussian() {
        let pair = DiscretePair::from_masses(vec![0.5, 0.5], vec![0.9, 0.1]).unwrap();
        let f = cdf(&llr_spectrum(&pair));
        let (d_l, d_h) = sup_gap(&f, &GaussianModel::new(100.0, 1.0)).unwrap();
        assert!(d_h > 1.0 - 1e-12);
        assert!(d_l < 1e-12);
        assert!(sup_gap(&f, &GaussianModel::new(0.0, 0.0)).is_err());
    }
}
