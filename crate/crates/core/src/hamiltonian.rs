//! Spin-chain operators as weighted Pauli strings, applied matrix-free.
//!
//! Every factor is a spin-1/2 operator `S^a = σ^a / 2`. A term with `k`
//! factors acts on a basis index `b` by flipping the bits of its x/y sites,
//! picking up `±1/2` from each z factor and `±i/2` from each y factor:
//!
//! * `S^x`: flips the bit, factor `1/2`
//! * `S^y`: flips the bit, factor `-i/2` on down, `+i/2` on up
//! * `S^z`: keeps the bit, factor `+1/2` on up, `-1/2` on down
//!
//! Terms are grouped by flip mask at construction so the kernel makes one
//! pass over the amplitudes per distinct mask, plus one for the diagonal.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::state::{check_spins, StateVector};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub factors: Vec<(usize, Axis)>,
}

impl PauliTerm {
    pub fn single(coefficient: f64, site: usize, axis: Axis) -> Self {
        Self {
            coefficient,
            factors: vec![(site, axis)],
        }
    }

    pub fn pair(coefficient: f64, a: usize, b: usize, axis: Axis) -> Self {
        Self {
            coefficient,
            factors: vec![(a, axis), (b, axis)],
        }
    }
}

/// Coupling constants of the bare chain: `Σ jx SxSx + jy SySy + jz SzSz + hy Σ Sy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub hy: f64,
}

impl Default for Couplings {
    /// The sign convention that reproduces the reference energies
    /// E0 = -4.189 (short range), -6.59 (long range, ring distance),
    /// -68.39 with a field of 10, and -68.25 for the polarized state.
    fn default() -> Self {
        Self {
            jx: 1.0,
            jy: -0.5,
            jz: 0.5,
            hy: 0.3,
        }
    }
}

/// Distance used by the `1/d` long-range couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceRule {
    /// `|m - n|`
    Linear,
    /// `min(|m - n|, N - |m - n|)`
    #[default]
    Ring,
}

impl DistanceRule {
    pub fn distance(self, n_spins: usize, m: usize, n: usize) -> usize {
        let d = m.abs_diff(n);
        match self {
            DistanceRule::Linear => d,
            DistanceRule::Ring => d.min(n_spins - d),
        }
    }
}

impl FromStr for DistanceRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "linear" => Ok(DistanceRule::Linear),
            "ring" => Ok(DistanceRule::Ring),
            other => Err(format!("expected `linear` or `ring`, got `{other}`")),
        }
    }
}

impl fmt::Display for DistanceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceRule::Linear => "linear",
            DistanceRule::Ring => "ring",
        })
    }
}

/// One Pauli string reduced to bit masks relative to a fixed flip mask.
#[derive(Debug, Clone, Copy)]
struct MaskedTerm {
    /// Sites whose factor is y or z: each contributes `-1` when its bit is 0.
    sign_mask: usize,
    /// `coefficient · 2^-k · i^(#y)`.
    weight: C64,
}

#[derive(Debug, Clone)]
struct FlipGroup {
    flip: usize,
    terms: Vec<MaskedTerm>,
}

#[derive(Debug, Clone)]
struct Kernel {
    diagonal: Vec<f64>,
    has_diagonal: bool,
    groups: Vec<FlipGroup>,
}

#[inline]
fn parity_sign(mask_bits: usize) -> f64 {
    if mask_bits.count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl Kernel {
    fn compile(n_spins: usize, terms: &[PauliTerm]) -> Self {
        let dim = 1usize << n_spins;
        let full = dim - 1;
        let mut diagonal_terms = Vec::new();
        let mut by_flip: BTreeMap<usize, Vec<MaskedTerm>> = BTreeMap::new();
        for term in terms {
            let mut flip = 0usize;
            let mut sign_mask = 0usize;
            let mut n_y = 0u32;
            for &(site, axis) in &term.factors {
                let bit = 1usize << site;
                match axis {
                    Axis::X => flip |= bit,
                    Axis::Y => {
                        flip |= bit;
                        sign_mask |= bit;
                        n_y += 1;
                    }
                    Axis::Z => sign_mask |= bit,
                }
            }
            let i_pow = match n_y % 4 {
                0 => C64::new(1.0, 0.0),
                1 => C64::new(0.0, 1.0),
                2 => C64::new(-1.0, 0.0),
                _ => C64::new(0.0, -1.0),
            };
            let weight = i_pow * (term.coefficient * 0.5f64.powi(term.factors.len() as i32));
            let masked = MaskedTerm { sign_mask, weight };
            if flip == 0 {
                diagonal_terms.push(masked);
            } else {
                by_flip.entry(flip).or_default().push(masked);
            }
        }
        let has_diagonal = !diagonal_terms.is_empty();
        let diagonal = if has_diagonal {
            (0..dim)
                .map(|b| {
                    diagonal_terms
                        .iter()
                        .map(|t| t.weight.re * parity_sign(!b & full & t.sign_mask))
                        .sum()
                })
                .collect()
        } else {
            Vec::new()
        };
        let groups = by_flip
            .into_iter()
            .map(|(flip, terms)| FlipGroup { flip, terms })
            .collect();
        Self {
            diagonal,
            has_diagonal,
            groups,
        }
    }

    /// `out[j] += scale · (H ψ)[j]`, written in gather form so each output
    /// element is computed independently.
    fn accumulate(&self, psi: &[C64], scale: f64, out: &mut [C64]) {
        if scale == 0.0 {
            return;
        }
        let full = psi.len() - 1;
        if self.has_diagonal {
            for ((o, &p), &d) in out.iter_mut().zip(psi).zip(&self.diagonal) {
                *o += p * (d * scale);
            }
        }
        for group in &self.groups {
            let flip = group.flip;
            match group.terms.as_slice() {
                [single] => {
                    let w = single.weight * scale;
                    let mask = single.sign_mask;
                    for (j, o) in out.iter_mut().enumerate() {
                        let src = j ^ flip;
                        *o += w * psi[src] * parity_sign(!src & full & mask);
                    }
                }
                terms => {
                    for (j, o) in out.iter_mut().enumerate() {
                        let src = j ^ flip;
                        let not_src = !src & full;
                        let mut coeff = C64::new(0.0, 0.0);
                        for t in terms {
                            coeff += t.weight * parity_sign(not_src & t.sign_mask);
                        }
                        *o += coeff * psi[src] * scale;
                    }
                }
            }
        }
    }

    fn spectral_bound(&self, terms: &[PauliTerm]) -> f64 {
        terms
            .iter()
            .map(|t| t.coefficient.abs() * 0.5f64.powi(t.factors.len() as i32))
            .sum()
    }
}

/// An immutable Hermitian operator on `n_spins` spins.
#[derive(Debug, Clone)]
pub struct OperatorTermList {
    n_spins: usize,
    terms: Vec<PauliTerm>,
    kernel: Kernel,
}

impl OperatorTermList {
    pub fn new(n_spins: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        check_spins(n_spins)?;
        for term in &terms {
            if !term.coefficient.is_finite() {
                return Err(Error::Config(format!(
                    "non-finite coefficient {}",
                    term.coefficient
                )));
            }
            for (i, &(site, _)) in term.factors.iter().enumerate() {
                if site >= n_spins {
                    return Err(Error::SiteOutOfRange { site, n_spins });
                }
                if term.factors[..i].iter().any(|&(s, _)| s == site) {
                    return Err(Error::Config(format!(
                        "term repeats site {site}; factors must act on distinct sites"
                    )));
                }
            }
        }
        let kernel = Kernel::compile(n_spins, &terms);
        Ok(Self {
            n_spins,
            terms,
            kernel,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Sum of `|coefficient|·2^-k`, an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        self.kernel.spectral_bound(&self.terms)
    }

    fn check(&self, psi: &StateVector) -> Result<()> {
        if psi.n_spins() != self.n_spins {
            return Err(Error::DimensionMismatch {
                expected: self.n_spins,
                actual: psi.n_spins(),
            });
        }
        Ok(())
    }

    /// `scale · H ψ` (not normalized).
    pub fn apply(&self, psi: &StateVector, scale: f64) -> Result<StateVector> {
        self.check(psi)?;
        let mut out = vec![C64::new(0.0, 0.0); psi.dim()];
        self.kernel.accumulate(psi.amplitudes(), scale, &mut out);
        StateVector::from_amplitudes(out)
    }

    /// `out += scale · H psi` on raw amplitude slices of matching length.
    pub fn apply_accumulate(&self, psi: &[C64], scale: f64, out: &mut [C64]) {
        assert_eq!(psi.len(), 1usize << self.n_spins, "amplitude length");
        assert_eq!(out.len(), psi.len(), "output length");
        self.kernel.accumulate(psi, scale, out);
    }

    /// `⟨ψ|H|ψ⟩` including the (ideally zero) imaginary part.
    pub fn expectation_complex(&self, psi: &StateVector) -> Result<C64> {
        let h_psi = self.apply(psi, 1.0)?;
        psi.inner(&h_psi)
    }

    /// `Re ⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        let value = self.expectation_complex(psi)?;
        debug_assert!(
            value.im.abs() < 1e-9 * (1.0 + value.re.abs()),
            "imaginary residue {}",
            value.im
        );
        Ok(value.re)
    }

    /// Terms of `self` with coefficients multiplied by `factor`, followed by
    /// the terms of `other`.
    pub fn sum_scaled(&self, factor: f64, other: &OperatorTermList) -> Result<Self> {
        if other.n_spins != self.n_spins {
            return Err(Error::DimensionMismatch {
                expected: self.n_spins,
                actual: other.n_spins,
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm {
                coefficient: t.coefficient * factor,
                factors: t.factors.clone(),
            })
            .chain(other.terms.iter().cloned())
            .collect();
        Self::new(self.n_spins, terms)
    }
}

fn require_chain(n_spins: usize) -> Result<()> {
    if n_spins < 2 {
        return Err(Error::Config(format!(
            "a chain needs at least 2 spins, got {n_spins}"
        )));
    }
    check_spins(n_spins)
}

fn push_bond(terms: &mut Vec<PauliTerm>, m: usize, n: usize, c: &Couplings, strength: f64) {
    for (j, axis) in [(c.jx, Axis::X), (c.jy, Axis::Y), (c.jz, Axis::Z)] {
        if j != 0.0 {
            terms.push(PauliTerm::pair(j * strength, m, n, axis));
        }
    }
}

fn push_field(terms: &mut Vec<PauliTerm>, n_spins: usize, coefficient: f64, axis: Axis) {
    if coefficient != 0.0 {
        terms.extend((0..n_spins).map(|m| PauliTerm::single(coefficient, m, axis)));
    }
}

/// Nearest-neighbour chain; `periodic` adds the bond `(N-1, 0)`.
pub fn short_range_chain(
    n_spins: usize,
    couplings: Couplings,
    periodic: bool,
) -> Result<OperatorTermList> {
    require_chain(n_spins)?;
    let bonds = if periodic { n_spins } else { n_spins - 1 };
    let mut terms = Vec::with_capacity(3 * bonds + n_spins);
    for m in 0..bonds {
        push_bond(&mut terms, m, (m + 1) % n_spins, &couplings, 1.0);
    }
    push_field(&mut terms, n_spins, couplings.hy, Axis::Y);
    OperatorTermList::new(n_spins, terms)
}

/// All-pairs chain with couplings falling off as `1/d(m, n)`.
pub fn long_range_chain(
    n_spins: usize,
    couplings: Couplings,
    rule: DistanceRule,
) -> Result<OperatorTermList> {
    require_chain(n_spins)?;
    let mut terms = Vec::new();
    for m in 0..n_spins {
        for n in (m + 1)..n_spins {
            let d = rule.distance(n_spins, m, n) as f64;
            push_bond(&mut terms, m, n, &couplings, 1.0 / d);
        }
    }
    push_field(&mut terms, n_spins, couplings.hy, Axis::Y);
    OperatorTermList::new(n_spins, terms)
}

/// `Σ_m S^z_m` with unit coefficients; the field strength scales it.
pub fn zeeman(n_spins: usize) -> Result<OperatorTermList> {
    check_spins(n_spins)?;
    let terms = (0..n_spins)
        .map(|m| PauliTerm::single(1.0, m, Axis::Z))
        .collect();
    OperatorTermList::new(n_spins, terms)
}

/// `Σ_m S^x_m` with unit coefficients; the RF envelope scales it.
pub fn rf(n_spins: usize) -> Result<OperatorTermList> {
    check_spins(n_spins)?;
    let terms = (0..n_spins)
        .map(|m| PauliTerm::single(1.0, m, Axis::X))
        .collect();
    OperatorTermList::new(n_spins, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_amps(actual: &StateVector, expected: &[C64]) {
        for (a, e) in actual.amplitudes().iter().zip(expected) {
            assert_abs_diff_eq!(a.re, e.re, epsilon = 1e-14);
            assert_abs_diff_eq!(a.im, e.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn two_site_bond_on_all_down() {
        // Dense 4x4 oracle, worked by hand: SxSx|↓↓⟩ = |↑↑⟩/4, SySy|↓↓⟩ = -|↑↑⟩/4,
        // SzSz|↓↓⟩ = |↓↓⟩/4  =>  (1/4 - 0.5/4)|↑↑⟩ + (0.5/4)|↓↓⟩.
        let c4 = Couplings {
            jx: 1.0,
            jy: 0.5,
            jz: 0.5,
            hy: 0.0,
        };
        let h = short_range_chain(2, c4, false).unwrap();
        let out = h.apply(&StateVector::all_down(2).unwrap(), 1.0).unwrap();
        assert_amps(&out, &[c(0.125, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.125, 0.0)]);
    }

    #[test]
    fn transverse_y_field_on_all_down() {
        let cy = Couplings {
            jx: 0.0,
            jy: 0.0,
            jz: 0.0,
            hy: 0.3,
        };
        let h = short_range_chain(2, cy, false).unwrap();
        let out = h.apply(&StateVector::all_down(2).unwrap(), 1.0).unwrap();
        assert_amps(&out, &[c(0.0, 0.0), c(0.0, -0.15), c(0.0, -0.15), c(0.0, 0.0)]);
    }

    #[test]
    fn single_site_actions() {
        let down = StateVector::all_down(1).unwrap();
        let sy = OperatorTermList::new(1, vec![PauliTerm::single(1.0, 0, Axis::Y)]).unwrap();
        assert_amps(&sy.apply(&down, 1.0).unwrap(), &[c(0.0, 0.0), c(0.0, -0.5)]);
        let up = StateVector::all_up(1).unwrap();
        assert_amps(&sy.apply(&up, 1.0).unwrap(), &[c(0.0, 0.5), c(0.0, 0.0)]);

        let x1 = rf(1).unwrap();
        assert_amps(&x1.apply(&down, 1.0).unwrap(), &[c(0.0, 0.0), c(0.5, 0.0)]);

        // |↑↓⟩: spin 0 up, spin 1 down = index 1
        let x2 = rf(2).unwrap();
        let s = StateVector::basis_index(2, 1).unwrap();
        assert_amps(
            &x2.apply(&s, 1.0).unwrap(),
            &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        );
    }

    #[test]
    fn zeeman_eigenvalues() {
        let hz = zeeman(2).unwrap();
        let out = hz.apply(&StateVector::all_down(2).unwrap(), 10.0).unwrap();
        assert_amps(&out, &[c(-10.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(
            zeeman(14)
                .unwrap()
                .expectation(&StateVector::all_down(14).unwrap())
                .unwrap()
                * 10.0,
            -70.0
        );
        assert_eq!(
            zeeman(2)
                .unwrap()
                .expectation(&StateVector::all_up(2).unwrap())
                .unwrap()
                * 10.0,
            10.0
        );
        let mut a = vec![c(0.0, 0.0); 4];
        a[0] = c(FRAC_1_SQRT_2, 0.0);
        a[3] = c(FRAC_1_SQRT_2, 0.0);
        let bell = StateVector::from_amplitudes(a).unwrap();
        assert_abs_diff_eq!(hz.expectation(&bell).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn builder_term_counts() {
        let c = Couplings::default();
        assert_eq!(short_range_chain(6, c, true).unwrap().terms().len(), 3 * 6 + 6);
        assert_eq!(short_range_chain(6, c, false).unwrap().terms().len(), 3 * 5 + 6);
        assert_eq!(zeeman(5).unwrap().terms().len(), 5);
        assert!(short_range_chain(1, c, true).unwrap_err().is_config());
        assert!(long_range_chain(1, c, DistanceRule::Ring).unwrap_err().is_config());
    }

    #[test]
    fn long_range_coefficients() {
        let c = Couplings::default();
        let h = long_range_chain(3, c, DistanceRule::Linear).unwrap();
        let xx02 = h
            .terms()
            .iter()
            .find(|t| t.factors == vec![(0, Axis::X), (2, Axis::X)])
            .unwrap();
        assert_eq!(xx02.coefficient, c.jx / 2.0);
        // Ring distance for (0,2) at N=3 is 1.
        let h = long_range_chain(3, c, DistanceRule::Ring).unwrap();
        let xx02 = h
            .terms()
            .iter()
            .find(|t| t.factors == vec![(0, Axis::X), (2, Axis::X)])
            .unwrap();
        assert_eq!(xx02.coefficient, c.jx);
    }

    #[test]
    fn long_range_two_sites_matches_open_chain() {
        let c = Couplings::default();
        let open = short_range_chain(2, c, false).unwrap();
        let psi = StateVector::random_infinite_temperature(2, &mut RngStream::new(4)).unwrap();
        let want = open.apply(&psi, 1.0).unwrap();
        for rule in [DistanceRule::Linear, DistanceRule::Ring] {
            let got = long_range_chain(2, c, rule).unwrap().apply(&psi, 1.0).unwrap();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn polarized_energy_identity() {
        for n in [4usize, 8, 14] {
            let c = Couplings::default();
            let h = zeeman(n)
                .unwrap()
                .sum_scaled(10.0, &short_range_chain(n, c, true).unwrap())
                .unwrap();
            let e = h.expectation(&StateVector::all_down(n).unwrap()).unwrap();
            let want = -(n as f64) * 10.0 / 2.0 + n as f64 * c.jz / 4.0;
            assert_eq!(e, want);
        }
    }

    #[test]
    fn translation_invariant_diagonal() {
        let n = 6;
        let h = short_range_chain(n, Couplings::default(), true).unwrap();
        let full = (1usize << n) - 1;
        for b in 0..(1usize << n) {
            let shifted = ((b << 1) | (b >> (n - 1))) & full;
            let eb = h.expectation(&StateVector::basis_index(n, b).unwrap()).unwrap();
            let es = h
                .expectation(&StateVector::basis_index(n, shifted).unwrap())
                .unwrap();
            assert_abs_diff_eq!(eb, es, epsilon = 1e-14);
        }
    }

    #[test]
    fn rejects_bad_terms() {
        assert!(matches!(
            OperatorTermList::new(2, vec![PauliTerm::single(1.0, 2, Axis::X)]),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(OperatorTermList::new(2, vec![PauliTerm::pair(1.0, 1, 1, Axis::X)]).is_err());
        assert!(OperatorTermList::new(2, vec![PauliTerm::single(f64::NAN, 0, Axis::X)]).is_err());
        let h = zeeman(2).unwrap();
        assert!(matches!(
            h.apply(&StateVector::all_down(3).unwrap(), 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
