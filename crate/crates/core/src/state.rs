//! State vectors over the computational z-basis, observables, and projective
//! single-spin measurement.

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::C64;

/// Branches with Born probability below this cannot be sampled meaningfully.
pub const DEGENERATE_BRANCH: f64 = 1e-12;

/// Largest chain the 64-bit basis index and memory budget allow.
pub const MAX_SPINS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn is_up(self) -> bool {
        self == Direction::Up
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Up => "up",
            Direction::Down => "down",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOutcome {
    pub spin: usize,
    pub direction: Direction,
    /// Born probability of the realized branch.
    pub probability: f64,
    pub time: f64,
}

/// `2^N` complex amplitudes; see the crate docs for the bit convention.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_spins: usize,
    amplitudes: Vec<C64>,
}

pub(crate) fn check_spins(n_spins: usize) -> Result<()> {
    if n_spins == 0 || n_spins > MAX_SPINS {
        return Err(Error::Config(format!(
            "n_spins must be in 1..={MAX_SPINS}, got {n_spins}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// Wraps raw amplitudes. The length must be a power of two; the vector is
    /// taken as given (no normalization).
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Config(format!(
                "amplitude count {len} is not 2^N with N >= 1"
            )));
        }
        let n_spins = len.trailing_zeros() as usize;
        check_spins(n_spins)?;
        Ok(Self {
            n_spins,
            amplitudes,
        })
    }

    /// Product state with the given per-site pattern (`pattern[m]` is spin `m`).
    pub fn basis_state(n_spins: usize, pattern: &[Direction]) -> Result<Self> {
        check_spins(n_spins)?;
        if pattern.len() != n_spins {
            return Err(Error::Config(format!(
                "pattern has {} sites, expected {n_spins}",
                pattern.len()
            )));
        }
        let index = pattern
            .iter()
            .enumerate()
            .filter(|(_, d)| d.is_up())
            .fold(0usize, |acc, (m, _)| acc | (1 << m));
        Self::basis_index(n_spins, index)
    }

    pub fn basis_index(n_spins: usize, index: usize) -> Result<Self> {
        check_spins(n_spins)?;
        let dim = 1usize << n_spins;
        if index >= dim {
            return Err(Error::Config(format!(
                "basis index {index} out of range for {n_spins} spins"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self {
            n_spins,
            amplitudes,
        })
    }

    pub fn all_down(n_spins: usize) -> Result<Self> {
        Self::basis_index(n_spins, 0)
    }

    pub fn all_up(n_spins: usize) -> Result<Self> {
        check_spins(n_spins)?;
        Self::basis_index(n_spins, (1 << n_spins) - 1)
    }

    /// Pure state standing in for infinite temperature: i.i.d. standard
    /// complex Gaussian amplitudes, normalized.
    pub fn random_infinite_temperature(n_spins: usize, rng: &mut RngStream) -> Result<Self> {
        check_spins(n_spins)?;
        let dim = 1usize << n_spins;
        let amplitudes = (0..dim)
            .map(|_| {
                let re = rng.standard_normal();
                let im = rng.standard_normal();
                C64::new(re, im)
            })
            .collect();
        let mut psi = Self {
            n_spins,
            amplitudes,
        };
        psi.normalize();
        Ok(psi)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm. A zero vector is left untouched.
    pub fn normalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    pub(crate) fn check_same_size(&self, other: &StateVector) -> Result<()> {
        if self.n_spins != other.n_spins {
            return Err(Error::DimensionMismatch {
                expected: self.n_spins,
                actual: other.n_spins,
            });
        }
        Ok(())
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_spins {
            return Err(Error::SiteOutOfRange {
                site,
                n_spins: self.n_spins,
            });
        }
        Ok(())
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same_size(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `⟨Σ_m S^z_m⟩`.
    pub fn magnetization_z(&self) -> f64 {
        let n = self.n_spins as i64;
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(b, a)| {
                let ups = b.count_ones() as i64;
                a.norm_sqr() * (2 * ups - n) as f64
            })
            .sum::<f64>()
            * 0.5
    }

    /// Born probability that spin `site` reads up.
    pub fn probability_up(&self, site: usize) -> Result<f64> {
        self.check_site(site)?;
        let mask = 1usize << site;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(b, _)| b & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub fn probability_down(&self, site: usize) -> Result<f64> {
        self.check_site(site)?;
        let mask = 1usize << site;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(b, _)| b & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects spin `site` onto `direction` and renormalizes, returning the
    /// Born probability the branch had.
    pub fn project(&mut self, site: usize, direction: Direction) -> Result<f64> {
        let probability = match direction {
            Direction::Up => self.probability_up(site)?,
            Direction::Down => self.probability_down(site)?,
        };
        if probability < DEGENERATE_BRANCH {
            return Err(Error::DegenerateBranch { probability });
        }
        let mask = 1usize << site;
        let keep = if direction.is_up() { mask } else { 0 };
        let scale = 1.0 / probability.sqrt();
        for (b, a) in self.amplitudes.iter_mut().enumerate() {
            if b & mask == keep {
                *a *= scale;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        // Project-then-scale leaves O(eps) norm error; fold it out.
        self.normalize();
        Ok(probability)
    }

    /// Projective z-measurement of one spin. Draws `u ∈ [0,1)` and reads up
    /// iff `u < P(up)`; the state collapses in place.
    pub fn measure_spin_z(
        &mut self,
        site: usize,
        rng: &mut RngStream,
        time: f64,
    ) -> Result<MeasurementOutcome> {
        let p_up = self.probability_up(site)?;
        let u = rng.uniform();
        let direction = if u < p_up {
            Direction::Up
        } else {
            Direction::Down
        };
        let probability = self.project(site, direction)?;
        Ok(MeasurementOutcome {
            spin: site,
            direction,
            probability,
            time,
        })
    }

    /// Fixes the global phase so the largest-magnitude amplitude is real and
    /// positive (first such index on ties).
    pub fn canonicalize_phase(&mut self) {
        let mut best = 0;
        let mut best_mag = -1.0;
        for (b, a) in self.amplitudes.iter().enumerate() {
            let mag = a.norm_sqr();
            if mag > best_mag * (1.0 + 1e-12) {
                best = b;
                best_mag = mag;
            }
        }
        let a = self.amplitudes[best];
        if a.norm() > 0.0 {
            let phase = a.conj() / a.norm();
            self.amplitudes.iter_mut().for_each(|x| *x *= phase);
        }
    }

    /// Per-site z readout of a basis index (up if the bit is set).
    pub fn pattern_of(n_spins: usize, index: usize) -> Vec<Direction> {
        (0..n_spins)
            .map(|m| {
                if index & (1 << m) != 0 {
                    Direction::Up
                } else {
                    Direction::Down
                }
            })
            .collect()
    }
}
