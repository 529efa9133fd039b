//! Flat `key=value` run configuration.
//!
//! One setting per line, `#` starts a comment, keys are case-sensitive.
//! Missing keys take the defaults below; keys whose default depends on
//! other settings (`T`, `T0`, `b_stop`, `k_term`) stay unset until resolved.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::evolution::EvolutionContext;
use crate::hamiltonian::{self, Couplings, DistanceRule, OperatorTermList};
use crate::protocols::{AdiabaticConfig, FullConfig, Scheme, SchemeIConfig, SchemeIIConfig};
use crate::schedule::DriveSchedule;
use crate::state::MAX_SPINS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelKind {
    #[default]
    ShortRange,
    LongRange,
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "short_range" => Ok(ModelKind::ShortRange),
            "long_range" => Ok(ModelKind::LongRange),
            other => Err(format!("expected `short_range` or `long_range`, got `{other}`")),
        }
    }
}

impl ModelKind {
    fn as_str(self) -> &'static str {
        match self {
            ModelKind::ShortRange => "short_range",
            ModelKind::LongRange => "long_range",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_spins: usize,
    pub model: ModelKind,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub hy: f64,
    pub periodic: bool,
    pub distance_rule: DistanceRule,
    pub b0: f64,
    pub h0: f64,
    pub omega: f64,
    pub dt: f64,
    /// Measurement period; `π/ω` when unset.
    pub period: Option<f64>,
    /// Ramp constant; 1e4 s for scheme 1, 8e3 s for scheme 2 when unset.
    pub t0: Option<f64>,
    pub ramp_start: f64,
    /// `b0·1e-3` when unset.
    pub b_stop: Option<f64>,
    /// `10·n_spins` when unset.
    pub k_term: Option<usize>,
    pub probe: usize,
    pub target_rounds: u64,
    pub max_rounds: u64,
    pub seed: u64,
    pub sample_every: u64,
    pub out_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let c = Couplings::default();
        Self {
            n_spins: 14,
            model: ModelKind::ShortRange,
            jx: c.jx,
            jy: c.jy,
            jz: c.jz,
            hy: c.hy,
            periodic: true,
            distance_rule: DistanceRule::default(),
            b0: 10.0,
            h0: 1.0,
            omega: 5.0,
            dt: 1e-3,
            period: None,
            t0: None,
            ramp_start: 0.0,
            b_stop: None,
            k_term: None,
            probe: 0,
            // 1e4 s of probe measurements at the default period π/5
            target_rounds: 15_915,
            max_rounds: 200_000,
            seed: 1,
            sample_every: 100,
            out_path: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, line: usize, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>().map_err(|e| Error::ConfigKey {
        key: key.to_string(),
        line,
        reason: format!("cannot parse `{raw}`: {e}"),
    })
}

fn parse_finite(key: &str, line: usize, raw: &str) -> Result<f64> {
    let v: f64 = parse_value(key, line, raw)?;
    if !v.is_finite() {
        return Err(Error::ConfigKey {
            key: key.to_string(),
            line,
            reason: format!("value `{raw}` is not finite"),
        });
    }
    Ok(v)
}

impl RunConfig {
    /// Parses config text; unknown keys and invalid values are errors naming
    /// the key and line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut lines_of: Vec<(&'static str, usize)> = Vec::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::ConfigKey {
                    key: content.to_string(),
                    line,
                    reason: "expected `key=value`".into(),
                });
            };
            let key = key.trim();
            let value = value.trim();
            let name = cfg.set(key, value, line)?;
            lines_of.push((name, line));
        }
        cfg.validate().map_err(|(key, reason)| {
            let line = lines_of
                .iter()
                .rev()
                .find(|(k, _)| *k == key)
                .map(|(_, l)| *l)
                .unwrap_or(0);
            Error::ConfigKey {
                key: key.to_string(),
                line,
                reason,
            }
        })?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str, line: usize) -> Result<&'static str> {
        let name: &'static str = match key {
            "n_spins" => {
                self.n_spins = parse_value(key, line, v)?;
                "n_spins"
            }
            "model" => {
                self.model = parse_value(key, line, v)?;
                "model"
            }
            "jx" => {
                self.jx = parse_finite(key, line, v)?;
                "jx"
            }
            "jy" => {
                self.jy = parse_finite(key, line, v)?;
                "jy"
            }
            "jz" => {
                self.jz = parse_finite(key, line, v)?;
                "jz"
            }
            "hy" => {
                self.hy = parse_finite(key, line, v)?;
                "hy"
            }
            "periodic" => {
                self.periodic = parse_value(key, line, v)?;
                "periodic"
            }
            "distance_rule" => {
                self.distance_rule = parse_value(key, line, v)?;
                "distance_rule"
            }
            "b0" => {
                self.b0 = parse_finite(key, line, v)?;
                "b0"
            }
            "h0" => {
                self.h0 = parse_finite(key, line, v)?;
                "h0"
            }
            "omega" => {
                self.omega = parse_finite(key, line, v)?;
                "omega"
            }
            "dt" => {
                self.dt = parse_finite(key, line, v)?;
                "dt"
            }
            "T" => {
                self.period = Some(parse_finite(key, line, v)?);
                "T"
            }
            "T0" => {
                self.t0 = Some(parse_finite(key, line, v)?);
                "T0"
            }
            "ramp_start" => {
                self.ramp_start = parse_finite(key, line, v)?;
                "ramp_start"
            }
            "b_stop" => {
                self.b_stop = Some(parse_finite(key, line, v)?);
                "b_stop"
            }
            "k_term" => {
                self.k_term = Some(parse_value(key, line, v)?);
                "k_term"
            }
            "probe" => {
                self.probe = parse_value(key, line, v)?;
                "probe"
            }
            "target_rounds" => {
                self.target_rounds = parse_value(key, line, v)?;
                "target_rounds"
            }
            "max_rounds" => {
                self.max_rounds = parse_value(key, line, v)?;
                "max_rounds"
            }
            "seed" => {
                self.seed = parse_value(key, line, v)?;
                "seed"
            }
            "sample_every" => {
                self.sample_every = parse_value(key, line, v)?;
                "sample_every"
            }
            "out_path" => {
                self.out_path = Some(PathBuf::from(v));
                "out_path"
            }
            _ => {
                return Err(Error::ConfigKey {
                    key: key.to_string(),
                    line,
                    reason: "unknown key".into(),
                })
            }
        };
        Ok(name)
    }

    /// Checks cross-field invariants; on failure returns the offending key.
    fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.n_spins < 2 || self.n_spins > MAX_SPINS {
            return Err(("n_spins", format!("must be in 2..={MAX_SPINS}, got {}", self.n_spins)));
        }
        if !(self.dt > 0.0) {
            return Err(("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.omega > 0.0) {
            return Err(("omega", format!("must be positive, got {}", self.omega)));
        }
        if !(self.b0 > 0.0) {
            return Err(("b0", format!("must be positive, got {}", self.b0)));
        }
        if let Some(t) = self.period {
            if !(t > 0.0) {
                return Err(("T", format!("must be positive, got {t}")));
            }
        }
        if let Some(t0) = self.t0 {
            if !(t0 > 0.0) {
                return Err(("T0", format!("must be positive, got {t0}")));
            }
        }
        if let Some(b) = self.b_stop {
            if !(b > 0.0 && b < self.b0) {
                return Err(("b_stop", format!("must lie in (0, b0), got {b}")));
            }
        }
        if let Some(k) = self.k_term {
            if k < self.n_spins {
                return Err(("k_term", format!("must be at least n_spins, got {k}")));
            }
        }
        if self.probe >= self.n_spins {
            return Err(("probe", format!("must be below n_spins, got {}", self.probe)));
        }
        if self.ramp_start < 0.0 {
            return Err(("ramp_start", "must be non-negative".into()));
        }
        Ok(())
    }

    /// Writes every concrete field and each derived field that was set, in a
    /// form [`parse`](Self::parse) reads back to an equal config.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("n_spins", self.n_spins.to_string());
        kv("model", self.model.as_str().to_string());
        kv("jx", self.jx.to_string());
        kv("jy", self.jy.to_string());
        kv("jz", self.jz.to_string());
        kv("hy", self.hy.to_string());
        kv("periodic", self.periodic.to_string());
        kv("distance_rule", self.distance_rule.to_string());
        kv("b0", self.b0.to_string());
        kv("h0", self.h0.to_string());
        kv("omega", self.omega.to_string());
        kv("dt", self.dt.to_string());
        if let Some(t) = self.period {
            kv("T", t.to_string());
        }
        if let Some(t) = self.t0 {
            kv("T0", t.to_string());
        }
        kv("ramp_start", self.ramp_start.to_string());
        if let Some(b) = self.b_stop {
            kv("b_stop", b.to_string());
        }
        if let Some(k) = self.k_term {
            kv("k_term", k.to_string());
        }
        kv("probe", self.probe.to_string());
        kv("target_rounds", self.target_rounds.to_string());
        kv("max_rounds", self.max_rounds.to_string());
        kv("seed", self.seed.to_string());
        kv("sample_every", self.sample_every.to_string());
        if let Some(p) = &self.out_path {
            kv("out_path", p.display().to_string());
        }
        s
    }

    pub fn couplings(&self) -> Couplings {
        Couplings {
            jx: self.jx,
            jy: self.jy,
            jz: self.jz,
            hy: self.hy,
        }
    }

    pub fn bare_hamiltonian(&self) -> Result<OperatorTermList> {
        match self.model {
            ModelKind::ShortRange => {
                hamiltonian::short_range_chain(self.n_spins, self.couplings(), self.periodic)
            }
            ModelKind::LongRange => {
                hamiltonian::long_range_chain(self.n_spins, self.couplings(), self.distance_rule)
            }
        }
    }

    pub fn full_hamiltonian(&self) -> Result<OperatorTermList> {
        hamiltonian::zeeman(self.n_spins)?.sum_scaled(self.b0, &self.bare_hamiltonian()?)
    }

    pub fn period(&self) -> f64 {
        self.period.unwrap_or(std::f64::consts::PI / self.omega)
    }

    pub fn t0_for(&self, scheme: Scheme) -> f64 {
        self.t0.unwrap_or(match scheme {
            Scheme::RandomTarget => 1e4,
            Scheme::Probe => 8e3,
        })
    }

    pub fn b_stop(&self) -> f64 {
        self.b_stop.unwrap_or(self.b0 * 1e-3)
    }

    pub fn k_term(&self) -> usize {
        self.k_term.unwrap_or(10 * self.n_spins)
    }

    pub fn schedule(&self, scheme: Scheme) -> DriveSchedule {
        DriveSchedule {
            b0: self.b0,
            t0: self.t0_for(scheme),
            ramp_start: f64::INFINITY,
            h0: self.h0,
            omega: self.omega,
        }
    }

    pub fn context(&self, scheme: Scheme) -> Result<EvolutionContext> {
        EvolutionContext::new(
            self.bare_hamiltonian()?,
            hamiltonian::zeeman(self.n_spins)?,
            hamiltonian::rf(self.n_spins)?,
            self.schedule(scheme),
            self.dt,
        )
    }

    pub fn scheme1(&self) -> SchemeIConfig {
        SchemeIConfig {
            period: self.period(),
            k_term: self.k_term(),
            max_rounds: self.max_rounds,
            seed: self.seed,
        }
    }

    pub fn scheme2(&self) -> SchemeIIConfig {
        SchemeIIConfig {
            probe: self.probe,
            period: self.period(),
            target_rounds: self.target_rounds,
            seed: self.seed,
        }
    }

    pub fn adiabatic(&self, scheme: Scheme) -> AdiabaticConfig {
        AdiabaticConfig {
            t0: self.t0_for(scheme),
            b_stop: self.b_stop(),
            ramp_start: self.ramp_start,
        }
    }

    pub fn full(&self, scheme: Scheme) -> FullConfig {
        FullConfig {
            scheme,
            scheme1: self.scheme1(),
            scheme2: self.scheme2(),
            adiabatic: self.adiabatic(scheme),
            seed: self.seed,
            sample_every: self.sample_every,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::parse("n_spins=14\nb0=10\nseed=1").unwrap();
        assert_eq!(cfg.dt, 0.001);
        assert_eq!(cfg.omega, 5.0);
        assert_eq!(cfg.h0, 1.0);
        assert_eq!(cfg.k_term(), 140);
        assert_eq!(cfg.b_stop(), 0.01);
        assert_eq!(cfg.t0_for(Scheme::RandomTarget), 1e4);
        assert_eq!(cfg.t0_for(Scheme::Probe), 8e3);
        assert!((cfg.period() - std::f64::consts::PI / 5.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_spin_count_names_key() {
        let err = RunConfig::parse("n_spins=0").unwrap_err();
        match err {
            Error::ConfigKey { key, line, .. } => {
                assert_eq!(key, "n_spins");
                assert_eq!(line, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let err = RunConfig::parse("bogus=1").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus") && msg.contains("line 1"), "{msg}");
        let err = RunConfig::parse("# comment\nn_spins=4\nB0=3").unwrap_err();
        assert!(matches!(err, Error::ConfigKey { ref key, line: 3, .. } if key == "B0"));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::parse("dt=abc").is_err());
        assert!(RunConfig::parse("dt=inf").is_err());
        assert!(RunConfig::parse("model=square").is_err());
        assert!(RunConfig::parse("n_spins=4\nprobe=4").is_err());
        assert!(RunConfig::parse("n_spins=4\nk_term=2").is_err());
        assert!(RunConfig::parse("b_stop=11").is_err());
        assert!(RunConfig::parse("novalue").is_err());
    }

    #[test]
    fn comments_and_whitespace() {
        let cfg = RunConfig::parse("  n_spins = 6  # six\n\nmodel=long_range\ndistance_rule=linear\n")
            .unwrap();
        assert_eq!(cfg.n_spins, 6);
        assert_eq!(cfg.model, ModelKind::LongRange);
        assert_eq!(cfg.distance_rule, DistanceRule::Linear);
    }

    proptest! {
        #[test]
        fn serialize_parse_round_trip(
            n in 2usize..16,
            jx in -2.0f64..2.0,
            jz in -2.0f64..2.0,
            b0 in 0.5f64..20.0,
            dt in 1e-5f64..1e-2,
            period in proptest::option::of(0.01f64..3.0),
            k_extra in proptest::option::of(0usize..50),
            seed in any::<u64>(),
            long in any::<bool>(),
        ) {
            let text = format!(
                "n_spins={n}\njx={jx}\njz={jz}\nb0={b0}\ndt={dt}\nseed={seed}\nmodel={}\n{}{}",
                if long { "long_range" } else { "short_range" },
                period.map(|p| format!("T={p}\n")).unwrap_or_default(),
                k_extra.map(|k| format!("k_term={}\n", n + k)).unwrap_or_default(),
            );
            let cfg = RunConfig::parse(&text).unwrap();
            let again = RunConfig::parse(&cfg.serialize()).unwrap();
            prop_assert_eq!(cfg, again);
        }
    }
}
