//! Search parameters and operator switches.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Operators that can be switched off one at a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Toggle {
    Related,
    Biased,
    Route,
    Single,
    Close,
    Open,
    Restart,
    TwoOpt,
    TwoOptStar,
    Relocate,
    Swap,
    Swap2,
}

impl Toggle {
    pub const ALL: [Toggle; 12] = [
        Toggle::Related,
        Toggle::Biased,
        Toggle::Route,
        Toggle::Single,
        Toggle::Close,
        Toggle::Open,
        Toggle::Restart,
        Toggle::TwoOpt,
        Toggle::TwoOptStar,
        Toggle::Relocate,
        Toggle::Swap,
        Toggle::Swap2,
    ];

    /// Command-line name, e.g. `no-open`.
    pub fn flag(self) -> &'static str {
        match self {
            Toggle::Related => "no-related",
            Toggle::Biased => "no-biased",
            Toggle::Route => "no-route",
            Toggle::Single => "no-single",
            Toggle::Close => "no-close",
            Toggle::Open => "no-open",
            Toggle::Restart => "no-restart",
            Toggle::TwoOpt => "no-2opt",
            Toggle::TwoOptStar => "no-2opt*",
            Toggle::Relocate => "no-relocate",
            Toggle::Swap => "no-swap",
            Toggle::Swap2 => "no-swap2",
        }
    }

    fn bit(self) -> u16 {
        1 << (self as u16)
    }
}

impl fmt::Display for Toggle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag())
    }
}

impl FromStr for Toggle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim();
        Toggle::ALL
            .into_iter()
            .find(|t| t.flag() == key || t.flag().trim_start_matches("no-") == key)
            .ok_or_else(|| Error::UnknownToggle(key.to_owned()))
    }
}

/// Set of disabled operators.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Disabled(u16);

impl Disabled {
    pub fn none() -> Self {
        Disabled(0)
    }

    pub fn with(mut self, t: Toggle) -> Self {
        self.0 |= t.bit();
        self
    }

    pub fn contains(self, t: Toggle) -> bool {
        self.0 & t.bit() != 0
    }

    pub fn enabled(self, t: Toggle) -> bool {
        !self.contains(t)
    }

    pub fn iter(self) -> impl Iterator<Item = Toggle> {
        Toggle::ALL.into_iter().filter(move |&t| self.contains(t))
    }
}

impl FromIterator<Toggle> for Disabled {
    fn from_iter<I: IntoIterator<Item = Toggle>>(iter: I) -> Self {
        iter.into_iter().fold(Disabled::none(), Disabled::with)
    }
}

impl fmt::Display for Disabled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(Toggle::flag).collect();
        if names.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&names.join(","))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Related removal: maximum share of customers removed.
    pub p1: f64,
    /// Biased removal: maximum share of customers removed.
    pub p2: f64,
    /// Route removal intensity relative to the minimum freighter count.
    pub p3: f64,
    /// Probability of removing all single-customer routes.
    pub p4_hat: f64,
    /// Probability of closing a satellite once the grace period is over.
    pub p5_hat: f64,
    /// Granular neighbourhood size.
    pub tau: usize,
    /// Grace period between satellite changes, in iterations.
    pub g_max: u64,
    /// Non-improving iterations before a restart.
    pub i_max: u64,
    /// Wall-clock budget.
    pub time_max: Duration,
    pub seed: u64,
    /// Optional cap on main-loop iterations, for reproducible short runs.
    pub max_iterations: Option<u64>,
    pub disabled: Disabled,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            p1: 0.20,
            p2: 0.35,
            p3: 0.25,
            p4_hat: 0.50,
            p5_hat: 0.20,
            tau: 25,
            g_max: 30,
            i_max: 2000,
            time_max: Duration::from_secs(60),
            seed: 0,
            max_iterations: None,
            disabled: Disabled::none(),
        }
    }
}

impl Params {
    pub fn enabled(&self, t: Toggle) -> bool {
        self.disabled.enabled(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p1", self.p1),
            ("p2", self.p2),
            ("p3", self.p3),
            ("p4_hat", self.p4_hat),
            ("p5_hat", self.p5_hat),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Params(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        if self.tau == 0 {
            return Err(Error::Params("tau must be at least 1".into()));
        }
        if self.g_max == 0 || self.i_max == 0 {
            return Err(Error::Params("g_max and i_max must be at least 1".into()));
        }
        Ok(())
    }

    /// Applies one `key=value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<V: FromStr>(key: &str, value: &str) -> Result<V> {
            value
                .parse()
                .map_err(|_| Error::Params(format!("bad value `{value}` for {key}")))
        }
        match key {
            "p1" => self.p1 = num(key, value)?,
            "p2" => self.p2 = num(key, value)?,
            "p3" => self.p3 = num(key, value)?,
            "p4_hat" | "p4" => self.p4_hat = num(key, value)?,
            "p5_hat" | "p5" => self.p5_hat = num(key, value)?,
            "tau" => self.tau = num(key, value)?,
            "g_max" => self.g_max = num(key, value)?,
            "i_max" => self.i_max = num(key, value)?,
            "time_max" => self.time_max = Duration::from_secs_f64(num::<f64>(key, value)?.max(0.0)),
            "seed" => self.seed = num(key, value)?,
            "max_iterations" => {
                self.max_iterations = match value {
                    "" | "none" => None,
                    v => Some(num(key, v)?),
                }
            }
            "disable" | "operator_toggles" => {
                for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    self.disabled = self.disabled.with(name.parse()?);
                }
            }
            _ => return Err(Error::Params(format!("unknown parameter `{key}`"))),
        }
        Ok(())
    }

    /// Reads `key=value` lines over the defaults. `#` starts a comment.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut p = Params::default();
        p.apply_kv(text)?;
        Ok(p)
    }

    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Params(format!("line {}: expected key=value", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        self.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = Params::default();
        p.validate().unwrap();
        assert_eq!(p.tau, 25);
        assert_eq!((p.p1, p.p2, p.p3, p.p4_hat, p.p5_hat), (0.20, 0.35, 0.25, 0.50, 0.20));
    }

    #[test]
    fn key_value_file() {
        let p = Params::from_kv("# tuned\np1 = 0.1\ntau=10\ntime_max=2.5\ndisable=no-open, no-2opt*\n")
            .unwrap();
        assert_eq!(p.p1, 0.1);
        assert_eq!(p.tau, 10);
        assert_eq!(p.time_max, Duration::from_millis(2500));
        assert!(!p.enabled(Toggle::Open));
        assert!(!p.enabled(Toggle::TwoOptStar));
        assert!(p.enabled(Toggle::TwoOpt));
        assert_eq!(p.disabled.to_string(), "no-open,no-2opt*");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Params::from_kv("p1=1.5").is_err());
        assert!(Params::from_kv("tau=0").is_err());
        assert!(Params::from_kv("colour=blue").is_err());
        assert!(matches!("no-such".parse::<Toggle>(), Err(Error::UnknownToggle(_))));
        for t in Toggle::ALL {
            assert_eq!(t.flag().parse::<Toggle>().unwrap(), t);
        }
    }
}
