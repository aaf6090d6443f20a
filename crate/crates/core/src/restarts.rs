//! Restart policies: fixed, geometric, Luby and inner/outer geometric.
//!
//! A [`RestartPolicy`] is plain configuration. [`RestartState`] carries the
//! mutable position in the sequence and hands out the conflict allowance of
//! each run through [`RestartState::next_limit`].

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Unit runs swept by the benchmark harness by default.
pub const LUBY_SWEEP: [u64; 12] = [1, 2, 4, 6, 8, 12, 16, 32, 64, 128, 256, 512];

pub const DEFAULT_LUBY_UNIT: u64 = 6;
pub const DEFAULT_GEOMETRIC_FIRST: u64 = 100;
pub const DEFAULT_GEOMETRIC_FACTOR: f64 = 1.5;
pub const DEFAULT_INOUT_BASE: u64 = 100;
pub const DEFAULT_INOUT_FACTOR: f64 = 1.1;

/// The `i`-th term of the Luby sequence (1-based).
///
/// `t(i) = 2^(k-1)` when `i = 2^k - 1`, otherwise `t(i - 2^(k-1) + 1)` for
/// `2^(k-1) <= i < 2^k - 1`. Evaluated by descending through the powers of
/// two, so the cost is `O(log i)`.
///
/// # Panics
/// Panics if `i == 0`.
pub fn luby_term(i: u64) -> u64 {
    assert!(i >= 1, "Luby sequence is indexed from 1");
    let mut i = i;
    // Smallest 2^k - 1 that is >= i.
    let mut size: u64 = if i >= 1 << 63 {
        u64::MAX
    } else {
        (i + 1).next_power_of_two() - 1
    };
    loop {
        if i == size {
            return (size >> 1) + 1;
        }
        size >>= 1;
        if i > size {
            i -= size;
        }
    }
}

/// Restart policy configuration.
///
/// Textual form (CLI and config files): `fixed:<n>`,
/// `geometric:<first>,<factor>`, `luby:<u>`, `inout:<base>,<factor>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RestartPolicy {
    Fixed { size: u64 },
    Geometric { first: u64, factor: f64 },
    Luby { unit: u64 },
    InnerOuter { base: u64, factor: f64 },
}

impl Default for RestartPolicy {
    fn default() -> Self {
        RestartPolicy::Luby {
            unit: DEFAULT_LUBY_UNIT,
        }
    }
}

impl RestartPolicy {
    pub fn luby(unit: u64) -> Self {
        RestartPolicy::Luby { unit }
    }

    pub fn fixed(size: u64) -> Self {
        RestartPolicy::Fixed { size }
    }

    pub fn geometric() -> Self {
        RestartPolicy::Geometric {
            first: DEFAULT_GEOMETRIC_FIRST,
            factor: DEFAULT_GEOMETRIC_FACTOR,
        }
    }

    pub fn inner_outer() -> Self {
        RestartPolicy::InnerOuter {
            base: DEFAULT_INOUT_BASE,
            factor: DEFAULT_INOUT_FACTOR,
        }
    }

    /// Short human-readable name used as a row label in result tables,
    /// e.g. `Luby-6` or `Fixed-700`.
    pub fn label(&self) -> String {
        match *self {
            RestartPolicy::Fixed { size } => format!("Fixed-{size}"),
            RestartPolicy::Geometric { first, factor } => format!("Geometric-{first}x{factor}"),
            RestartPolicy::Luby { unit } => format!("Luby-{unit}"),
            RestartPolicy::InnerOuter { base, factor } => format!("InOut-{base}x{factor}"),
        }
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        match *self {
            RestartPolicy::Fixed { size: 0 } => Err(PolicyError::Invalid("fixed size must be >= 1")),
            RestartPolicy::Luby { unit: 0 } => Err(PolicyError::Invalid("unit run must be >= 1")),
            RestartPolicy::Geometric { first, factor }
            | RestartPolicy::InnerOuter { base: first, factor } => {
                if first == 0 {
                    Err(PolicyError::Invalid("initial limit must be >= 1"))
                } else if !(factor.is_finite() && factor > 1.0) {
                    Err(PolicyError::Invalid("growth factor must be a finite number > 1"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn start(&self) -> RestartState {
        RestartState::new(*self)
    }
}

impl fmt::Display for RestartPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RestartPolicy::Fixed { size } => write!(f, "fixed:{size}"),
            RestartPolicy::Geometric { first, factor } => write!(f, "geometric:{first},{factor}"),
            RestartPolicy::Luby { unit } => write!(f, "luby:{unit}"),
            RestartPolicy::InnerOuter { base, factor } => write!(f, "inout:{base},{factor}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("unknown restart policy {0:?} (expected fixed, geometric, luby or inout)")]
    UnknownKind(String),
    #[error("bad restart parameters {0:?}")]
    BadParameters(String),
    #[error("{0}")]
    Invalid(&'static str),
}

impl FromStr for RestartPolicy {
    type Err = PolicyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (kind, args) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s, None),
        };
        let bad = || PolicyError::BadParameters(s.to_string());
        let int = |a: &str| a.trim().parse::<u64>().map_err(|_| bad());
        let float = |a: &str| a.trim().parse::<f64>().map_err(|_| bad());
        let pair = |args: Option<&str>, first: u64, factor: f64| -> Result<(u64, f64), PolicyError> {
            match args {
                None => Ok((first, factor)),
                Some(a) => {
                    let (x, y) = a.split_once(',').ok_or_else(bad)?;
                    Ok((int(x)?, float(y)?))
                }
            }
        };
        let policy = match kind.to_ascii_lowercase().as_str() {
            "fixed" => RestartPolicy::Fixed {
                size: int(args.ok_or_else(bad)?)?,
            },
            "luby" => RestartPolicy::Luby {
                unit: args.map(int).transpose()?.unwrap_or(DEFAULT_LUBY_UNIT),
            },
            "geometric" => {
                let (first, factor) = pair(args, DEFAULT_GEOMETRIC_FIRST, DEFAULT_GEOMETRIC_FACTOR)?;
                RestartPolicy::Geometric { first, factor }
            }
            "inout" => {
                let (base, factor) = pair(args, DEFAULT_INOUT_BASE, DEFAULT_INOUT_FACTOR)?;
                RestartPolicy::InnerOuter { base, factor }
            }
            _ => return Err(PolicyError::UnknownKind(kind.to_string())),
        };
        policy.validate()?;
        Ok(policy)
    }
}

/// Parses a comma-separated list of policies.
///
/// Since `geometric` and `inout` take a comma-separated pair themselves, a
/// list item starting with a digit or `.` continues the previous policy:
/// `luby:1,geometric:100,1.5,fixed:700` has three entries.
pub fn parse_policy_list(s: &str) -> Result<Vec<RestartPolicy>, PolicyError> {
    let mut specs: Vec<String> = Vec::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let continues = item.starts_with(|c: char| c.is_ascii_digit() || c == '.');
        match specs.last_mut() {
            Some(prev) if continues => {
                prev.push(',');
                prev.push_str(item);
            }
            _ => specs.push(item.to_string()),
        }
    }
    specs.iter().map(|spec| spec.parse()).collect()
}

/// Position inside a restart sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum RestartState {
    Fixed {
        size: u64,
    },
    Geometric {
        current: f64,
        factor: f64,
    },
    /// `index` is the 1-based index of the next run.
    Luby {
        unit: u64,
        index: u64,
    },
    InnerOuter {
        inner: f64,
        outer: f64,
        base: f64,
        factor: f64,
    },
}

impl RestartState {
    pub fn new(policy: RestartPolicy) -> RestartState {
        match policy {
            RestartPolicy::Fixed { size } => RestartState::Fixed { size: size.max(1) },
            RestartPolicy::Geometric { first, factor } => RestartState::Geometric {
                current: first as f64,
                factor,
            },
            RestartPolicy::Luby { unit } => RestartState::Luby {
                unit: unit.max(1),
                index: 1,
            },
            RestartPolicy::InnerOuter { base, factor } => RestartState::InnerOuter {
                inner: base as f64,
                outer: base as f64,
                base: base as f64,
                factor,
            },
        }
    }

    /// Conflict allowance of the upcoming run; advances the sequence.
    pub fn next_limit(&mut self) -> u64 {
        match self {
            RestartState::Fixed { size } => *size,
            RestartState::Geometric { current, factor } => {
                let limit = to_limit(*current);
                *current *= *factor;
                limit
            }
            RestartState::Luby { unit, index } => {
                let limit = unit.saturating_mul(luby_term(*index));
                *index += 1;
                limit
            }
            RestartState::InnerOuter {
                inner,
                outer,
                base,
                factor,
            } => {
                let limit = to_limit(*inner);
                *inner *= *factor;
                if *inner > *outer {
                    *inner = *base;
                    *outer *= *factor;
                }
                limit
            }
        }
    }
}

fn to_limit(x: f64) -> u64 {
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        (x as u64).max(1)
    }
}

/// Whether the current run has used up its allowance.
#[inline]
pub fn should_restart(conflicts_since_restart: u64, limit: u64) -> bool {
    conflicts_since_restart >= limit
}
