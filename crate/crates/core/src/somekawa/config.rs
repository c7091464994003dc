use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_field::FieldExtension;
use crate::literal::{parse_field, parse_group};
use crate::semiabelian::SemiAbelian;

/// How the place `i(v)` receiving `h` is chosen where every slot is integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChoiceStrategy {
    /// The same slot at every such place (one function per slot).
    Constant,
    /// The first non-integral slot, slot 0 where there is none.
    FirstNonIntegral,
}

/// Which relation candidates are generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Enumeration {
    /// Degrees `m` such that `P^1` over `F_{q^m}` is a relation source; `None` means `1..=d`.
    pub p1_sources: Option<Vec<usize>>,
    /// Use the function fields of the elliptic parts as relation sources.
    pub elliptic_sources: bool,
    /// Largest degree of an irreducible `h`; `None` means `d`.
    pub h_degree: Option<usize>,
    /// Largest degree of a non-constant torus coordinate of `g`.
    pub g_degree: usize,
    /// Torus coordinates `(t - a)/(t - b)` are used over constant fields of at most this size.
    pub ratios_max_field: u64,
    /// On an elliptic source, also take `h = y - l x - m` for all `l, m` in `k`.
    pub lines: bool,
    pub choice: Vec<ChoiceStrategy>,
    /// Larger candidate sets of one source are subsampled (seeded) to this size.
    pub max_candidates_per_source: usize,
}

impl Default for Enumeration {
    fn default() -> Self {
        Enumeration {
            p1_sources: None,
            elliptic_sources: true,
            h_degree: None,
            g_degree: 1,
            ratios_max_field: 16,
            lines: true,
            choice: vec![ChoiceStrategy::Constant, ChoiceStrategy::FirstNonIntegral],
            max_candidates_per_source: 20_000,
        }
    }
}

/// A truncation of the Somekawa presentation: base field, groups, degree bound.
#[derive(Clone, Debug)]
pub struct TruncationConfig {
    pub base: FieldExtension,
    pub groups: Vec<SemiAbelian>,
    pub degree_bound: usize,
    pub enumeration: Enumeration,
    pub threads: usize,
    pub seed: u64,
}

/// JSON form of [`TruncationConfig`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub field: String,
    pub groups: Vec<String>,
    pub degree_bound: usize,
    #[serde(default)]
    pub enumeration: Enumeration,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

pub const DEFAULT_SEED: u64 = 0x5eed;

impl TruncationConfig {
    pub fn new(base: &FieldExtension, groups: Vec<SemiAbelian>, degree_bound: usize) -> Result<Self> {
        let cfg = TruncationConfig {
            base: base.clone(),
            groups,
            degree_bound,
            enumeration: Enumeration::default(),
            threads: 1,
            seed: DEFAULT_SEED,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_enumeration(mut self, e: Enumeration) -> Result<Self> {
        self.enumeration = e;
        self.validate()?;
        Ok(self)
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn rank(&self) -> usize {
        self.groups.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.groups.is_empty() || self.groups.len() > 3 {
            return Err(Error::Config(format!("between 1 and 3 groups are supported, got {}", self.groups.len())));
        }
        if self.degree_bound == 0 {
            return Err(Error::Config("degree bound must be positive".into()));
        }
        for g in &self.groups {
            if *g.base_field() != self.base {
                return Err(Error::Config(format!(
                    "group {} is not defined over {}",
                    g.literal(),
                    self.base.literal()
                )));
            }
        }
        if let Some(ms) = &self.enumeration.p1_sources {
            if ms.iter().any(|&m| m == 0 || m > self.degree_bound) {
                return Err(Error::Config("P1 source degrees must lie in 1..=d".into()));
            }
        }
        if self.enumeration.choice.is_empty() {
            return Err(Error::Config("at least one choice strategy is required".into()));
        }
        // every field of the truncation must exist under the cap
        self.groups[0].extension(self.degree_bound)?;
        Ok(())
    }

    pub fn from_file(f: &ConfigFile) -> Result<Self> {
        let base = parse_field(&f.field)?;
        let groups = f.groups.iter().map(|g| parse_group(&base, g)).collect::<Result<Vec<_>>>()?;
        let mut cfg = TruncationConfig::new(&base, groups, f.degree_bound)?.with_enumeration(f.enumeration.clone())?;
        cfg.threads = f.threads.unwrap_or(1).max(1);
        cfg.seed = f.seed.unwrap_or(DEFAULT_SEED);
        Ok(cfg)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: ConfigFile = serde_json::from_str(s).map_err(|e| Error::Parse(format!("config: {e}")))?;
        Self::from_file(&f)
    }

    pub fn to_file(&self) -> ConfigFile {
        ConfigFile {
            field: self.base.literal(),
            groups: self.groups.iter().map(|g| g.literal()).collect(),
            degree_bound: self.degree_bound,
            enumeration: self.enumeration.clone(),
            threads: Some(self.threads),
            seed: Some(self.seed),
        }
    }

    pub(crate) fn p1_source_degrees(&self) -> Vec<usize> {
        self.enumeration.p1_sources.clone().unwrap_or_else(|| (1..=self.degree_bound).collect())
    }

    pub(crate) fn h_degree(&self) -> usize {
        self.enumeration.h_degree.unwrap_or(self.degree_bound)
    }
}
