//! Checked-in theories and the verdicts they are expected to get.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::execution::Bounds;
use crate::frontend::{parse_theory, Diagnostic};
use crate::property::Verdict;
use crate::theory::Theory;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    Verified,
    Falsified,
    WitnessFound,
    NoWitness,
}

impl Expected {
    pub fn as_str(self) -> &'static str {
        match self {
            Expected::Verified => "verified",
            Expected::Falsified => "falsified",
            Expected::WitnessFound => "witness-found",
            Expected::NoWitness => "no-witness",
        }
    }

    pub fn matches(self, v: &Verdict) -> bool {
        self.as_str() == v.tag()
    }
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Expected {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "verified" => Ok(Expected::Verified),
            "falsified" => Ok(Expected::Falsified),
            "witness-found" => Ok(Expected::WitnessFound),
            "no-witness" => Ok(Expected::NoWitness),
            _ => Err(format!("unknown verdict `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusCase {
    pub name: String,
    /// Relative to the manifest's directory.
    pub file: PathBuf,
    #[serde(default)]
    pub bounds: Bounds,
    #[serde(default)]
    pub mutation_of: Option<String>,
    #[serde(default)]
    pub flips: Option<String>,
    pub expect: BTreeMap<String, Expected>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(rename = "case")]
    pub cases: Vec<CorpusCase>,
    #[serde(skip)]
    pub dir: PathBuf,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("malformed manifest: {0}")]
    Manifest(#[from] toml::de::Error),
    #[error("manifest is inconsistent: {0}")]
    Inconsistent(String),
    #[error("{0} does not parse ({} errors)", .1.len())]
    Parse(PathBuf, Vec<Diagnostic>),
    #[error("no corpus case named `{0}`")]
    UnknownCase(String),
}

/// The `corpus/` directory of this source tree.
pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Manifest, CorpusError> {
        let path = dir.join("manifest.toml");
        let text = std::fs::read_to_string(&path).map_err(|e| CorpusError::Io(path, e))?;
        let mut m: Manifest = toml::from_str(&text)?;
        m.dir = dir.to_path_buf();
        m.check()?;
        Ok(m)
    }

    pub fn load_default() -> Result<Manifest, CorpusError> {
        Manifest::load(&default_dir())
    }

    fn check(&self) -> Result<(), CorpusError> {
        let bad = |m: String| Err(CorpusError::Inconsistent(m));
        for (i, c) in self.cases.iter().enumerate() {
            if self.cases[..i].iter().any(|d| d.name == c.name) {
                return bad(format!("case `{}` appears twice", c.name));
            }
            match (&c.mutation_of, &c.flips) {
                (None, None) => {}
                (Some(base), Some(lemma)) => {
                    let Some(b) = self.case(base) else {
                        return bad(format!("`{}` is a mutation of unknown case `{base}`", c.name));
                    };
                    let differ: Vec<&String> =
                        c.expect.iter().filter(|(l, e)| b.expect.get(*l) != Some(e)).map(|(l, _)| l).collect();
                    if differ != [lemma] || b.expect.len() != c.expect.len() {
                        return bad(format!("`{}` must differ from `{base}` exactly in `{lemma}`", c.name));
                    }
                }
                _ => return bad(format!("`{}` needs both mutation_of and flips", c.name)),
            }
        }
        Ok(())
    }

    pub fn case(&self, name: &str) -> Option<&CorpusCase> {
        self.cases.iter().find(|c| c.name == name)
    }

    pub fn path(&self, case: &CorpusCase) -> PathBuf {
        self.dir.join(&case.file)
    }

    pub fn theory(&self, case: &CorpusCase) -> Result<Theory, CorpusError> {
        let path = self.path(case);
        let src = std::fs::read_to_string(&path).map_err(|e| CorpusError::Io(path.clone(), e))?;
        parse_theory(&src).map_err(|d| CorpusError::Parse(path, d))
    }

    pub fn theory_named(&self, name: &str) -> Result<Theory, CorpusError> {
        let case = self.case(name).ok_or_else(|| CorpusError::UnknownCase(name.to_string()))?;
        self.theory(case)
    }
}

/// The Permission Voucher model.
pub fn permission_voucher_model() -> Result<Theory, CorpusError> {
    Manifest::load_default()?.theory_named("permission_voucher")
}

/// The replay-prone theory and its nonce-protected fix.
pub fn replay_pair() -> Result<(Theory, Theory), CorpusError> {
    let m = Manifest::load_default()?;
    Ok((m.theory_named("replay_attack")?, m.theory_named("prevent_replay")?))
}
