//! Focal points: the statistical measurements a generator takes on its
//! training data, and the unit of shadow-profile bookkeeping.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A marginal over a feature set or a conditional of a child feature given a
/// parent set. Canonical form keeps feature lists sorted ascending so that
/// equality is structural; a conditional with no parents canonicalizes to
/// the child's 1-way marginal.
///
/// Feature indices normally index the schema; for the evolutionary generator
/// they index one-hot binary columns instead (the profile's generator kind
/// disambiguates).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FocalPoint {
    Marginal { features: Vec<usize> },
    Conditional { child: usize, parents: Vec<usize> },
}

fn sorted_distinct(features: &[usize], what: &str) -> Result<Vec<usize>> {
    let mut v = features.to_vec();
    v.sort_unstable();
    if v.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config(format!("duplicate feature in {what}")));
    }
    Ok(v)
}

impl FocalPoint {
    pub fn marginal(features: &[usize]) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Config("marginal needs at least one feature".into()));
        }
        Ok(FocalPoint::Marginal { features: sorted_distinct(features, "marginal")? })
    }

    pub fn conditional(child: usize, parents: &[usize]) -> Result<Self> {
        if parents.is_empty() {
            return FocalPoint::marginal(&[child]);
        }
        let parents = sorted_distinct(parents, "conditional parents")?;
        if parents.contains(&child) {
            return Err(Error::Config(format!("child {child} appears among its parents")));
        }
        Ok(FocalPoint::Conditional { child, parents })
    }

    /// All involved axes; for conditionals the child comes last.
    pub fn vars(&self) -> Vec<usize> {
        match self {
            FocalPoint::Marginal { features } => features.clone(),
            FocalPoint::Conditional { child, parents } => {
                let mut v = parents.clone();
                v.push(*child);
                v
            }
        }
    }

    pub fn is_conditional(&self) -> bool {
        matches!(self, FocalPoint::Conditional { .. })
    }

    /// Largest referenced index; for validating against a schema or one-hot
    /// width.
    pub fn max_index(&self) -> usize {
        self.vars().into_iter().max().unwrap_or(0)
    }
}

impl std::fmt::Display for FocalPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FocalPoint::Marginal { features } => {
                let s: Vec<String> = features.iter().map(|x| x.to_string()).collect();
                write!(f, "M({})", s.join(","))
            }
            FocalPoint::Conditional { child, parents } => {
                let s: Vec<String> = parents.iter().map(|x| x.to_string()).collect();
                write!(f, "C({child}|{})", s.join(","))
            }
        }
    }
}
