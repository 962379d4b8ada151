//! Feature schemas for categorical datasets.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Category code. Every stored cell is an index into its feature's domain.
pub type Cat = u16;

/// How a feature's codes map back to raw values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    /// Discrete feature; code `c` means `labels[c]`.
    Categorical { labels: Vec<String> },
    /// Discretized numeric feature with ascending interior bin edges.
    /// Code `c` means the interval `(edges[c-1], edges[c]]`, with the first
    /// and last intervals open towards -inf / +inf. Domain size is
    /// `edges.len() + 1`.
    Binned { edges: Vec<f64> },
}

/// One column of the schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    pub kind: FeatureKind,
}

impl Feature {
    pub fn categorical(name: &str, labels: &[&str]) -> Self {
        Feature {
            name: name.to_string(),
            kind: FeatureKind::Categorical { labels: labels.iter().map(|s| s.to_string()).collect() },
        }
    }

    /// Number of distinct codes this feature can take.
    pub fn domain(&self) -> usize {
        match &self.kind {
            FeatureKind::Categorical { labels } => labels.len(),
            FeatureKind::Binned { edges } => edges.len() + 1,
        }
    }

    /// Printable label for a code.
    pub fn label(&self, code: Cat) -> String {
        match &self.kind {
            FeatureKind::Categorical { labels } => labels[code as usize].clone(),
            FeatureKind::Binned { .. } => format!("bin{code}"),
        }
    }

    /// Inverse of [`Feature::label`]; for binned features also accepts a raw
    /// numeric string and maps it through the bin edges.
    pub fn code(&self, token: &str) -> Result<Cat> {
        match &self.kind {
            FeatureKind::Categorical { labels } => labels
                .iter()
                .position(|l| l == token)
                .map(|i| i as Cat)
                .ok_or_else(|| Error::Data(format!("unknown label {token:?} for feature {}", self.name))),
            FeatureKind::Binned { edges } => {
                if let Some(rest) = token.strip_prefix("bin") {
                    if let Ok(b) = rest.parse::<usize>() {
                        if b <= edges.len() {
                            return Ok(b as Cat);
                        }
                        return Err(Error::Data(format!("bin {b} out of range for feature {}", self.name)));
                    }
                }
                let v: f64 = token
                    .parse()
                    .map_err(|_| Error::Data(format!("cannot parse {token:?} for binned feature {}", self.name)))?;
                if v.is_nan() {
                    return Err(Error::Data(format!("NaN value for feature {}", self.name)));
                }
                Ok(super::binning::bin_of(v, edges) as Cat)
            }
        }
    }
}

/// Ordered feature list shared by all rows of a dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub features: Vec<Feature>,
}

impl Schema {
    pub fn new(features: Vec<Feature>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Config("schema needs at least one feature".into()));
        }
        for f in &features {
            if f.domain() == 0 {
                return Err(Error::Config(format!("feature {} has empty domain", f.name)));
            }
            if f.domain() > Cat::MAX as usize + 1 {
                return Err(Error::Config(format!("feature {} domain exceeds code range", f.name)));
            }
        }
        for i in 1..features.len() {
            if features[..i].iter().any(|g| g.name == features[i].name) {
                return Err(Error::Config(format!("duplicate feature name {}", features[i].name)));
            }
        }
        Ok(Schema { features })
    }

    /// All-categorical schema with numbered value labels; handy for tests and
    /// synthetic populations.
    pub fn uniform<S: AsRef<str>>(names: &[S], domains: &[usize]) -> Result<Self> {
        let features = names
            .iter()
            .zip(domains)
            .map(|(n, &m)| Feature {
                name: n.as_ref().to_string(),
                kind: FeatureKind::Categorical { labels: (0..m).map(|v| format!("v{v}")).collect() },
            })
            .collect();
        Schema::new(features)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature(&self, i: usize) -> &Feature {
        &self.features[i]
    }

    /// Domain size of feature `i`.
    pub fn domain(&self, i: usize) -> usize {
        self.features[i].domain()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// Product of domain sizes over a feature subset, saturating at u128.
    pub fn cells(&self, feats: &[usize]) -> u128 {
        feats.iter().fold(1u128, |acc, &f| acc.saturating_mul(self.domain(f) as u128))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_and_labels() {
        let f = Feature::categorical("color", &["red", "green", "blue"]);
        assert_eq!(f.domain(), 3);
        assert_eq!(f.label(2), "blue");
        assert_eq!(f.code("green").unwrap(), 1);
        assert!(f.code("mauve").is_err());
    }

    #[test]
    fn binned_codes() {
        let f = Feature { name: "x".to_string(), kind: FeatureKind::Binned { edges: vec![25.0, 50.0, 75.0] } };
        assert_eq!(f.domain(), 4);
        assert_eq!(f.code("bin2").unwrap(), 2);
        assert_eq!(f.code("25").unwrap(), 0); // right-closed: 25 falls in (-inf, 25]
        assert_eq!(f.code("25.1").unwrap(), 1);
        assert_eq!(f.code("1000").unwrap(), 3);
        assert!(f.code("bin4").is_err());
        assert!(f.code("NaN").is_err());
    }

    #[test]
    fn schema_validation() {
        assert!(Schema::new(vec![]).is_err());
        let dup = vec![Feature::categorical("a", &["x"]), Feature::categorical("a", &["y"])];
        assert!(Schema::new(dup).is_err());
        let empty = vec![Feature::categorical("a", &[])];
        assert!(Schema::new(empty).is_err());
    }

    #[test]
    fn cells_product() {
        let s = Schema::uniform(&["a", "b", "c"], &[2, 3, 5]).unwrap();
        assert_eq!(s.cells(&[0, 1, 2]), 30);
        assert_eq!(s.cells(&[1]), 3);
        assert_eq!(s.cells(&[]), 1);
    }
}
