//! Edge features, parameter vectors, and edge weighting functions.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::logic::Atom;
use crate::symbol::Symbol;

/// A ground feature atom, stored by its canonical text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Feature(Symbol);

impl Feature {
    pub fn named(text: &str) -> Feature {
        Feature(Symbol::intern(text))
    }

    /// Feature for a ground atom. Callers check groundness.
    pub fn from_atom(atom: &Atom) -> Feature {
        Feature::named(&atom.to_string())
    }

    pub fn as_str(&self) -> &'static str {
        self.0.as_str()
    }

    /// Feature on edges produced by database lookups.
    pub fn db() -> Feature {
        Feature::named("db")
    }

    /// Feature on restart edges.
    pub fn restart() -> Feature {
        Feature::named("defRestart")
    }

    /// Feature on solution self-loops.
    pub fn self_loop() -> Feature {
        Feature::named("id(selfLoop)")
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0.as_str())
    }
}

/// Sparse feature vector attached to one edge.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeatureVector {
    entries: Vec<(Feature, f64)>,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(feature: Feature, value: f64) -> Self {
        FeatureVector {
            entries: vec![(feature, value)],
        }
    }

    /// Adds `value` to `feature`, creating the entry if needed.
    pub fn add(&mut self, feature: Feature, value: f64) {
        match self.entries.iter_mut().find(|(f, _)| *f == feature) {
            Some((_, v)) => *v += value,
            None => self.entries.push((feature, value)),
        }
    }

    /// Sets every listed feature to 1.0.
    pub fn indicator(features: impl IntoIterator<Item = Feature>) -> Self {
        let mut v = FeatureVector::new();
        for f in features {
            if v.get(f).is_none() {
                v.entries.push((f, 1.0));
            }
        }
        v
    }

    pub fn get(&self, feature: Feature) -> Option<f64> {
        self.entries
            .iter()
            .find(|(f, _)| *f == feature)
            .map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Feature, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dot(&self, w: &ParameterVector) -> f64 {
        self.entries.iter().map(|(f, v)| w.get(*f) * v).sum()
    }

    /// Parses `feat1=val1,feat2=val2`. Commas inside parentheses or quotes
    /// belong to the feature text.
    pub fn parse(text: &str) -> std::result::Result<FeatureVector, String> {
        let mut v = FeatureVector::new();
        if text.is_empty() {
            return Ok(v);
        }
        for item in split_top_level(text) {
            let eq = item
                .rfind('=')
                .ok_or_else(|| format!("missing '=' in feature entry '{item}'"))?;
            let value: f64 = item[eq + 1..]
                .parse()
                .map_err(|_| format!("bad feature value in '{item}'"))?;
            v.add(Feature::named(&item[..eq]), value);
        }
        Ok(v)
    }
}

fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut quoted = false;
    let mut escaped = false;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if quoted {
            match c {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '\'' => quoted = false,
                _ => {}
            }
            continue;
        }
        match c {
            '\'' => quoted = true,
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

impl fmt::Display for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (feat, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{feat}={v}")?;
        }
        Ok(())
    }
}

/// Feature weights; unseen features weigh 1.0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParameterVector {
    weights: HashMap<Feature, f64>,
}

impl ParameterVector {
    pub const DEFAULT_WEIGHT: f64 = 1.0;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, feature: Feature) -> f64 {
        self.weights
            .get(&feature)
            .copied()
            .unwrap_or(Self::DEFAULT_WEIGHT)
    }

    pub fn set(&mut self, feature: Feature, value: f64) {
        self.weights.insert(feature, value);
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Entries sorted by feature text.
    pub fn sorted(&self) -> Vec<(Feature, f64)> {
        let mut v: Vec<_> = self.weights.iter().map(|(f, w)| (*f, *w)).collect();
        v.sort_by_key(|e| e.0);
        v
    }

    /// TSV `feature<TAB>weight`, sorted by feature.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (f, w) in self.sorted() {
            out.push_str(&format!("{f}\t{w}\n"));
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<ParameterVector> {
        let mut p = ParameterVector::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: &str| Error::Format {
                what: "parameters",
                line: i + 1,
                message: message.to_string(),
            };
            let (feat, value) = line.rsplit_once('\t').ok_or_else(|| bad("expected two columns"))?;
            let value: f64 = value.trim().parse().map_err(|_| bad("bad weight"))?;
            if !value.is_finite() {
                return Err(bad("non-finite weight"));
            }
            p.set(Feature::named(feat), value);
        }
        Ok(p)
    }
}

impl FromIterator<(Feature, f64)> for ParameterVector {
    fn from_iter<T: IntoIterator<Item = (Feature, f64)>>(iter: T) -> Self {
        ParameterVector {
            weights: iter.into_iter().collect(),
        }
    }
}

/// Maps a weighted feature sum to a positive edge weight.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WeightFn {
    /// `max(w . phi, 1e-9)`
    #[default]
    Linear,
    /// `exp(w . phi)`
    Exp,
}

impl WeightFn {
    pub const LINEAR_FLOOR: f64 = 1e-9;

    /// Edge weight for a precomputed score `w . phi`.
    pub fn apply(self, score: f64) -> f64 {
        match self {
            WeightFn::Linear => score.max(Self::LINEAR_FLOOR),
            WeightFn::Exp => score.exp(),
        }
    }

    /// d weight / d score at `score`; zero where the linear floor is active.
    pub fn derivative(self, score: f64) -> f64 {
        match self {
            WeightFn::Linear => {
                if score > Self::LINEAR_FLOOR {
                    1.0
                } else {
                    0.0
                }
            }
            WeightFn::Exp => score.exp(),
        }
    }

    pub fn weight(self, phi: &FeatureVector, w: &ParameterVector) -> f64 {
        self.apply(phi.dot(w))
    }
}

impl FromStr for WeightFn {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "linear" => Ok(WeightFn::Linear),
            "exp" => Ok(WeightFn::Exp),
            other => Err(format!("unknown weight function '{other}'")),
        }
    }
}

impl fmt::Display for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightFn::Linear => "linear",
            WeightFn::Exp => "exp",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_vector_text_roundtrip_with_commas() {
        let mut v = FeatureVector::new();
        v.add(Feature::named("relatedFeature(w1,y)"), 1.0);
        v.add(Feature::named("defRestart"), 0.25);
        v.add(Feature::named("by('a,b')"), 2.0);
        let text = v.to_string();
        assert_eq!(FeatureVector::parse(&text).unwrap(), v);
    }

    #[test]
    fn default_weight_is_one() {
        let w = ParameterVector::new();
        assert_eq!(w.get(Feature::db()), 1.0);
        let phi = FeatureVector::indicator([Feature::named("sim"), Feature::named("link")]);
        assert_eq!(WeightFn::Linear.weight(&phi, &w), 2.0);
        assert!((WeightFn::Exp.weight(&phi, &w) - 2f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn linear_floor() {
        assert_eq!(WeightFn::Linear.apply(-3.0), WeightFn::LINEAR_FLOOR);
        assert_eq!(WeightFn::Linear.derivative(-3.0), 0.0);
    }

    #[test]
    fn parameter_tsv_roundtrip() {
        let p: ParameterVector = [(Feature::named("by(x,y)"), 0.5), (Feature::db(), 1.25)]
            .into_iter()
            .collect();
        assert_eq!(ParameterVector::from_tsv(&p.to_tsv()).unwrap(), p);
    }
}
