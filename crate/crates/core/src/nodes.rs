//! Node multisets: the argument lists of divided differences.

use std::fmt;

use crate::error::{argument, domain, Result};

/// Sorted distinct node values with multiplicities.
///
/// Two nodes are the same iff their values are bit-identical after mapping
/// `-0.0` to `0.0`; near-duplicates stay separate entries.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMultiset {
    entries: Vec<(f64, usize)>,
}

fn canonical(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

impl NodeMultiset {
    /// Builds a multiset from a flat node list in any order.
    pub fn from_flat(nodes: &[f64]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(argument("node list is empty"));
        }
        if let Some(bad) = nodes.iter().find(|x| !x.is_finite()) {
            return Err(domain(format!("non-finite node {bad}")));
        }
        let mut sorted: Vec<f64> = nodes.iter().copied().map(canonical).collect();
        sorted.sort_by(f64::total_cmp);
        let mut entries: Vec<(f64, usize)> = Vec::new();
        for x in sorted {
            match entries.last_mut() {
                Some((v, m)) if v.to_bits() == x.to_bits() => *m += 1,
                _ => entries.push((x, 1)),
            }
        }
        Ok(Self { entries })
    }

    /// Builds a multiset from `(value, multiplicity)` pairs; equal values merge.
    pub fn from_pairs(pairs: &[(f64, usize)]) -> Result<Self> {
        if pairs.iter().any(|&(_, m)| m == 0) {
            return Err(argument("multiplicity must be at least 1"));
        }
        let flat: Vec<f64> = pairs
            .iter()
            .flat_map(|&(v, m)| std::iter::repeat_n(v, m))
            .collect();
        Self::from_flat(&flat)
    }

    /// `n+1` copies of `x`.
    pub fn repeated(x: f64, count: usize) -> Result<Self> {
        Self::from_pairs(&[(x, count)])
    }

    pub fn entries(&self) -> &[(f64, usize)] {
        &self.entries
    }

    /// Total number of nodes, counting multiplicity.
    pub fn len(&self) -> usize {
        self.entries.iter().map(|&(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The `n` of `exp[x_0, ..., x_n]`.
    pub fn order(&self) -> usize {
        self.len() - 1
    }

    /// Ascending flat node sequence.
    pub fn flat(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|&(v, m)| std::iter::repeat_n(v, m))
            .collect()
    }

    pub fn min(&self) -> f64 {
        self.entries[0].0
    }

    pub fn max(&self) -> f64 {
        self.entries[self.entries.len() - 1].0
    }

    /// Union with another multiset (multiplicities add).
    pub fn union(&self, other: &NodeMultiset) -> NodeMultiset {
        let mut flat = self.flat();
        flat.extend(other.flat());
        Self::from_flat(&flat).expect("union of valid multisets is valid")
    }

    /// Adds `count` copies of `x`.
    pub fn with(&self, x: f64, count: usize) -> Result<NodeMultiset> {
        let mut flat = self.flat();
        flat.extend(std::iter::repeat_n(x, count));
        Self::from_flat(&flat)
    }

    /// Applies `f` to every node.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<NodeMultiset> {
        let flat: Vec<f64> = self.flat().into_iter().map(f).collect();
        Self::from_flat(&flat)
    }
}

impl fmt::Display for NodeMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, &(v, m)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if m == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{m}")?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_and_sorts() {
        let s = NodeMultiset::from_flat(&[2.0, -1.0, 2.0, 0.0, -0.0]).unwrap();
        assert_eq!(s.entries(), &[(-1.0, 1), (0.0, 2), (2.0, 2)]);
        assert_eq!(s.len(), 5);
        assert_eq!(s.order(), 4);
        assert_eq!(s.flat(), vec![-1.0, 0.0, 0.0, 2.0, 2.0]);
    }

    #[test]
    fn near_duplicates_are_not_merged() {
        let x = 1.0_f64;
        let s = NodeMultiset::from_flat(&[x, x + f64::EPSILON]).unwrap();
        assert_eq!(s.entries().len(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(NodeMultiset::from_flat(&[]), Err(crate::DdError::Argument(_))));
        assert!(matches!(
            NodeMultiset::from_flat(&[1.0, f64::NAN]),
            Err(crate::DdError::Domain(_))
        ));
        assert!(NodeMultiset::from_pairs(&[(1.0, 0)]).is_err());
    }

    #[test]
    fn display_uses_power_syntax() {
        let s = NodeMultiset::from_pairs(&[(0.0, 3), (1.5, 1)]).unwrap();
        assert_eq!(s.to_string(), "[0^3 1.5]");
    }
}
