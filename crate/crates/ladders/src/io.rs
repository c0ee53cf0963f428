//! File formats: the JSON poset document and DOT export of Hasse diagrams.

use crate::poset::{FinitePoset, PosetError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum DocError {
    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Covers,
    Leq,
}

/// On-disk poset document. With `relation_kind = covers` the order is the
/// reflexive-transitive closure of `pairs`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PosetDoc {
    pub elements: Vec<String>,
    pub relation_kind: RelationKind,
    pub pairs: Vec<(String, String)>,
}

impl PosetDoc {
    pub fn to_poset(&self) -> Result<FinitePoset, PosetError> {
        match self.relation_kind {
            RelationKind::Covers => FinitePoset::from_covers(self.elements.clone(), &self.pairs),
            RelationKind::Leq => FinitePoset::from_leq_pairs(self.elements.clone(), &self.pairs),
        }
    }

    pub fn from_json(s: &str) -> Result<PosetDoc, DocError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

/// Canonical form: sorted ids, covers only, pairs sorted.
pub fn canonical_doc(p: &FinitePoset) -> PosetDoc {
    let mut elements: Vec<String> = p.ids().to_vec();
    elements.sort();
    let mut pairs = Vec::new();
    for x in 0..p.len() {
        for q in p.lower_covers(x) {
            pairs.push((p.id(q).to_string(), p.id(x).to_string()));
        }
    }
    pairs.sort();
    PosetDoc {
        elements,
        relation_kind: RelationKind::Covers,
        pairs,
    }
}

pub fn poset_from_json(s: &str) -> Result<FinitePoset, DocError> {
    Ok(PosetDoc::from_json(s)?.to_poset()?)
}

pub fn poset_to_json(p: &FinitePoset) -> String {
    canonical_doc(p).to_json()
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Cover-edge digraph in deterministic node order, edges pointing upward.
pub fn export_dot(p: &FinitePoset) -> String {
    let doc = canonical_doc(p);
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=circle];\n");
    for id in &doc.elements {
        out.push_str(&format!("  {};\n", dot_quote(id)));
    }
    for (a, b) in &doc.pairs {
        out.push_str(&format!("  {} -> {};\n", dot_quote(a), dot_quote(b)));
    }
    out.push_str("}\n");
    out
}

/// Order-isomorphism via the identity on ids (same ids, same relation).
pub fn order_isomorphic_by_ids(a: &FinitePoset, b: &FinitePoset) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut ids_a: Vec<&String> = a.ids().iter().collect();
    let mut ids_b: Vec<&String> = b.ids().iter().collect();
    ids_a.sort();
    ids_b.sort();
    if ids_a != ids_b {
        return false;
    }
    for x in a.ids() {
        for y in a.ids() {
            let i = (a.index(x).unwrap(), a.index(y).unwrap());
            let j = (b.index(x).unwrap(), b.index(y).unwrap());
            if a.leq(i.0, i.1) != b.leq(j.0, j.1) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::fixtures::*;

    #[test]
    fn roundtrip_is_canonical() {
        let p = m3();
        let json = poset_to_json(&p);
        let q = poset_from_json(&json).unwrap();
        assert!(order_isomorphic_by_ids(&p, &q));
        // canonical form is a fixpoint
        assert_eq!(json, poset_to_json(&q));
    }

    #[test]
    fn dot_m3_counts() {
        let dot = export_dot(&m3());
        assert_eq!(dot.matches(" -> ").count(), 6);
        let single = antichain(1);
        let d1 = export_dot(&single);
        assert_eq!(d1.matches(" -> ").count(), 0);
        let d3 = export_dot(&chain(3));
        assert_eq!(d3.matches(" -> ").count(), 2);
    }

    #[test]
    fn leq_kind_parses() {
        let doc = r#"{"elements":["a","b"],"relation_kind":"leq","pairs":[["a","a"],["b","b"],["a","b"]]}"#;
        let p = poset_from_json(doc).unwrap();
        assert!(p.validate().passed());
        assert_eq!(p.join_ids("a", "b").unwrap(), Some("b"));
    }
}
