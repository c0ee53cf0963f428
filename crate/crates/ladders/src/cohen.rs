//! Finite combinatorial core of the condition-poset construction: tree-indexed
//! ideal families over a base lattice, derived blocks partitioning the base,
//! finite partial conditions, the recursive candidate-set computation, and the
//! density step, with the structural claims as checkable properties.

use crate::bits::Bits;
use crate::poset::{FinitePoset, IdealSet};
use crate::report::Report;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum CohenError {
    #[error("malformed family: {0}")]
    MalformedFamily(String),
    #[error("malformed condition: {0}")]
    MalformedCondition(String),
    #[error("family fails validation:\n{0}")]
    InvalidFamily(Report),
    #[error("conditions are incompatible at ({node}, {slot})")]
    Incompatible { node: String, slot: u32 },
}

/// Tree nodes are value sequences; `Vec` ordering is exactly the
/// lexicographic order with prefixes first.
pub type NodeSeq = Vec<u32>;

pub fn node_key(node: &NodeSeq) -> String {
    node.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_node(s: &str) -> Result<NodeSeq, CohenError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CohenError::MalformedFamily(format!("bad node `{s}`")))
        })
        .collect()
}

/// Strictly lex-smaller and not a prefix.
pub fn lex_before_non_prefix(a: &NodeSeq, b: &NodeSeq) -> bool {
    a < b && !b.starts_with(a)
}

/// Ideal family over a finite lattice, indexed by the full tree with the given
/// per-depth branching. The cardinal clauses are finitized to per-depth size
/// floors (strictly decreasing) and block nonemptiness.
#[derive(Clone, Debug)]
pub struct IdealFamily {
    base: FinitePoset,
    branching: Vec<u32>,
    thresholds: Vec<usize>,
    ideals: BTreeMap<NodeSeq, Bits>,
}

impl IdealFamily {
    pub fn new(
        base: FinitePoset,
        branching: Vec<u32>,
        thresholds: Vec<usize>,
        ideals: BTreeMap<NodeSeq, Bits>,
    ) -> IdealFamily {
        IdealFamily {
            base,
            branching,
            thresholds,
            ideals,
        }
    }

    pub fn base(&self) -> &FinitePoset {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.branching.len()
    }

    pub fn branching(&self) -> &[u32] {
        &self.branching
    }

    fn node_set(&self) -> Vec<NodeSeq> {
        let mut out = vec![Vec::new()];
        let mut frontier = vec![NodeSeq::new()];
        for depth in 0..self.n() {
            let mut next = Vec::new();
            for node in frontier {
                for v in 0..self.branching[depth] {
                    let mut child = node.clone();
                    child.push(v);
                    out.push(child.clone());
                    next.push(child);
                }
            }
            frontier = next;
        }
        out.sort();
        out
    }

    pub fn leaves(&self) -> Vec<NodeSeq> {
        self.node_set()
            .into_iter()
            .filter(|n| n.len() == self.n())
            .collect()
    }

    pub fn ideal(&self, node: &NodeSeq) -> Option<&Bits> {
        self.ideals.get(node)
    }

    /// Block of a leaf: its ideal minus every lex-earlier non-prefix ideal.
    pub fn block(&self, leaf: &NodeSeq) -> Bits {
        let mut block = self.ideals[leaf].clone();
        for (other, ideal) in &self.ideals {
            if lex_before_non_prefix(other, leaf) {
                for i in ideal.iter_ones() {
                    block.clear(i);
                }
            }
        }
        block
    }

    /// Lex-least leaf whose ideal contains `x`.
    pub fn alpha_of(&self, x: usize) -> NodeSeq {
        self.leaves()
            .into_iter()
            .find(|leaf| self.ideals[leaf].get(x))
            .expect("the root ideal is everything, so some leaf contains x")
    }

    pub fn pi_node(&self, node: &NodeSeq, x: usize) -> usize {
        let ideal = IdealSet::from_unchecked(self.ideals[node].clone());
        self.base
            .pi(&ideal, x)
            .expect("family ideals contain the least element")
    }

    /// Clause-by-clause validation of the finitized family properties.
    pub fn validate(&self) -> Report {
        let mut rep = Report::pass();
        if self.thresholds.len() != self.n() + 1 {
            rep.add_witness(
                "thresholds-wrong-length",
                vec![self.thresholds.len().to_string()],
            );
            return rep;
        }
        if self.thresholds.windows(2).any(|w| w[0] <= w[1]) {
            rep.add_witness(
                "thresholds-not-strictly-decreasing",
                self.thresholds.iter().map(|t| t.to_string()).collect(),
            );
        }
        let nodes = self.node_set();
        for node in &nodes {
            match self.ideals.get(node) {
                None => {
                    rep.add_witness("missing-ideal", vec![node_key(node)]);
                    return rep;
                }
                Some(bits) => {
                    let sub = self.base.is_ideal(bits);
                    if !sub.passed() {
                        rep.add_witness("assignment-not-an-ideal", vec![node_key(node)]);
                    }
                }
            }
        }
        // (1) the root ideal is the whole base
        if self.ideals[&Vec::new()].count() != self.base.len() {
            rep.add_witness("root-not-whole-lattice", vec![]);
        }
        for node in &nodes {
            let depth = node.len();
            // (7) finitized: per-depth size floors
            if self.ideals[node].count() < self.thresholds[depth] {
                rep.add_witness(
                    "ideal-below-size-floor",
                    vec![
                        node_key(node),
                        self.ideals[node].count().to_string(),
                        self.thresholds[depth].to_string(),
                    ],
                );
            }
            if depth == self.n() {
                continue;
            }
            // (2) the ideal is the union of its children's
            let mut union = Bits::new(self.base.len());
            for v in 0..self.branching[depth] {
                let mut child = node.clone();
                child.push(v);
                union.or_assign(&self.ideals[&child]);
            }
            if union != self.ideals[node] {
                rep.add_witness("ideal-not-union-of-children", vec![node_key(node)]);
            }
            // (3) children increase along the last coordinate
            for v in 1..self.branching[depth] {
                let (mut lo, mut hi) = (node.clone(), node.clone());
                lo.push(v - 1);
                hi.push(v);
                if !self.ideals[&lo].subset_of(&self.ideals[&hi]) {
                    rep.add_witness(
                        "children-not-increasing",
                        vec![node_key(&lo), node_key(&hi)],
                    );
                }
            }
        }
        rep.note("(4) vacuously satisfied: no limit nodes at finite scale");
        // (5) finitized: nonempty blocks
        for leaf in self.leaves() {
            if self.block(&leaf).is_empty() {
                rep.add_witness("empty-block", vec![node_key(&leaf)]);
            }
        }
        // (6) absorption of met blocks
        for node in &nodes {
            for leaf in self.leaves() {
                if !lex_before_non_prefix(&leaf, node) && leaf != *node {
                    continue;
                }
                if leaf == *node {
                    continue;
                }
                let mut met = self.ideals[node].and(&self.ideals[&leaf]);
                met.and_assign(&self.block(&leaf));
                if !met.is_empty() && !self.ideals[&leaf].subset_of(&self.ideals[node]) {
                    rep.add_witness("absorption-violated", vec![node_key(node), node_key(&leaf)]);
                }
            }
        }
        rep.truncate_witnesses(20);
        rep
    }

    pub fn to_doc(&self) -> FamilyDoc {
        FamilyDoc {
            base: crate::io::canonical_doc(&self.base),
            branching: self.branching.clone(),
            thresholds: self.thresholds.clone(),
            ideals: self
                .ideals
                .iter()
                .map(|(node, bits)| {
                    let mut ids: Vec<String> = bits
                        .iter_ones()
                        .map(|i| self.base.id(i).to_string())
                        .collect();
                    ids.sort();
                    (node_key(node), ids)
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &FamilyDoc) -> Result<IdealFamily, CohenError> {
        let base = doc
            .base
            .to_poset()
            .map_err(|e| CohenError::MalformedFamily(e.to_string()))?;
        let mut ideals = BTreeMap::new();
        for (key, ids) in &doc.ideals {
            let node = parse_node(key)?;
            let mut bits = Bits::new(base.len());
            for id in ids {
                let i = base
                    .index(id)
                    .ok_or_else(|| CohenError::MalformedFamily(format!("unknown element {id}")))?;
                bits.set(i);
            }
            ideals.insert(node, bits);
        }
        Ok(IdealFamily::new(
            base,
            doc.branching.clone(),
            doc.thresholds.clone(),
            ideals,
        ))
    }
}

/// JSON form: base poset, branching, floors, and element ids per node key.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub base: PosetDocAlias,
    pub branching: Vec<u32>,
    pub thresholds: Vec<usize>,
    pub ideals: BTreeMap<String, Vec<String>>,
}

pub type PosetDocAlias = crate::io::PosetDoc;

/// Finite partial map from (leaf, slot) to elements of the leaf's block.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Condition {
    entries: BTreeMap<(NodeSeq, u32), usize>,
}

impl Condition {
    pub fn empty() -> Condition {
        Condition::default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(NodeSeq, u32), &usize)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, node: &NodeSeq, slot: u32) -> Option<usize> {
        self.entries.get(&(node.clone(), slot)).copied()
    }

    pub fn insert(&mut self, node: NodeSeq, slot: u32, value: usize) {
        self.entries.insert((node, slot), value);
    }

    /// Values must lie in the block of their leaf.
    pub fn validate(&self, fam: &IdealFamily) -> Result<(), CohenError> {
        for ((node, slot), &value) in &self.entries {
            if node.len() != fam.n() {
                return Err(CohenError::MalformedCondition(format!(
                    "node {} is not a leaf",
                    node_key(node)
                )));
            }
            if fam.ideal(node).is_none() {
                return Err(CohenError::MalformedCondition(format!(
                    "unknown node {}",
                    node_key(node)
                )));
            }
            if !fam.block(node).get(value) {
                return Err(CohenError::MalformedCondition(format!(
                    "value {} at ({}, {slot}) lies outside the block",
                    fam.base.id(value),
                    node_key(node)
                )));
            }
        }
        Ok(())
    }

    /// `self` extends `other` (is a stronger condition).
    pub fn extends(&self, other: &Condition) -> bool {
        other
            .entries
            .iter()
            .all(|(k, v)| self.entries.get(k) == Some(v))
    }

    pub fn to_doc(&self, fam: &IdealFamily) -> ConditionDoc {
        ConditionDoc {
            entries: self
                .entries
                .iter()
                .map(|((node, slot), &value)| ConditionEntry {
                    node: node_key(node),
                    slot: *slot,
                    value: fam.base.id(value).to_string(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &ConditionDoc, fam: &IdealFamily) -> Result<Condition, CohenError> {
        let mut cond = Condition::empty();
        for e in &doc.entries {
            let node = parse_node(&e.node)?;
            let value = fam
                .base
                .index(&e.value)
                .ok_or_else(|| CohenError::MalformedCondition(format!("unknown element {}", e.value)))?;
            cond.insert(node, e.slot, value);
        }
        cond.validate(fam)?;
        Ok(cond)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub node: String,
    pub slot: u32,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionDoc {
    pub entries: Vec<ConditionEntry>,
}

/// The candidate set of a condition, by recursion over the lex order of the
/// leaves: an element joins when some slot names it, all earlier slots of the
/// same leaf sit below it, and every lex-earlier non-prefix projection of it
/// has already joined.
pub fn c_of(fam: &IdealFamily, cond: &Condition) -> Result<Bits, CohenError> {
    cond.validate(fam)?;
    let mut c = Bits::new(fam.base.len());
    let nodes = fam.node_set();
    for leaf in fam.leaves() {
        let block = fam.block(&leaf);
        for x in block.iter_ones() {
            let slot_ok = cond
                .entries
                .iter()
                .filter(|((node, _), &v)| *node == leaf && v == x)
                .any(|((_, m), _)| {
                    (0..*m).all(|k| {
                        cond.get(&leaf, k)
                            .map(|v| fam.base.leq(v, x))
                            .unwrap_or(false)
                    })
                });
            if !slot_ok {
                continue;
            }
            let proj_ok = nodes
                .iter()
                .filter(|g| lex_before_non_prefix(g, &leaf))
                .all(|g| c.get(fam.pi_node(g, x)));
            if proj_ok {
                c.set(x);
            }
        }
    }
    Ok(c)
}

/// The density step: fill slot gaps (with the lex-least block element), join
/// the condition's values with `x`, and append the projections of the result
/// at the first free slots of every leaf its down-set meets. Returns the
/// stronger condition and the element, which lies in its candidate set.
pub fn density_extend(
    fam: &IdealFamily,
    cond: &Condition,
    x: usize,
) -> Result<(Condition, usize), CohenError> {
    cond.validate(fam)?;
    let mut p = cond.clone();
    for leaf in fam.leaves() {
        let max_slot = p
            .entries
            .iter()
            .filter(|((n, _), _)| *n == leaf)
            .map(|((_, m), _)| *m)
            .max();
        if let Some(max_slot) = max_slot {
            let block = fam.block(&leaf);
            let filler = block
                .iter_ones()
                .min_by_key(|&i| fam.base.id(i).to_string())
                .expect("blocks of validated families are nonempty");
            for k in 0..max_slot {
                if p.get(&leaf, k).is_none() {
                    p.insert(leaf.clone(), k, filler);
                }
            }
        }
    }
    let mut y = x;
    for (_, &v) in p.entries() {
        y = fam.base.join(y, v).expect("base is a lattice");
    }
    let reach: Vec<NodeSeq> = {
        let mut seen = Vec::new();
        for z in fam.base.down_row(y).iter_ones() {
            let a = fam.alpha_of(z);
            if !seen.contains(&a) {
                seen.push(a);
            }
        }
        seen.sort();
        seen
    };
    let mut q = p.clone();
    for leaf in reach {
        let free = (0u32..)
            .find(|&m| q.get(&leaf, m).is_none())
            .expect("slots are finite");
        let value = fam.pi_node(&leaf, y);
        q.insert(leaf.clone(), free, value);
    }
    Ok((q, y))
}

/// Union of pairwise compatible conditions; errors on the first clash.
pub fn compatible_union(conditions: &[Condition]) -> Result<Condition, CohenError> {
    let mut union = Condition::empty();
    for cond in conditions {
        for ((node, slot), &value) in &cond.entries {
            match union.get(node, *slot) {
                None => union.insert(node.clone(), *slot, value),
                Some(v) if v == value => {}
                Some(_) => {
                    return Err(CohenError::Incompatible {
                        node: node_key(node),
                        slot: *slot,
                    })
                }
            }
        }
    }
    Ok(union)
}

/// Checks over the union of the candidate sets of a compatible family:
/// meet-closure, the cover bound (one more than the tree depth), and
/// monotonicity under strengthening.
pub fn filter_union_checks(fam: &IdealFamily, conditions: &[Condition]) -> Result<Report, CohenError> {
    for cond in conditions {
        cond.validate(fam)?;
    }
    compatible_union(conditions)?;
    let mut rep = Report::pass();
    let mut c_g = Bits::new(fam.base.len());
    let mut sets = Vec::new();
    for cond in conditions {
        let c = c_of(fam, cond)?;
        c_g.or_assign(&c);
        sets.push(c);
    }
    // monotonicity: stronger conditions have larger candidate sets
    for (i, a) in conditions.iter().enumerate() {
        for (j, b) in conditions.iter().enumerate() {
            if i != j && a.extends(b) && !sets[j].subset_of(&sets[i]) {
                rep.add_witness(
                    "candidate-set-not-monotone",
                    vec![i.to_string(), j.to_string()],
                );
            }
        }
    }
    // meet closure
    let members: Vec<usize> = c_g.iter_ones().collect();
    for (ai, &a) in members.iter().enumerate() {
        for &b in &members[ai + 1..] {
            let m = fam.base.meet(a, b).expect("base is a lattice");
            if !c_g.get(m) {
                rep.add_witness(
                    "union-not-meet-closed",
                    vec![
                        fam.base.id(a).to_string(),
                        fam.base.id(b).to_string(),
                        fam.base.id(m).to_string(),
                    ],
                );
            }
        }
    }
    // cover bound n + 1 in the induced order
    let (sub, _) = fam.base.restrict(&c_g);
    for z in 0..sub.len() {
        let covers = sub.lower_covers(z);
        if covers.len() > fam.n() + 1 {
            rep.add_witness(
                "union-cover-bound-exceeded",
                std::iter::once(sub.id(z).to_string())
                    .chain(covers.iter().map(|&q| sub.id(q).to_string()))
                    .collect(),
            );
        }
    }
    rep.note(format!("union candidate set has {} elements", c_g.count()));
    rep.truncate_witnesses(20);
    Ok(rep)
}

/// Grow an ideal chain from a seed to `target` by repeatedly adjoining a fresh
/// element and closing; the closure mirrors the met-block absorption loop.
fn close_with_absorption(fam_ideals: &BTreeMap<NodeSeq, Bits>, base: &FinitePoset, seed: &Bits, upto: &NodeSeq) -> Bits {
    let mut current = seed.clone();
    loop {
        let closed = base
            .ideal_generated(&current)
            .expect("base is a lattice")
            .carrier()
            .clone();
        current = closed;
        let mut grew = false;
        let leaves: Vec<&NodeSeq> = fam_ideals
            .keys()
            .filter(|k| k.len() == upto.len() && lex_before_non_prefix(k, upto))
            .collect();
        for leaf in leaves {
            // met block: leaf ideal minus all lex-earlier ideals
            let mut block = fam_ideals[leaf].clone();
            for (other, ideal) in fam_ideals {
                if lex_before_non_prefix(other, leaf) {
                    for i in ideal.iter_ones() {
                        block.clear(i);
                    }
                }
            }
            block.and_assign(&current);
            if !block.is_empty() && !fam_ideals[leaf].subset_of(&current) {
                current.or_assign(&fam_ideals[leaf]);
                grew = true;
            }
        }
        if !grew {
            return current;
        }
    }
}

/// Toy family generator for depth 1 or 2 over a random small lattice, by
/// greedy ideal growth with the absorption closure after every step. Returns
/// a family that passes validation, or nothing if the random choices collapse
/// (callers retry with fresh randomness).
pub fn toy_family(rng: &mut ChaCha8Rng, base: FinitePoset, depth: usize) -> Option<IdealFamily> {
    use rand::prelude::IteratorRandom;
    assert!((1..=2).contains(&depth));
    let all = Bits::from_indices(base.len(), 0..base.len());
    let mut ideals: BTreeMap<NodeSeq, Bits> = BTreeMap::new();
    ideals.insert(Vec::new(), all.clone());

    if depth == 1 {
        // a strictly increasing chain of ideals ending at the whole base
        let mut chain: Vec<Bits> = Vec::new();
        let seed_elem = (0..base.len()).choose(rng)?;
        let mut seed = Bits::new(base.len());
        seed.set(seed_elem);
        let mut current = base.ideal_generated(&seed).ok()?.carrier().clone();
        while current.count() < base.len() && chain.len() < 3 {
            chain.push(current.clone());
            let fresh = (0..base.len()).filter(|&i| !current.get(i)).choose(rng)?;
            current.set(fresh);
            current = base.ideal_generated(&current).ok()?.carrier().clone();
        }
        chain.push(all.clone());
        if chain.len() < 2 {
            return None;
        }
        let min_size = chain.iter().map(|c| c.count()).min().unwrap();
        if min_size >= base.len() {
            return None;
        }
        for (v, c) in chain.iter().enumerate() {
            ideals.insert(vec![v as u32], c.clone());
        }
        let fam = IdealFamily::new(
            base,
            vec![chain.len() as u32],
            vec![all.count(), min_size],
            ideals,
        );
        return fam.validate().passed().then_some(fam);
    }

    // depth 2: two levels, two children per node
    let seed_elem = (0..base.len()).choose(rng)?;
    let mut seed = Bits::new(base.len());
    seed.set(seed_elem);
    let i0 = base.ideal_generated(&seed).ok()?.carrier().clone();
    if i0.count() == base.len() {
        return None;
    }
    ideals.insert(vec![0], i0.clone());
    ideals.insert(vec![1], all.clone());
    for j in 0..2u32 {
        let parent = ideals[&vec![j]].clone();
        let outside_prev: Vec<usize> = parent
            .iter_ones()
            .filter(|&i| j == 0 || !ideals[&vec![0]].get(i))
            .collect();
        let pick = *outside_prev.iter().choose(rng)?;
        let mut seed = Bits::new(base.len());
        seed.set(pick);
        let node = vec![j, 0];
        let child0 = close_with_absorption(&ideals, &base, &seed, &node);
        if !child0.subset_of(&parent) || child0 == parent {
            return None;
        }
        ideals.insert(vec![j, 0], child0);
        ideals.insert(vec![j, 1], parent);
    }
    let t1 = (0..2u32).map(|j| ideals[&vec![j]].count()).min().unwrap();
    let t2 = (0..2u32)
        .flat_map(|j| (0..2u32).map(move |m| (j, m)))
        .map(|(j, m)| ideals[&vec![j, m]].count())
        .min()
        .unwrap();
    if !(base.len() > t1 && t1 > t2) {
        return None;
    }
    let fam = IdealFamily::new(base, vec![2, 2], vec![all.count(), t1, t2], ideals);
    fam.validate().passed().then_some(fam)
}

/// Retry wrapper: random base lattice plus `toy_family` until one validates.
pub fn random_toy_family(rng: &mut ChaCha8Rng, depth: usize, max_base: usize) -> IdealFamily {
    loop {
        let base = crate::gen::random_lattice(rng, max_base);
        if base.len() < 3 {
            continue;
        }
        if let Some(fam) = toy_family(rng, base, depth) {
            return fam;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::substream;
    use crate::poset::fixtures::*;

    fn chain_family() -> IdealFamily {
        // 4-chain split into a two-step chain of ideals
        let base = chain(4);
        let all = Bits::from_indices(4, 0..4);
        let mut ideals = BTreeMap::new();
        ideals.insert(vec![], all.clone());
        ideals.insert(vec![0], Bits::from_indices(4, 0..2));
        ideals.insert(vec![1], all);
        IdealFamily::new(base, vec![2], vec![4, 2], ideals)
    }

    #[test]
    fn chain_family_validates() {
        let fam = chain_family();
        let rep = fam.validate();
        assert!(rep.passed(), "{rep}");
        // blocks partition the base
        let mut seen = Bits::new(4);
        for leaf in fam.leaves() {
            let b = fam.block(&leaf);
            assert!(!b.is_empty());
            assert!(b.and(&seen).is_empty(), "blocks overlap");
            seen.or_assign(&b);
        }
        assert_eq!(seen.count(), 4, "blocks cover the base");
    }

    #[test]
    fn family_clause_violations() {
        let base = chain(4);
        let all = Bits::from_indices(4, 0..4);
        // child not contained in parent ordering breaks (3)
        let mut ideals = BTreeMap::new();
        ideals.insert(vec![], all.clone());
        ideals.insert(vec![0], all.clone());
        ideals.insert(vec![1], Bits::from_indices(4, 0..2));
        let fam = IdealFamily::new(base.clone(), vec![2], vec![4, 2], ideals);
        let rep = fam.validate();
        assert!(!rep.passed());
        assert!(rep
            .witnesses
            .iter()
            .any(|w| w.claim == "children-not-increasing"));
        // duplicated ideals give an empty block
        let mut ideals = BTreeMap::new();
        ideals.insert(vec![], all.clone());
        ideals.insert(vec![0], all.clone());
        ideals.insert(vec![1], all.clone());
        let fam = IdealFamily::new(base, vec![2], vec![5, 4], ideals);
        let rep = fam.validate();
        assert!(!rep.passed());
        assert!(rep.witnesses.iter().any(|w| w.claim == "empty-block"));
    }

    #[test]
    fn c_of_empty_condition_is_empty() {
        let fam = chain_family();
        let c = c_of(&fam, &Condition::empty()).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn c_of_single_branch_chain() {
        // single leaf: block = whole chain; assign increasing values to slots
        let base = chain(3);
        let all = Bits::from_indices(3, 0..3);
        let mut ideals = BTreeMap::new();
        ideals.insert(vec![], all.clone());
        ideals.insert(vec![0], all);
        let fam = IdealFamily::new(base, vec![1], vec![3, 2], ideals);
        assert!(fam.validate().passed());
        let mut cond = Condition::empty();
        cond.insert(vec![0], 0, 0);
        cond.insert(vec![0], 1, 1);
        cond.insert(vec![0], 2, 2);
        let c = c_of(&fam, &cond).unwrap();
        assert_eq!(c.iter_ones().collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn slot_gap_excludes_value() {
        let base = chain(3);
        let all = Bits::from_indices(3, 0..3);
        let mut ideals = BTreeMap::new();
        ideals.insert(vec![], all.clone());
        ideals.insert(vec![0], all);
        let fam = IdealFamily::new(base, vec![1], vec![3, 2], ideals);
        let mut cond = Condition::empty();
        cond.insert(vec![0], 1, 1); // slot 0 left empty
        let c = c_of(&fam, &cond).unwrap();
        assert!(c.is_empty(), "the gapped slot value is excluded");
    }

    #[test]
    fn density_from_empty_condition() {
        let fam = chain_family();
        let bottom = fam.base().least().unwrap();
        let (q, y) = density_extend(&fam, &Condition::empty(), bottom).unwrap();
        assert!(fam.base().leq(bottom, y));
        let c = c_of(&fam, &q).unwrap();
        assert!(c.get(y), "the returned element joins the candidate set");
    }

    #[test]
    fn density_grows_candidates_monotonically() {
        let fam = chain_family();
        let mut cond = Condition::empty();
        let mut prev = Bits::new(fam.base().len());
        for x in 0..fam.base().len() {
            let (q, y) = density_extend(&fam, &cond, x).unwrap();
            let c = c_of(&fam, &q).unwrap();
            assert!(c.get(y));
            assert!(fam.base().leq(x, y));
            assert!(prev.subset_of(&c), "candidate sets grow along extensions");
            prev = c;
            cond = q;
        }
    }

    #[test]
    fn filter_union_on_extension_chain() {
        let fam = chain_family();
        let (q1, _) = density_extend(&fam, &Condition::empty(), 0).unwrap();
        let (q2, _) = density_extend(&fam, &q1, 2).unwrap();
        let rep = filter_union_checks(&fam, &[q1.clone(), q2.clone()]).unwrap();
        assert!(rep.passed(), "{rep}");
        assert!(q2.extends(&q1));
    }

    #[test]
    fn incompatible_pair_is_an_error() {
        let fam = chain_family();
        let mut a = Condition::empty();
        a.insert(vec![0], 0, 0);
        let mut b = Condition::empty();
        b.insert(vec![0], 0, 1);
        assert!(matches!(
            filter_union_checks(&fam, &[a, b]),
            Err(CohenError::Incompatible { .. })
        ));
    }

    #[test]
    fn generated_families_validate() {
        let mut rng = substream(5, "cohen-gen-test");
        for depth in [1, 2] {
            for _ in 0..5 {
                let fam = random_toy_family(&mut rng, depth, 8);
                assert!(fam.validate().passed());
                // order compatibility: x <= y forces lex-ordered leaf indices
                // and contained ideals
                for x in 0..fam.base().len() {
                    for y in 0..fam.base().len() {
                        if fam.base().leq(x, y) {
                            let (ax, ay) = (fam.alpha_of(x), fam.alpha_of(y));
                            assert!(ax <= ay);
                            assert!(fam.ideals[&ax].subset_of(&fam.ideals[&ay]));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn family_doc_roundtrip() {
        let fam = chain_family();
        let json = serde_json::to_string(&fam.to_doc()).unwrap();
        let doc: FamilyDoc = serde_json::from_str(&json).unwrap();
        let back = IdealFamily::from_doc(&doc).unwrap();
        assert!(back.validate().passed());
        assert_eq!(back.leaves(), fam.leaves());
    }
}
