//! Finite-poset substrate: order and lattice predicates, joins and meets,
//! ideals, lower covers, breadth, and the ideal projection, all by direct
//! enumeration. This is the oracle layer every other module is tested against.

use crate::bits::Bits;
use crate::report::Report;
use thiserror::Error;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum PosetError {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element id `{0}`")]
    DuplicateElement(String),
    #[error("not a join-semilattice: no join for ({0}, {1})")]
    NotJoinSemilattice(String, String),
    #[error("empty generating set")]
    EmptyGeneratingSet,
    #[error("projection undefined: {0}")]
    ProjectionUndefined(String),
}

/// Finite poset over opaque string ids. The order is stored as the full
/// relation (boolean matrix semantics); covers are derived, not stored.
/// The relation is *not* assumed valid: `validate` checks the axioms.
#[derive(Clone, Debug)]
pub struct FinitePoset {
    ids: Vec<String>,
    /// ups[i] = { j : i <= j } per the stored relation.
    ups: Vec<Bits>,
    /// downs[j] = { i : i <= j }.
    downs: Vec<Bits>,
}

impl FinitePoset {
    /// Build from an explicit `leq` relation given as pairs. Reflexive pairs
    /// are honored as given, so a missing `a <= a` is detectable by `validate`.
    pub fn from_leq_pairs<S: AsRef<str>>(
        ids: Vec<String>,
        pairs: &[(S, S)],
    ) -> Result<FinitePoset, PosetError> {
        let n = ids.len();
        let mut seen = std::collections::HashSet::new();
        for id in &ids {
            if !seen.insert(id.clone()) {
                return Err(PosetError::DuplicateElement(id.clone()));
            }
        }
        let mut p = FinitePoset {
            ids,
            ups: vec![Bits::new(n); n],
            downs: vec![Bits::new(n); n],
        };
        for (a, b) in pairs {
            let i = p
                .index(a.as_ref())
                .ok_or_else(|| PosetError::UnknownElement(a.as_ref().to_string()))?;
            let j = p
                .index(b.as_ref())
                .ok_or_else(|| PosetError::UnknownElement(b.as_ref().to_string()))?;
            p.ups[i].set(j);
            p.downs[j].set(i);
        }
        Ok(p)
    }

    /// Build from cover pairs; leq is the reflexive-transitive closure, so the
    /// result always validates.
    pub fn from_covers<S: AsRef<str>>(
        ids: Vec<String>,
        covers: &[(S, S)],
    ) -> Result<FinitePoset, PosetError> {
        let mut p = FinitePoset::from_leq_pairs(ids, covers)?;
        let n = p.len();
        for i in 0..n {
            p.ups[i].set(i);
        }
        // Warshall closure on the up-rows.
        for k in 0..n {
            let row_k = p.ups[k].clone();
            for i in 0..n {
                if p.ups[i].get(k) {
                    p.ups[i].or_assign(&row_k);
                }
            }
        }
        p.rebuild_downs();
        Ok(p)
    }

    /// Build directly from a leq predicate over indices (used by the staged
    /// constructions when materializing boxes).
    pub fn from_leq_fn(ids: Vec<String>, leq: impl Fn(usize, usize) -> bool) -> FinitePoset {
        let n = ids.len();
        let mut p = FinitePoset {
            ids,
            ups: vec![Bits::new(n); n],
            downs: vec![Bits::new(n); n],
        };
        for i in 0..n {
            for j in 0..n {
                if leq(i, j) {
                    p.ups[i].set(j);
                    p.downs[j].set(i);
                }
            }
        }
        p
    }

    fn rebuild_downs(&mut self) {
        let n = self.len();
        self.downs = vec![Bits::new(n); n];
        for i in 0..n {
            let row = self.ups[i].clone();
            for j in row.iter_ones() {
                self.downs[j].set(i);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn index_or_err(&self, id: &str) -> Result<usize, PosetError> {
        self.index(id)
            .ok_or_else(|| PosetError::UnknownElement(id.to_string()))
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.ups[x].get(y)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn up_row(&self, x: usize) -> &Bits {
        &self.ups[x]
    }

    pub fn down_row(&self, x: usize) -> &Bits {
        &self.downs[x]
    }

    fn pair_ids(&self, x: usize, y: usize) -> Vec<String> {
        vec![self.ids[x].clone(), self.ids[y].clone()]
    }

    /// Check reflexivity, antisymmetry and transitivity of the stored relation.
    pub fn validate(&self) -> Report {
        let n = self.len();
        let mut rep = Report::pass();
        for i in 0..n {
            if !self.leq(i, i) {
                rep.add_witness("reflexivity", vec![self.ids[i].clone()]);
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.leq(i, j) && self.leq(j, i) {
                    rep.add_witness("antisymmetry", self.pair_ids(i, j));
                }
            }
        }
        for i in 0..n {
            for j in self.ups[i].iter_ones() {
                // i <= j: everything above j must be above i.
                if !self.ups[j].subset_of(&self.ups[i]) {
                    let k = self.ups[j]
                        .iter_ones()
                        .find(|&k| !self.ups[i].get(k))
                        .unwrap();
                    rep.add_witness(
                        "transitivity",
                        vec![
                            self.ids[i].clone(),
                            self.ids[j].clone(),
                            self.ids[k].clone(),
                        ],
                    );
                }
            }
        }
        rep.truncate_witnesses(20);
        rep
    }

    /// Least element of `set` (an element of `set` below all others), if any.
    fn least_of(&self, set: &Bits) -> Option<usize> {
        set.iter_ones().find(|&c| set.subset_of(&self.ups[c]))
    }

    fn greatest_of(&self, set: &Bits) -> Option<usize> {
        set.iter_ones().find(|&c| set.subset_of(&self.downs[c]))
    }

    /// Least upper bound, if a unique minimum of the common upper bounds exists.
    pub fn join(&self, x: usize, y: usize) -> Option<usize> {
        self.least_of(&self.ups[x].and(&self.ups[y]))
    }

    /// Greatest lower bound, dual to `join`.
    pub fn meet(&self, x: usize, y: usize) -> Option<usize> {
        self.greatest_of(&self.downs[x].and(&self.downs[y]))
    }

    pub fn join_ids(&self, x: &str, y: &str) -> Result<Option<&str>, PosetError> {
        let (i, j) = (self.index_or_err(x)?, self.index_or_err(y)?);
        Ok(self.join(i, j).map(|k| self.id(k)))
    }

    pub fn meet_ids(&self, x: &str, y: &str) -> Result<Option<&str>, PosetError> {
        let (i, j) = (self.index_or_err(x)?, self.index_or_err(y)?);
        Ok(self.meet(i, j).map(|k| self.id(k)))
    }

    /// Pass iff every pair has both a join and a meet.
    pub fn is_lattice(&self) -> Report {
        let mut rep = Report::pass();
        for x in 0..self.len() {
            for y in x..self.len() {
                if self.join(x, y).is_none() {
                    rep.add_witness("joinless-pair", self.pair_ids(x, y));
                }
                if self.meet(x, y).is_none() {
                    rep.add_witness("meetless-pair", self.pair_ids(x, y));
                }
            }
        }
        rep.truncate_witnesses(20);
        rep
    }

    /// Pass iff the relation validates and every pair has a join.
    pub fn is_join_semilattice(&self) -> Report {
        let mut rep = self.validate();
        if !rep.passed() {
            return rep;
        }
        for x in 0..self.len() {
            for y in x + 1..self.len() {
                if self.join(x, y).is_none() {
                    rep.add_witness("joinless-pair", self.pair_ids(x, y));
                }
            }
        }
        rep.truncate_witnesses(20);
        rep
    }

    /// Early-exit form of the join-semilattice scan (no witnesses).
    pub fn all_pairs_have_joins(&self) -> bool {
        for x in 0..self.len() {
            for y in x + 1..self.len() {
                if self.join(x, y).is_none() {
                    return false;
                }
            }
        }
        true
    }

    /// Truncation-tolerant lattice check: every pair *bounded above* must have
    /// a least upper bound and every pair bounded below a greatest lower
    /// bound. On a downward-closed box cut from an honest lattice this passes;
    /// a genuine defect (two minimal upper bounds) still fails.
    pub fn lattice_defects(&self) -> Report {
        let mut rep = Report::pass();
        for x in 0..self.len() {
            for y in x + 1..self.len() {
                let common_up = self.ups[x].and(&self.ups[y]);
                if !common_up.is_empty() && self.least_of(&common_up).is_none() {
                    rep.add_witness("bounded-pair-without-join", self.pair_ids(x, y));
                }
                let common_down = self.downs[x].and(&self.downs[y]);
                if !common_down.is_empty() && self.greatest_of(&common_down).is_none() {
                    rep.add_witness("bounded-pair-without-meet", self.pair_ids(x, y));
                }
            }
        }
        rep.truncate_witnesses(20);
        rep
    }

    /// `{ q : q < x` and nothing strictly between `}`.
    pub fn lower_covers(&self, x: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for q in self.downs[x].iter_ones() {
            if q == x {
                continue;
            }
            let between = self.ups[q].and(&self.downs[x]);
            if between.iter_ones().all(|z| z == q || z == x) {
                out.push(q);
            }
        }
        out
    }

    pub fn upper_covers(&self, x: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for q in self.ups[x].iter_ones() {
            if q == x {
                continue;
            }
            let between = self.downs[q].and(&self.ups[x]);
            if between.iter_ones().all(|z| z == q || z == x) {
                out.push(q);
            }
        }
        out
    }

    /// Pass iff the poset is a lattice and every element has at most `n`
    /// lower covers. Lower finiteness is automatic here.
    pub fn is_n_ladder(&self, n: usize) -> Report {
        assert!(n >= 1, "ladder parameter must be positive");
        let mut rep = self.is_lattice();
        for x in 0..self.len() {
            let covers = self.lower_covers(x);
            if covers.len() > n {
                rep.add_witness(
                    format!("more-than-{n}-lower-covers"),
                    std::iter::once(self.ids[x].clone())
                        .chain(covers.iter().map(|&q| self.ids[q].clone()))
                        .collect(),
                );
            }
        }
        rep.truncate_witnesses(20);
        rep
    }

    /// Ladder check for downward-closed truncations: lattice defects instead
    /// of the strict lattice predicate. Lower covers are exact on such boxes.
    pub fn is_n_ladder_box(&self, n: usize) -> Report {
        assert!(n >= 1, "ladder parameter must be positive");
        let mut rep = self.validate();
        rep.merge(self.lattice_defects());
        for x in 0..self.len() {
            let covers = self.lower_covers(x);
            if covers.len() > n {
                rep.add_witness(
                    format!("more-than-{n}-lower-covers"),
                    std::iter::once(self.ids[x].clone())
                        .chain(covers.iter().map(|&q| self.ids[q].clone()))
                        .collect(),
                );
            }
        }
        rep.truncate_witnesses(20);
        rep
    }

    fn join_of_set(&self, set: &Bits) -> Option<usize> {
        let mut it = set.iter_ones();
        let mut acc = it.next()?;
        for x in it {
            acc = self.join(acc, x)?;
        }
        Some(acc)
    }

    /// Least `n` such that every `(n+1)`-subset has an `n`-subset with the
    /// same join. Requires a join-semilattice. The one-element poset has
    /// breadth 1.
    pub fn breadth(&self) -> Result<usize, PosetError> {
        self.require_join_semilattice()?;
        let n_elems = self.len();
        for n in 1..=n_elems.max(1) {
            if self.breadth_at_most(n) {
                return Ok(n);
            }
        }
        unreachable!("breadth is at most the number of elements")
    }

    fn require_join_semilattice(&self) -> Result<(), PosetError> {
        for x in 0..self.len() {
            for y in x + 1..self.len() {
                if self.join(x, y).is_none() {
                    return Err(PosetError::NotJoinSemilattice(
                        self.ids[x].clone(),
                        self.ids[y].clone(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn breadth_at_most(&self, n: usize) -> bool {
        // Every (n+1)-subset X must have a drop-one subset with join(Y) = join(X).
        let mut subset: Vec<usize> = (0..n + 1).collect();
        if n + 1 > self.len() {
            return true;
        }
        loop {
            let bits = Bits::from_indices(self.len(), subset.iter().copied());
            let jx = self.join_of_set(&bits).expect("join-semilattice");
            let ok = subset.iter().any(|&drop| {
                let mut b = bits.clone();
                b.clear(drop);
                self.join_of_set(&b) == Some(jx)
            });
            if !ok {
                return false;
            }
            // next combination
            let k = n + 1;
            let mut i = k;
            loop {
                if i == 0 {
                    return true;
                }
                i -= 1;
                if subset[i] != i + self.len() - k {
                    break;
                }
                if i == 0 {
                    return true;
                }
            }
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }

    /// Breadth straight from the definition, quantifying over *all* nonempty
    /// subsets. Exponential; used as an independent oracle for small posets.
    pub fn breadth_by_definition(&self) -> Result<usize, PosetError> {
        self.require_join_semilattice()?;
        let n = self.len();
        assert!(n <= 16, "definitional breadth oracle is exponential");
        if n == 1 {
            return Ok(1);
        }
        let mut join_of = vec![usize::MAX; 1 << n];
        let mut need = 1usize;
        for mask in 1usize..(1 << n) {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            join_of[mask] = if rest == 0 {
                low
            } else {
                self.join(join_of[rest], low).expect("join-semilattice")
            };
            // minimum size of Y subseteq X with equal join
            let mut best = mask.count_ones() as usize;
            let mut sub = mask;
            while sub > 0 {
                if join_of[sub] == join_of[mask] {
                    best = best.min(sub.count_ones() as usize);
                }
                sub = (sub - 1) & mask;
            }
            need = need.max(best);
        }
        Ok(need)
    }

    /// Pass iff `s` is a nonempty, downward closed, upward directed subset.
    pub fn is_ideal(&self, s: &Bits) -> Report {
        let mut rep = Report::pass();
        if s.is_empty() {
            rep.add_witness("ideal-empty", vec![]);
            return rep;
        }
        for x in s.iter_ones() {
            for y in self.downs[x].iter_ones() {
                if !s.get(y) {
                    rep.add_witness("not-downward-closed", self.pair_ids(y, x));
                }
            }
        }
        for x in s.iter_ones() {
            for y in s.iter_ones() {
                if y < x {
                    continue;
                }
                let mut common = self.ups[x].and(&self.ups[y]);
                common.and_assign(s);
                if common.is_empty() {
                    rep.add_witness("not-directed", self.pair_ids(x, y));
                }
            }
        }
        rep.truncate_witnesses(20);
        rep
    }

    pub fn is_proper_ideal(&self, s: &Bits) -> Report {
        let mut rep = self.is_ideal(s);
        if s.count() == self.len() {
            rep.add_witness("not-proper", vec![]);
        }
        rep
    }

    /// Box-relative ideal check: downward closed and directed for every pair
    /// that is bounded somewhere in the box.
    pub fn is_ideal_box(&self, s: &Bits) -> Report {
        let mut rep = Report::pass();
        if s.is_empty() {
            rep.add_witness("ideal-empty", vec![]);
            return rep;
        }
        for x in s.iter_ones() {
            for y in self.downs[x].iter_ones() {
                if !s.get(y) {
                    rep.add_witness("not-downward-closed", self.pair_ids(y, x));
                }
            }
        }
        for x in s.iter_ones() {
            for y in s.iter_ones() {
                if y < x {
                    continue;
                }
                let common = self.ups[x].and(&self.ups[y]);
                if common.is_empty() {
                    continue; // unbounded in the box: truncation, not a defect
                }
                let mut in_s = common.clone();
                in_s.and_assign(s);
                if in_s.is_empty() {
                    rep.add_witness("not-directed-in-box", self.pair_ids(x, y));
                }
            }
        }
        rep.truncate_witnesses(20);
        rep
    }

    /// Downward closure of all finite joins of members of `X`.
    pub fn ideal_generated(&self, xs: &Bits) -> Result<IdealSet, PosetError> {
        if xs.is_empty() {
            return Err(PosetError::EmptyGeneratingSet);
        }
        self.require_join_semilattice()?;
        let mut carrier = xs.clone();
        loop {
            let mut next = carrier.clone();
            let members: Vec<usize> = carrier.iter_ones().collect();
            for &a in &members {
                next.or_assign(&self.downs[a]);
                for &b in &members {
                    if let Some(j) = self.join(a, b) {
                        next.set(j);
                    }
                }
            }
            if next == carrier {
                break;
            }
            carrier = next;
        }
        Ok(IdealSet { carrier })
    }

    /// The greatest element of `I ∩ ↓x`. Requires a validated lattice with a
    /// least element and a valid ideal, under which it always exists.
    pub fn pi(&self, ideal: &IdealSet, x: usize) -> Result<usize, PosetError> {
        let cap = ideal.carrier.and(&self.downs[x]);
        self.greatest_of(&cap).ok_or_else(|| {
            PosetError::ProjectionUndefined(format!(
                "no greatest element of the ideal below `{}`",
                self.ids[x]
            ))
        })
    }

    /// Pass iff `c` is closed under binary meets (meets taken in `self`).
    pub fn is_meet_subsemilattice(&self, c: &Bits) -> Report {
        let mut rep = Report::pass();
        if c.is_empty() {
            rep.add_witness("empty-subset", vec![]);
            return rep;
        }
        for x in c.iter_ones() {
            for y in c.iter_ones() {
                if y < x {
                    continue;
                }
                match self.meet(x, y) {
                    Some(m) if c.get(m) => {}
                    Some(m) => rep.add_witness(
                        "meet-outside-subset",
                        vec![
                            self.ids[x].clone(),
                            self.ids[y].clone(),
                            self.ids[m].clone(),
                        ],
                    ),
                    None => rep.add_witness("meetless-pair", self.pair_ids(x, y)),
                }
            }
        }
        rep.truncate_witnesses(20);
        rep
    }

    /// Pass iff every element of the poset lies below some member of `c`.
    pub fn is_cofinal(&self, c: &Bits) -> Report {
        let mut rep = Report::pass();
        for x in 0..self.len() {
            if !c.iter_ones().any(|y| self.leq(x, y)) {
                rep.add_witness("not-dominated", vec![self.ids[x].clone()]);
            }
        }
        rep.truncate_witnesses(20);
        rep
    }

    /// Unique minimum of the whole poset, if present.
    pub fn least(&self) -> Option<usize> {
        (0..self.len()).find(|&c| (0..self.len()).all(|x| self.leq(c, x)))
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| self.ups[x].iter_ones().all(|y| y == x))
            .collect()
    }

    /// Induced subposet on `subset`; second result maps new index -> old index.
    pub fn restrict(&self, subset: &Bits) -> (FinitePoset, Vec<usize>) {
        let old: Vec<usize> = subset.iter_ones().collect();
        let ids = old.iter().map(|&i| self.ids[i].clone()).collect();
        let p = FinitePoset::from_leq_fn(ids, |a, b| self.leq(old[a], old[b]));
        (p, old)
    }

    /// Full relation as pairs of indices (used by exporters).
    pub fn leq_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in self.ups[i].iter_ones() {
                out.push((i, j));
            }
        }
        out
    }
}

/// Validated ideal carrier inside some fixed poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealSet {
    carrier: Bits,
}

impl IdealSet {
    /// Validate `carrier` as an ideal of `p`.
    pub fn new(p: &FinitePoset, carrier: Bits) -> Result<IdealSet, Report> {
        let rep = p.is_ideal(&carrier);
        if rep.passed() {
            Ok(IdealSet { carrier })
        } else {
            Err(rep)
        }
    }

    pub fn from_unchecked(carrier: Bits) -> IdealSet {
        IdealSet { carrier }
    }

    pub fn carrier(&self) -> &Bits {
        &self.carrier
    }

    pub fn contains(&self, x: usize) -> bool {
        self.carrier.get(x)
    }

    pub fn members(&self) -> Vec<usize> {
        self.carrier.iter_ones().collect()
    }

    /// True when this ideal is contained in `other`.
    pub fn subset_of(&self, other: &IdealSet) -> bool {
        self.carrier.subset_of(&other.carrier)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::FinitePoset;

    /// The diamond M3: bottom, three atoms, top.
    pub fn m3() -> FinitePoset {
        FinitePoset::from_covers(
            ["bot", "a0", "a1", "a2", "top"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            &[
                ("bot", "a0"),
                ("bot", "a1"),
                ("bot", "a2"),
                ("a0", "top"),
                ("a1", "top"),
                ("a2", "top"),
            ],
        )
        .unwrap()
    }

    pub fn chain(n: usize) -> FinitePoset {
        let ids: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let covers: Vec<(String, String)> = (1..n)
            .map(|i| (format!("c{}", i - 1), format!("c{i}")))
            .collect();
        FinitePoset::from_covers(ids, &covers).unwrap()
    }

    pub fn antichain(n: usize) -> FinitePoset {
        let ids: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        FinitePoset::from_covers(ids, &Vec::<(String, String)>::new()).unwrap()
    }

    /// Grid lattice: product of a `w`-chain and an `h`-chain.
    pub fn grid(w: usize, h: usize) -> FinitePoset {
        let id = |c: usize, r: usize| format!("g{c}_{r}");
        let mut ids = Vec::new();
        for c in 0..w {
            for r in 0..h {
                ids.push(id(c, r));
            }
        }
        let mut covers = Vec::new();
        for c in 0..w {
            for r in 0..h {
                if c + 1 < w {
                    covers.push((id(c, r), id(c + 1, r)));
                }
                if r + 1 < h {
                    covers.push((id(c, r), id(c, r + 1)));
                }
            }
        }
        FinitePoset::from_covers(ids, &covers).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn bits_of(p: &FinitePoset, ids: &[&str]) -> Bits {
        Bits::from_indices(p.len(), ids.iter().map(|s| p.index(s).unwrap()))
    }

    #[test]
    fn validate_chain_passes() {
        assert!(chain(3).validate().passed());
    }

    #[test]
    fn validate_catches_antisymmetry() {
        let p = FinitePoset::from_leq_pairs(
            vec!["a".into(), "b".into()],
            &[("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")],
        )
        .unwrap();
        let rep = p.validate();
        assert!(!rep.passed());
        assert!(rep.witnesses.iter().any(|w| w.claim == "antisymmetry"));
    }

    #[test]
    fn validate_catches_missing_reflexivity() {
        let p = FinitePoset::from_leq_pairs(vec!["a".into(), "b".into()], &[("b", "b")]).unwrap();
        let rep = p.validate();
        assert!(!rep.passed());
        let w = rep
            .witnesses
            .iter()
            .find(|w| w.claim == "reflexivity")
            .unwrap();
        assert_eq!(w.elements, vec!["a".to_string()]);
    }

    #[test]
    fn m3_join_meet() {
        let p = m3();
        assert_eq!(p.join_ids("a0", "a1").unwrap(), Some("top"));
        assert_eq!(p.meet_ids("a0", "a1").unwrap(), Some("bot"));
        assert_eq!(p.join_ids("a0", "a0").unwrap(), Some("a0"));
        assert_eq!(p.meet_ids("a2", "a2").unwrap(), Some("a2"));
        assert!(p.join_ids("a0", "zzz").is_err());
    }

    #[test]
    fn antichain_join_meet_absent() {
        let p = antichain(2);
        assert_eq!(p.join_ids("x0", "x1").unwrap(), None);
        assert_eq!(p.meet_ids("x0", "x1").unwrap(), None);
        let rep = p.is_lattice();
        assert!(!rep.passed());
    }

    #[test]
    fn singleton_is_lattice() {
        assert!(antichain(1).is_lattice().passed());
    }

    #[test]
    fn m3_lower_covers() {
        let p = m3();
        let top = p.index("top").unwrap();
        let mut covers: Vec<&str> = p.lower_covers(top).into_iter().map(|i| p.id(i)).collect();
        covers.sort();
        assert_eq!(covers, vec!["a0", "a1", "a2"]);
        let bot = p.index("bot").unwrap();
        assert!(p.lower_covers(bot).is_empty());
        let c = chain(4);
        assert_eq!(
            c.lower_covers(c.index("c2").unwrap()),
            vec![c.index("c1").unwrap()]
        );
    }

    #[test]
    fn m3_ladder_checks() {
        let p = m3();
        assert!(p.is_n_ladder(3).passed());
        let rep = p.is_n_ladder(2);
        assert!(!rep.passed());
        assert!(rep
            .witnesses
            .iter()
            .any(|w| w.elements.first().map(String::as_str) == Some("top")));
        assert!(chain(5).is_n_ladder(1).passed());
    }

    #[test]
    fn breadth_values() {
        assert_eq!(m3().breadth().unwrap(), 2);
        assert_eq!(chain(6).breadth().unwrap(), 1);
        assert_eq!(antichain(1).breadth().unwrap(), 1);
        assert_eq!(grid(3, 3).breadth().unwrap(), 2);
        assert_eq!(grid(3, 3).breadth_by_definition().unwrap(), 2);
        assert!(matches!(
            antichain(2).breadth(),
            Err(PosetError::NotJoinSemilattice(_, _))
        ));
    }

    #[test]
    fn ideal_checks() {
        let p = m3();
        let down_a0 = bits_of(&p, &["bot", "a0"]);
        assert!(p.is_ideal(&down_a0).passed());
        assert!(p.is_proper_ideal(&down_a0).passed());
        let all = Bits::from_indices(p.len(), 0..p.len());
        assert!(p.is_ideal(&all).passed());
        assert!(!p.is_proper_ideal(&all).passed());
        let two_atoms = bits_of(&p, &["a0", "a1"]);
        let rep = p.is_ideal(&two_atoms);
        assert!(!rep.passed());
    }

    #[test]
    fn ideal_generated_cases() {
        let p = m3();
        let single = p.ideal_generated(&bits_of(&p, &["a0"])).unwrap();
        assert_eq!(
            single.carrier(),
            &bits_of(&p, &["bot", "a0"]),
            "principal ideal"
        );
        let two = p.ideal_generated(&bits_of(&p, &["a0", "a1"])).unwrap();
        assert_eq!(two.carrier().count(), p.len(), "joins pull in the top");
        let all = Bits::from_indices(p.len(), 0..p.len());
        assert_eq!(p.ideal_generated(&all).unwrap().carrier(), &all);
        assert!(matches!(
            p.ideal_generated(&Bits::new(p.len())),
            Err(PosetError::EmptyGeneratingSet)
        ));
    }

    #[test]
    fn pi_cases() {
        let p = m3();
        let i = IdealSet::new(&p, bits_of(&p, &["bot", "a0"])).unwrap();
        let a0 = p.index("a0").unwrap();
        let a1 = p.index("a1").unwrap();
        let bot = p.index("bot").unwrap();
        assert_eq!(p.pi(&i, a0).unwrap(), a0, "pi fixes the ideal");
        assert_eq!(p.pi(&i, a1).unwrap(), bot);
        let trivial = IdealSet::new(&p, bits_of(&p, &["bot"])).unwrap();
        let top = p.index("top").unwrap();
        assert_eq!(p.pi(&trivial, top).unwrap(), bot);
    }

    #[test]
    fn meet_subsemilattice_and_cofinal() {
        let p = m3();
        let top_only = bits_of(&p, &["top"]);
        assert!(p.is_meet_subsemilattice(&top_only).passed());
        assert!(p.is_cofinal(&top_only).passed());
        let atoms = bits_of(&p, &["a0", "a1"]);
        assert!(!p.is_meet_subsemilattice(&atoms).passed());
        let all = Bits::from_indices(p.len(), 0..p.len());
        assert!(p.is_meet_subsemilattice(&all).passed());
        assert!(p.is_cofinal(&all).passed());
    }

    #[test]
    fn defect_check_tolerates_truncation() {
        // A grid with its top removed is a downward-closed box: every bounded
        // pair still has a join, so no defects; the strict check fails.
        let g = grid(2, 2);
        let mut sub = Bits::from_indices(g.len(), 0..g.len());
        sub.clear(g.index("g1_1").unwrap());
        let (boxed, _) = g.restrict(&sub);
        assert!(boxed.lattice_defects().passed());
        assert!(!boxed.is_lattice().passed());
    }
}
