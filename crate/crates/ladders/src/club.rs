//! Staged construction of a breadth-2 3-ladder over levels of `E = ω × {0,1}`:
//! the base level, per-stage cofinal-sequence selection under the
//! projection-jump constraint, the order-extension rule, and checkers for the
//! stage properties.

use crate::bits::Bits;
use crate::io::PosetDoc;
use crate::poset::{FinitePoset, IdealSet};
use crate::report::Report;
use rand::prelude::IndexedRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum ClubError {
    #[error("no sequence of length {requested} exists (maximum feasible: {max})")]
    InfeasibleLength { requested: usize, max: usize },
    #[error("sequence invalid:\n{0}")]
    SequenceInvalid(Report),
    #[error("stage property violated:\n{0}")]
    PropertyViolation(Report),
    #[error("bad schedule: {0}")]
    BadSchedule(String),
    #[error("malformed state: {0}")]
    MalformedState(String),
}

/// A point of `E`: coordinate `n` with bit `i`. Strictly below `(m, j)` iff
/// `n < m` and `j = 1`, so the `i = 0` points are minimal at their level.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct EPoint {
    pub n: u32,
    pub i: u8,
}

pub fn e_leq(a: EPoint, b: EPoint) -> bool {
    a == b || (a.n < b.n && b.i == 1)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum CPoint {
    Zero,
    Node { level: u32, n: u32, i: u8 },
}

impl std::fmt::Display for CPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CPoint::Zero => write!(f, "0"),
            CPoint::Node { level, n, i } => write!(f, "{level}.{n}.{i}"),
        }
    }
}

impl std::str::FromStr for CPoint {
    type Err = String;
    fn from_str(s: &str) -> Result<CPoint, String> {
        if s == "0" {
            return Ok(CPoint::Zero);
        }
        let parts: Vec<&str> = s.split('.').collect();
        if parts.len() != 3 {
            return Err(format!("expected `level.n.i` or `0`, got `{s}`"));
        }
        let nums: Vec<u32> = parts
            .iter()
            .map(|p| p.parse().map_err(|_| format!("bad coordinate in `{s}`")))
            .collect::<Result<_, _>>()?;
        if nums[2] > 1 {
            return Err(format!("bit coordinate must be 0 or 1 in `{s}`"));
        }
        Ok(CPoint::Node {
            level: nums[0],
            n: nums[1],
            i: nums[2] as u8,
        })
    }
}

/// Staged build state: the materialized order over `{0} ∪ (levels × E-window)`
/// plus the chain chosen at each stage. The order is rebuilt from the chains,
/// so states serialize as the poset plus the sequence log.
#[derive(Clone, Debug)]
pub struct ClubState {
    base_width: u32,
    widths: Vec<u32>,
    points: Vec<CPoint>,
    poset: FinitePoset,
    sequences: Vec<Vec<usize>>,
}

impl ClubState {
    /// Base state: the zero element plus one `E`-window level, ordered by the
    /// level rule alone.
    pub fn base(base_width: u32) -> ClubState {
        assert!(base_width >= 1);
        let mut points = vec![CPoint::Zero];
        for n in 0..base_width {
            for i in 0..2u8 {
                points.push(CPoint::Node { level: 0, n, i });
            }
        }
        let ids = points.iter().map(|p| p.to_string()).collect();
        let pts = points.clone();
        let poset = FinitePoset::from_leq_fn(ids, |a, b| match (pts[a], pts[b]) {
            (CPoint::Zero, _) => true,
            (_, CPoint::Zero) => false,
            (CPoint::Node { n, i, .. }, CPoint::Node { n: m, i: j, .. }) => {
                e_leq(EPoint { n, i }, EPoint { n: m, i: j })
            }
        });
        ClubState {
            base_width,
            widths: Vec::new(),
            points,
            poset,
            sequences: Vec::new(),
        }
    }

    /// Number of sequence-built stages (the base level is not counted).
    pub fn stages(&self) -> usize {
        self.widths.len()
    }

    pub fn levels(&self) -> u32 {
        self.widths.len() as u32 + 1
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn points(&self) -> &[CPoint] {
        &self.points
    }

    pub fn base_width(&self) -> u32 {
        self.base_width
    }

    pub fn widths(&self) -> &[u32] {
        &self.widths
    }

    pub fn sequences(&self) -> &[Vec<usize>] {
        &self.sequences
    }

    pub fn level_of(&self, idx: usize) -> Option<u32> {
        match self.points[idx] {
            CPoint::Zero => None,
            CPoint::Node { level, .. } => Some(level),
        }
    }

    /// Carrier of the ideal of all levels `< level`, plus zero.
    pub fn ideal_below(&self, level: u32) -> Bits {
        Bits::from_indices(
            self.points.len(),
            self.points
                .iter()
                .enumerate()
                .filter(|&(_, &p)| match p {
                    CPoint::Zero => true,
                    CPoint::Node { level: l, .. } => l < level,
                })
                .map(|(i, _)| i),
        )
    }

    /// Projection of `x` onto the ideal of levels `< level`, by enumeration.
    pub fn pi(&self, level: u32, x: usize) -> usize {
        let ideal = IdealSet::from_unchecked(self.ideal_below(level));
        self.poset
            .pi(&ideal, x)
            .expect("stage ideals have greatest elements below every point")
    }

    fn index_of_point(&self, p: CPoint) -> Option<usize> {
        self.points.iter().position(|&q| q == p)
    }

    /// Edge relation of the sequence constraint: `x` strictly below `y` and
    /// the projection of `y` to just above `x`'s level strictly above `x`.
    fn step_ok(&self, x: usize, y: usize) -> bool {
        if !self.poset.lt(x, y) {
            return false;
        }
        let Some(level) = self.level_of(x) else {
            return false; // zero is not a sequence element
        };
        self.pi(level + 1, y) != x
    }

    /// Longest admissible chain lengths from each element, over the
    /// admissible (non-avoided, non-zero) elements.
    fn longest_from(&self, admissible: &Bits) -> Vec<usize> {
        let n = self.points.len();
        // any linear extension works; sort by down-set size
        let mut order: Vec<usize> = admissible.iter_ones().collect();
        order.sort_by_key(|&i| self.poset.down_row(i).count());
        let mut up = vec![0usize; n];
        for &x in order.iter().rev() {
            let mut best = 0;
            for y in self.poset.up_row(x).iter_ones() {
                if y != x && admissible.get(y) && self.step_ok(x, y) {
                    best = best.max(up[y]);
                }
            }
            up[x] = 1 + best;
        }
        up
    }

    /// Choose a strictly increasing chain of `length` elements satisfying the
    /// projection-jump constraint at every step, drawn from the non-avoided
    /// elements. The first element is taken as low as possible and each step
    /// climbs to the largest reachable down-set that keeps the remaining
    /// length feasible; the rng breaks exact ties.
    pub fn choose_stage_sequence(
        &self,
        length: usize,
        avoid: &dyn Fn(CPoint) -> bool,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<usize>, ClubError> {
        if length == 0 {
            return Ok(Vec::new());
        }
        let admissible = Bits::from_indices(
            self.points.len(),
            self.points
                .iter()
                .enumerate()
                .filter(|&(_, &p)| p != CPoint::Zero && !avoid(p))
                .map(|(i, _)| i),
        );
        let up = self.longest_from(&admissible);
        let max = admissible.iter_ones().map(|i| up[i]).max().unwrap_or(0);
        if max < length {
            return Err(ClubError::InfeasibleLength {
                requested: length,
                max,
            });
        }

        // greedy merit: seed breaks ties among candidates of equal merit
        let pick = |cands: Vec<usize>, key: &dyn Fn(usize) -> usize, rng: &mut ChaCha8Rng| {
            let best = cands.iter().map(|&c| key(c)).max().unwrap();
            let tied: Vec<usize> = cands.into_iter().filter(|&c| key(c) == best).collect();
            *tied.choose(rng).unwrap()
        };

        // lowest feasible start, then each step climbs to the largest
        // reachable down-set
        let starts: Vec<usize> = admissible
            .iter_ones()
            .filter(|&i| up[i] >= length)
            .collect();
        let first = pick(
            starts,
            &|i| usize::MAX - self.poset.down_row(i).count(),
            rng,
        );
        let mut chain = vec![first];
        while chain.len() < length {
            let cur = *chain.last().unwrap();
            let remaining = length - chain.len();
            let cands: Vec<usize> = self
                .poset
                .up_row(cur)
                .iter_ones()
                .filter(|&y| {
                    y != cur && admissible.get(y) && self.step_ok(cur, y) && up[y] >= remaining
                })
                .collect();
            debug_assert!(!cands.is_empty(), "feasibility was established up front");
            let next = pick(cands, &|i| self.poset.down_row(i).count(), rng);
            chain.push(next);
        }
        Ok(chain)
    }

    fn validate_sequence(&self, sequence: &[usize], width: u32) -> Result<(), ClubError> {
        let mut rep = Report::pass();
        if sequence.len() < 2 * width as usize {
            rep.add_witness(
                "sequence-shorter-than-twice-the-width",
                vec![sequence.len().to_string(), width.to_string()],
            );
        }
        for w in sequence.windows(2) {
            let (x, y) = (w[0], w[1]);
            if !self.poset.lt(x, y) {
                rep.add_witness("sequence-not-strictly-increasing", {
                    vec![self.poset.id(x).to_string(), self.poset.id(y).to_string()]
                });
            } else if !self.step_ok(x, y) {
                rep.add_witness(
                    "projection-returns-to-previous-element",
                    vec![self.poset.id(x).to_string(), self.poset.id(y).to_string()],
                );
            }
        }
        for &x in sequence {
            if self.points[x] == CPoint::Zero {
                rep.add_witness("zero-in-sequence", vec!["0".to_string()]);
            }
        }
        if rep.passed() {
            Ok(())
        } else {
            Err(ClubError::SequenceInvalid(rep))
        }
    }

    /// Extend by one level of width `width` along `sequence`: the new level
    /// is an `E`-window internally, and `y` sits below `(level, n, i)` exactly
    /// when it sits below the chain element at index `2n + i`.
    pub fn extend_stage(&self, sequence: Vec<usize>, width: u32) -> Result<ClubState, ClubError> {
        self.validate_sequence(&sequence, width)?;
        let level = self.levels();
        let old_len = self.points.len();
        let mut points = self.points.clone();
        for n in 0..width {
            for i in 0..2u8 {
                points.push(CPoint::Node { level, n, i });
            }
        }
        let ids = points.iter().map(|p| p.to_string()).collect();
        let pts = points.clone();
        let old = self.poset.clone();
        let seq = sequence.clone();
        let poset = FinitePoset::from_leq_fn(ids, move |a, b| {
            let e_of = |idx: usize| match pts[idx] {
                CPoint::Node { n, i, .. } => EPoint { n, i },
                CPoint::Zero => unreachable!(),
            };
            match (a < old_len, b < old_len) {
                (true, true) => old.leq(a, b),
                (false, true) => false,
                (false, false) => e_leq(e_of(a), e_of(b)),
                (true, false) => {
                    let eb = e_of(b);
                    let slot = (2 * eb.n + eb.i as u32) as usize;
                    a == 0 || old.leq(a, seq[slot])
                }
            }
        });
        let state = ClubState {
            base_width: self.base_width,
            widths: {
                let mut w = self.widths.clone();
                w.push(width);
                w
            },
            points,
            poset,
            sequences: {
                let mut s = self.sequences.clone();
                s.push(sequence);
                s
            },
        };
        let rep = state.check_stage_properties();
        if rep.passed() {
            Ok(state)
        } else {
            Err(ClubError::PropertyViolation(rep))
        }
    }

    /// The stage properties on the materialized box: defect-free lattice,
    /// each level-prefix an ideal, levels isomorphic to the `E`-window,
    /// per-level injective projections, and the tail-domination property for
    /// everything the stage chain reaches.
    pub fn check_stage_properties(&self) -> Report {
        let mut rep = self.poset.validate();
        if !rep.passed() {
            return rep;
        }
        // (1) lattice up to truncation
        rep.merge(self.poset.lattice_defects());
        // (2) level prefixes are ideals (box-relative directedness)
        for level in 1..=self.levels() {
            let mut sub = self.poset.is_ideal_box(&self.ideal_below(level));
            if !sub.passed() {
                for w in &mut sub.witnesses {
                    w.claim = format!("ideal-below-{level}: {}", w.claim);
                }
            }
            rep.merge(sub);
        }
        // (3) each level restricted to itself is the E-window order
        for (xi, &x) in self.points.iter().enumerate() {
            for (yi, &y) in self.points.iter().enumerate() {
                if let (
                    CPoint::Node { level: a, n, i },
                    CPoint::Node {
                        level: b,
                        n: m,
                        i: j,
                    },
                ) = (x, y)
                {
                    if a == b
                        && self.poset.leq(xi, yi) != e_leq(EPoint { n, i }, EPoint { n: m, i: j })
                    {
                        rep.add_witness(
                            "same-level-order-differs-from-E",
                            vec![x.to_string(), y.to_string()],
                        );
                    }
                }
            }
        }
        // (4) projections onto each lower ideal separate same-level points
        for gamma in 1..self.levels() {
            let level_points: Vec<usize> = (0..self.points.len())
                .filter(|&i| self.level_of(i) == Some(gamma))
                .collect();
            for beta in 1..=gamma {
                for (ai, &a) in level_points.iter().enumerate() {
                    for &b in &level_points[ai + 1..] {
                        if self.pi(beta, a) == self.pi(beta, b) {
                            rep.add_witness(
                                "projection-identifies-same-level-points",
                                vec![
                                    beta.to_string(),
                                    self.poset.id(a).to_string(),
                                    self.poset.id(b).to_string(),
                                ],
                            );
                        }
                    }
                }
            }
        }
        // (6) box-relative tail domination: everything the stage chain
        // reaches sits below (level, n, 0) for a final segment of n. Window
        // maximals the chain cannot reach are truncation artifacts; their
        // count is reported.
        for (s, seq) in self.sequences.iter().enumerate() {
            let level = s as u32 + 1;
            let width = self.widths[s];
            let last_even = seq[2 * (width as usize - 1)];
            let mut stranded = 0usize;
            for x in self.ideal_below(level).iter_ones() {
                if !self.poset.leq(x, last_even) {
                    stranded += 1;
                    continue;
                }
                let n0 = (0..width).find(|&n| {
                    let slot = self
                        .index_of_point(CPoint::Node { level, n, i: 0 })
                        .unwrap();
                    self.poset.leq(x, slot)
                });
                match n0 {
                    None => rep.add_witness(
                        "reached-element-without-tail-domination",
                        vec![self.poset.id(x).to_string(), level.to_string()],
                    ),
                    Some(n0) => {
                        for n in n0..width {
                            let slot = self
                                .index_of_point(CPoint::Node { level, n, i: 0 })
                                .unwrap();
                            if !self.poset.leq(x, slot) {
                                rep.add_witness(
                                    "tail-domination-gap",
                                    vec![
                                        self.poset.id(x).to_string(),
                                        CPoint::Node { level, n, i: 0 }.to_string(),
                                    ],
                                );
                            }
                        }
                    }
                }
            }
            rep.note(format!(
                "stage {level}: {stranded} window-boundary element(s) out of chain reach"
            ));
        }
        rep.truncate_witnesses(20);
        rep
    }

    /// Exhaustive breadth-2 verification on the box: every 3-subset whose
    /// joins exist in the box has a 2-subset with the same join; plus the
    /// 3-ladder bound.
    pub fn check_breadth2(&self) -> Report {
        let mut rep = self.poset.is_n_ladder_box(3);
        let n = self.points.len();
        for x in 0..n {
            for y in x + 1..n {
                let Some(jxy) = self.poset.join(x, y) else {
                    continue;
                };
                for z in y + 1..n {
                    let (Some(jxz), Some(jyz)) = (self.poset.join(x, z), self.poset.join(y, z))
                    else {
                        continue;
                    };
                    if self.poset.join(jxy, z).is_none() {
                        continue;
                    }
                    let collapses = self.poset.leq(z, jxy)
                        || self.poset.leq(y, jxz)
                        || self.poset.leq(x, jyz);
                    if !collapses {
                        rep.add_witness(
                            "triple-join-does-not-collapse",
                            vec![
                                self.poset.id(x).to_string(),
                                self.poset.id(y).to_string(),
                                self.poset.id(z).to_string(),
                            ],
                        );
                    }
                }
            }
        }
        rep.truncate_witnesses(20);
        rep
    }

    /// Diagnostic shadow of the at-most-one-level claim: for a meet-closed
    /// 2-ladder subset, report per level whether the complement of the subset
    /// stays cofinal. Points at the window edge have no strict dominator in
    /// the box and are not counted. Carries no verdict.
    pub fn complement_cofinality_diagnostic(&self, c: &Bits) -> Report {
        let mut rep = Report::pass();
        let mut flagged = Vec::new();
        for level in 1..=self.levels() {
            let carrier = self.ideal_below(level);
            let undominated = carrier.iter_ones().any(|x| {
                let headroom = match self.points[x] {
                    CPoint::Zero => true,
                    CPoint::Node { level: l, n, .. } => {
                        let width = if l == 0 {
                            self.base_width
                        } else {
                            self.widths[(l - 1) as usize]
                        };
                        n + 1 < width
                    }
                };
                headroom
                    && !carrier
                        .iter_ones()
                        .any(|y| !c.get(y) && self.poset.leq(x, y))
            });
            if undominated {
                flagged.push(level);
            }
        }
        rep.note(format!(
            "levels whose complement misses cofinality: {flagged:?} ({} of {})",
            flagged.len(),
            self.levels()
        ));
        rep
    }

    pub fn to_doc(&self) -> ClubDoc {
        ClubDoc {
            base_width: self.base_width,
            widths: self.widths.clone(),
            poset: crate::io::canonical_doc(&self.poset),
            sequences: self
                .sequences
                .iter()
                .map(|seq| seq.iter().map(|&i| self.poset.id(i).to_string()).collect())
                .collect(),
        }
    }
}

/// Serialized build state: the poset document plus the per-stage chains.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClubDoc {
    pub base_width: u32,
    pub widths: Vec<u32>,
    pub poset: PosetDoc,
    pub sequences: Vec<Vec<String>>,
}

impl ClubDoc {
    /// Rebuild the state by replaying the chains against a fresh base.
    pub fn to_state(&self) -> Result<ClubState, ClubError> {
        let mut state = ClubState::base(self.base_width);
        for (s, width) in self.widths.iter().enumerate() {
            let seq = self
                .sequences
                .get(s)
                .ok_or_else(|| ClubError::MalformedState("missing stage sequence".into()))?
                .iter()
                .map(|id| {
                    state
                        .poset
                        .index(id)
                        .ok_or_else(|| ClubError::MalformedState(format!("unknown element {id}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            state = state.extend_stage(seq, *width)?;
        }
        Ok(state)
    }
}

/// Build a full state: auto-sized base level (four times the first stage
/// width, so stage chains of twice the width exist), then one greedy chain
/// and extension per scheduled stage.
pub fn build(
    widths: &[u32],
    base_width: Option<u32>,
    seed: u64,
    target_parity: Option<u8>,
) -> Result<ClubState, ClubError> {
    if widths.is_empty() {
        return Err(ClubError::BadSchedule("empty width schedule".into()));
    }
    if widths.contains(&0) {
        return Err(ClubError::BadSchedule("widths must be positive".into()));
    }
    let base = base_width.unwrap_or(4 * widths[0]);
    let mut state = ClubState::base(base);
    let mut rng = crate::gen::substream(seed, "club-sequences");
    for (s, &w) in widths.iter().enumerate() {
        let avoid = |p: CPoint| match (target_parity, p) {
            (Some(parity), CPoint::Node { i, .. }) => i != parity,
            _ => false,
        };
        let seq = state
            .choose_stage_sequence(2 * w as usize, &avoid, &mut rng)
            .map_err(|e| match e {
                ClubError::InfeasibleLength { requested, max } => {
                    ClubError::BadSchedule(format!(
                        "stage {}: need a chain of {requested}, maximum feasible is {max}",
                        s + 1
                    ))
                }
                other => other,
            })?;
        state = state.extend_stage(seq, w)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::substream;

    #[test]
    fn e_order_examples() {
        assert!(e_leq(EPoint { n: 0, i: 0 }, EPoint { n: 1, i: 1 }));
        assert!(!e_leq(EPoint { n: 0, i: 0 }, EPoint { n: 0, i: 1 }));
        assert!(!e_leq(EPoint { n: 0, i: 1 }, EPoint { n: 0, i: 0 }));
        assert!(e_leq(EPoint { n: 3, i: 1 }, EPoint { n: 3, i: 1 }));
        // i = 0 points are never above anything but themselves
        assert!(!e_leq(EPoint { n: 0, i: 1 }, EPoint { n: 5, i: 0 }));
    }

    #[test]
    fn base_stage_passes() {
        let s = ClubState::base(4);
        assert_eq!(s.poset().len(), 9);
        let rep = s.check_stage_properties();
        assert!(rep.passed(), "{rep}");
        assert!(s.check_breadth2().passed());
    }

    #[test]
    fn two_stage_hand_picked_build() {
        let s = ClubState::base(8);
        // the natural chain through level 0
        let mut seq = vec![s.index_of_point(CPoint::Node { level: 0, n: 0, i: 0 }).unwrap()];
        for n in 1..8 {
            seq.push(s.index_of_point(CPoint::Node { level: 0, n, i: 1 }).unwrap());
        }
        let s2 = s.extend_stage(seq, 4).expect("stage extends");
        let rep = s2.check_stage_properties();
        assert!(rep.passed(), "{rep}");
        assert!(s2.check_breadth2().passed());
        // cover profile: (1,n,0) has exactly one lower cover, its projection
        for n in 0..4 {
            let idx = s2
                .index_of_point(CPoint::Node { level: 1, n, i: 0 })
                .unwrap();
            let covers = s2.poset().lower_covers(idx);
            assert_eq!(covers.len(), 1);
            assert_eq!(covers[0], s2.pi(1, idx));
        }
        // (1,n,1) has at most three, drawn from the stated set
        for n in 0..4u32 {
            let idx = s2
                .index_of_point(CPoint::Node { level: 1, n, i: 1 })
                .unwrap();
            let covers = s2.poset().lower_covers(idx);
            assert!(covers.len() <= 3);
            let mut allowed = vec![s2.pi(1, idx)];
            if n > 0 {
                for i in 0..2u8 {
                    allowed.push(
                        s2.index_of_point(CPoint::Node { level: 1, n: n - 1, i })
                            .unwrap(),
                    );
                }
            }
            for c in covers {
                assert!(allowed.contains(&c));
            }
        }
    }

    #[test]
    fn projection_jump_violation_is_rejected() {
        let s = ClubState::base(8);
        let mut seq = vec![s.index_of_point(CPoint::Node { level: 0, n: 0, i: 0 }).unwrap()];
        for n in 1..8 {
            seq.push(s.index_of_point(CPoint::Node { level: 0, n, i: 1 }).unwrap());
        }
        let s2 = s.extend_stage(seq, 4).unwrap();
        // (0,7,1) is the top chain element; the projection of (1,3,1) onto
        // level 1 is exactly it, so this pair violates the jump condition
        let x = s2.index_of_point(CPoint::Node { level: 0, n: 7, i: 1 }).unwrap();
        let y = s2.index_of_point(CPoint::Node { level: 1, n: 3, i: 1 }).unwrap();
        let err = s2.extend_stage(vec![x, y], 1).unwrap_err();
        match err {
            ClubError::SequenceInvalid(rep) => {
                assert!(rep
                    .witnesses
                    .iter()
                    .any(|w| w.claim == "projection-returns-to-previous-element"
                        && w.elements == vec!["0.7.1".to_string(), "1.3.1".to_string()]));
            }
            other => panic!("expected SequenceInvalid, got {other}"),
        }
    }

    #[test]
    fn choose_length_zero_and_blanket_avoid() {
        let s = ClubState::base(4);
        let mut rng = substream(1, "club-test");
        assert!(s
            .choose_stage_sequence(0, &|_| false, &mut rng)
            .unwrap()
            .is_empty());
        let err = s
            .choose_stage_sequence(1, &|_| true, &mut rng)
            .unwrap_err();
        assert!(matches!(
            err,
            ClubError::InfeasibleLength { requested: 1, max: 0 }
        ));
    }

    #[test]
    fn greedy_three_stage_build() {
        let state = build(&[4, 4, 4], None, 20250809, None).expect("schedule is feasible");
        assert_eq!(state.base_width(), 16);
        assert_eq!(state.poset().len(), 1 + 32 + 8 + 8 + 8);
        assert!(state.check_stage_properties().passed());
        assert!(state.check_breadth2().passed());
    }

    #[test]
    fn parity_one_build() {
        let state = build(&[2], Some(8), 7, Some(1)).expect("parity-1 chains exist");
        for &i in &state.sequences()[0] {
            match state.points()[i] {
                CPoint::Node { i: bit, .. } => assert_eq!(bit, 1),
                CPoint::Zero => panic!("zero in sequence"),
            }
        }
    }

    #[test]
    fn chain_subset_diagnostic() {
        let state = build(&[2, 2], None, 3, None).unwrap();
        // zero plus a stage chain is meet-closed and a chain, hence a 2-ladder
        let mut c = Bits::new(state.points().len());
        c.set(0);
        for &i in &state.sequences()[1] {
            c.set(i);
        }
        assert!(state.poset().is_meet_subsemilattice(&c).passed());
        let rep = state.complement_cofinality_diagnostic(&c);
        assert!(rep.passed());
        assert!(rep.notes[0].contains("complement misses cofinality"));
    }

    #[test]
    fn state_roundtrip() {
        let state = build(&[3, 3], None, 99, None).unwrap();
        let doc = state.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        let back: ClubDoc = serde_json::from_str(&json).unwrap();
        let replayed = back.to_state().unwrap();
        assert!(crate::io::order_isomorphic_by_ids(
            state.poset(),
            replayed.poset()
        ));
    }
}
