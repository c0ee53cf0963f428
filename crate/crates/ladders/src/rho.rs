//! Finite truncations of the lattice over `{0} ∪ (levels × ω × ω)` ordered by
//! a table of non-decreasing integer sequences: the order and its closed-form
//! join and projection, the four table axioms and their equivalence with the
//! join-semilattice property, lower-finiteness profiles, the inductive table
//! builder, and the non-maximality witness set, each checkable against the
//! brute-force poset oracles on a materialized box.

use crate::bits::Bits;
use crate::poset::{FinitePoset, IdealSet};
use crate::report::Report;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum RhoError {
    #[error("n-coordinate {n} exceeds the table window {window}")]
    WindowExceeded { n: u32, window: u32 },
    #[error("level {level} out of range (table has {levels} levels)")]
    LevelOutOfRange { level: u32, levels: u32 },
    #[error("malformed f-family: {0}")]
    MalformedFamily(String),
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("table axioms must hold first:\n{0}")]
    AxiomsRequired(Report),
}

/// A point of the carrier: the least element, or (level, n, m). The
/// m-coordinate is conceptually unbounded; windows bound only n.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum KPoint {
    Zero,
    Node { level: u32, n: u32, m: u32 },
}

impl KPoint {
    pub fn node(level: u32, n: u32, m: u32) -> KPoint {
        KPoint::Node { level, n, m }
    }
}

impl std::fmt::Display for KPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KPoint::Zero => write!(f, "0"),
            KPoint::Node { level, n, m } => write!(f, "{level}.{n}.{m}"),
        }
    }
}

impl std::str::FromStr for KPoint {
    type Err = String;
    fn from_str(s: &str) -> Result<KPoint, String> {
        if s == "0" {
            return Ok(KPoint::Zero);
        }
        let parts: Vec<&str> = s.split('.').collect();
        if parts.len() != 3 {
            return Err(format!("expected `level.n.m` or `0`, got `{s}`"));
        }
        let nums: Vec<u32> = parts
            .iter()
            .map(|p| p.parse().map_err(|_| format!("bad coordinate in `{s}`")))
            .collect::<Result<_, _>>()?;
        Ok(KPoint::node(nums[0], nums[1], nums[2]))
    }
}

/// Finite exploration region `{0} ∪ (levels × window × mmax)`. A zero-level
/// box is just `{0}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KBox {
    pub levels: u32,
    pub window: u32,
    pub mmax: u32,
}

impl KBox {
    pub fn new(levels: u32, window: u32, mmax: u32) -> KBox {
        KBox {
            levels,
            window,
            mmax,
        }
    }

    pub fn contains(&self, p: KPoint) -> bool {
        match p {
            KPoint::Zero => true,
            KPoint::Node { level, n, m } => level < self.levels && n < self.window && m < self.mmax,
        }
    }

    pub fn points(&self) -> Vec<KPoint> {
        let mut out = vec![KPoint::Zero];
        for level in 0..self.levels {
            for n in 0..self.window {
                for m in 0..self.mmax {
                    out.push(KPoint::node(level, n, m));
                }
            }
        }
        out
    }
}

/// The map on level pairs, restricted to a finite window: for each pair
/// `a < b < levels` a length-`window` array. The diagonal is identically zero
/// and never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoTable {
    levels: u32,
    window: u32,
    rows: Vec<Vec<u32>>,
}

fn tri(a: u32, b: u32) -> usize {
    debug_assert!(a < b);
    (b as usize * (b as usize - 1)) / 2 + a as usize
}

impl RhoTable {
    pub fn zero(levels: u32, window: u32) -> RhoTable {
        let n_rows = (levels as usize * levels.saturating_sub(1) as usize) / 2;
        RhoTable {
            levels,
            window,
            rows: vec![vec![0; window as usize]; n_rows],
        }
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn max_value(&self) -> u32 {
        self.rows
            .iter()
            .flat_map(|r| r.iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn set_row(&mut self, a: u32, b: u32, values: Vec<u32>) {
        assert!(a < b && b < self.levels);
        assert_eq!(values.len(), self.window as usize);
        self.rows[tri(a, b)] = values;
    }

    pub fn row(&self, a: u32, b: u32) -> &[u32] {
        assert!(a < b && b < self.levels);
        &self.rows[tri(a, b)]
    }

    /// `ϱ(a,b)(k)` with the diagonal extended by zero.
    pub fn rho(&self, a: u32, b: u32, k: u32) -> u32 {
        debug_assert!(a <= b && b < self.levels && k < self.window);
        if a == b {
            0
        } else {
            self.rows[tri(a, b)][k as usize]
        }
    }

    fn check_window(&self, p: KPoint) -> Result<(), RhoError> {
        if let KPoint::Node { level, n, .. } = p {
            if level >= self.levels {
                return Err(RhoError::LevelOutOfRange {
                    level,
                    levels: self.levels,
                });
            }
            if n >= self.window {
                return Err(RhoError::WindowExceeded {
                    n,
                    window: self.window,
                });
            }
        }
        Ok(())
    }

    /// The order: zero below everything; otherwise componentwise with the
    /// table bound `ϱ(α,β)(n) <= m'`.
    pub fn leq(&self, x: KPoint, y: KPoint) -> Result<bool, RhoError> {
        self.check_window(x)?;
        self.check_window(y)?;
        Ok(match (x, y) {
            (KPoint::Zero, _) => true,
            (_, KPoint::Zero) => false,
            (
                KPoint::Node { level: a, n, m },
                KPoint::Node {
                    level: b,
                    n: n2,
                    m: m2,
                },
            ) => a <= b && n <= n2 && m <= m2 && self.rho(a, b, n) <= m2,
        })
    }

    /// Closed-form least upper bound. Correct when the table axioms hold,
    /// where it must agree with the brute-force bound inside any box.
    pub fn join(&self, x: KPoint, y: KPoint) -> Result<KPoint, RhoError> {
        self.check_window(x)?;
        self.check_window(y)?;
        Ok(match (x, y) {
            (KPoint::Zero, p) | (p, KPoint::Zero) => p,
            (
                KPoint::Node { level: a, n, m },
                KPoint::Node {
                    level: b,
                    n: n2,
                    m: m2,
                },
            ) => {
                // swap so the first point sits at the lower level
                let (a, n, m, b, n2, m2) = if a <= b {
                    (a, n, m, b, n2, m2)
                } else {
                    (b, n2, m2, a, n, m)
                };
                KPoint::node(b, n.max(n2), m.max(m2).max(self.rho(a, b, n)))
            }
        })
    }

    /// Closed-form projection onto the ideal of the first `level` levels.
    /// Points already inside that ideal are fixed.
    pub fn pi(&self, level: u32, x: KPoint) -> Result<KPoint, RhoError> {
        self.check_window(x)?;
        let KPoint::Node {
            level: beta,
            n,
            m,
        } = x
        else {
            return Ok(KPoint::Zero);
        };
        if beta < level {
            return Ok(x);
        }
        let Some(nu) = (0..level)
            .rev()
            .find(|&mu| self.rho(mu, beta, 0) <= m)
        else {
            return Ok(KPoint::Zero);
        };
        let n_prime = (0..=n)
            .rev()
            .find(|&k| self.rho(nu, beta, k) <= m)
            .expect("k = 0 qualifies by the choice of nu");
        Ok(KPoint::node(nu, n_prime, m))
    }

    /// Check the four axioms over all level triples and window indices.
    pub fn check_axioms(&self) -> Report {
        let mut rep = Report::pass();
        let a_max = self.levels;
        for b in 1..a_max {
            for a in 0..b {
                for k in 1..self.window {
                    if self.rho(a, b, k) < self.rho(a, b, k - 1) {
                        rep.add_witness(
                            "rho1-not-nondecreasing",
                            vec![a.to_string(), b.to_string(), (k - 1).to_string()],
                        );
                    }
                }
            }
        }
        for c in 2..a_max {
            for b in 1..c {
                for a in 0..b {
                    for k in 0..self.window {
                        let r_ab = self.rho(a, b, k);
                        let r_ac = self.rho(a, c, k);
                        let r_bc = self.rho(b, c, k);
                        let witness =
                            || vec![a.to_string(), b.to_string(), c.to_string(), k.to_string()];
                        if r_ac > r_ab.max(r_bc) {
                            rep.add_witness("rho2", witness());
                        }
                        if r_ab > r_ac.max(r_bc) {
                            rep.add_witness("rho3", witness());
                        }
                        if r_bc > r_ac.max(self.rho(b, c, 0)) {
                            rep.add_witness("rho4", witness());
                        }
                    }
                }
            }
        }
        rep.truncate_witnesses(20);
        rep
    }

    /// Count profile for lower finiteness: for each level and each bound
    /// `n <= bound`, how many lower levels map into `[0, n]` at index zero.
    /// Finiteness is automatic at finite scale, so this always passes; the
    /// profile feeds ladder diagnostics.
    pub fn check_lower_finiteness(&self, bound: u32) -> Report {
        let mut rep = Report::pass();
        for alpha in 0..self.levels {
            let counts: Vec<usize> = (0..=bound)
                .map(|n| (0..alpha).filter(|&nu| self.rho(nu, alpha, 0) <= n).count())
                .collect();
            rep.note(format!(
                "level {alpha}: |{{nu < {alpha} : rho(nu,{alpha})(0) <= n}}| for n=0..={bound}: {counts:?}"
            ));
        }
        rep
    }

    /// Materialize a box as a finite poset under the order. Ids are `0` and
    /// `level.n.m`. Returns the poset and the point of each element.
    pub fn materialize(&self, kbox: &KBox) -> Result<(FinitePoset, Vec<KPoint>), RhoError> {
        if kbox.levels > self.levels {
            return Err(RhoError::LevelOutOfRange {
                level: kbox.levels,
                levels: self.levels,
            });
        }
        if kbox.levels > 0 && kbox.window > self.window {
            return Err(RhoError::WindowExceeded {
                n: kbox.window,
                window: self.window,
            });
        }
        let points = kbox.points();
        let ids = points.iter().map(|p| p.to_string()).collect();
        let leq: Vec<Bits> = points
            .iter()
            .map(|&x| {
                Bits::from_indices(
                    points.len(),
                    points
                        .iter()
                        .enumerate()
                        .filter(|&(_, &y)| self.leq(x, y).unwrap())
                        .map(|(j, _)| j),
                )
            })
            .collect();
        let p = FinitePoset::from_leq_fn(ids, |a, b| leq[a].get(b));
        Ok((p, points))
    }

    /// Box-safe interior: the elements whose closed-form join with every box
    /// element stays inside the box.
    pub fn interior(&self, kbox: &KBox, points: &[KPoint]) -> Result<Bits, RhoError> {
        let mut interior = Bits::new(points.len());
        for (i, &x) in points.iter().enumerate() {
            let mut ok = true;
            for &y in points {
                if !kbox.contains(self.join(x, y)?) {
                    ok = false;
                    break;
                }
            }
            if ok {
                interior.set(i);
            }
        }
        Ok(interior)
    }

    /// Whether the box-safe interior, as an induced subposet, is a valid
    /// join-semilattice. This is the finite shadow of the axioms/semilattice
    /// equivalence and must match `check_axioms` exactly.
    pub fn box_interior_is_join_semilattice(&self, kbox: &KBox) -> Result<bool, RhoError> {
        let (p, points) = self.materialize(kbox)?;
        let interior = self.interior(kbox, &points)?;
        let (sub, _) = p.restrict(&interior);
        Ok(sub.is_join_semilattice().passed())
    }

    /// The box with m-coordinate headroom used by the equivalence checks.
    pub fn equivalence_box(&self) -> KBox {
        KBox::new(self.levels, self.window, self.max_value() + self.window + 2)
    }

    /// Materialize a box and run the 3-ladder check on its box-safe interior.
    pub fn check_3ladder_box(&self, kbox: &KBox) -> Report {
        let axioms = self.check_axioms();
        if !axioms.passed() {
            let mut rep = axioms;
            rep.note("table axioms fail; the box check requires them");
            return rep;
        }
        match self.materialize(kbox) {
            Ok((p, points)) => {
                let interior = self.interior(kbox, &points).expect("windows checked");
                let (sub, _) = p.restrict(&interior);
                let mut rep = sub.is_n_ladder(3);
                rep.note(format!(
                    "box elements: {}, interior: {}",
                    points.len(),
                    interior.count()
                ));
                rep
            }
            Err(e) => Report::fail("box-materialization", vec![e.to_string()]),
        }
    }

    /// Random table: independent uniform values then a non-decreasing pass per
    /// row.
    pub fn random(rng: &mut ChaCha8Rng, levels: u32, window: u32, max_value: u32) -> RhoTable {
        let mut t = RhoTable::zero(levels, window);
        for b in 1..levels {
            for a in 0..b {
                t.set_row(
                    a,
                    b,
                    crate::gen::random_nondecreasing(rng, window as usize, max_value),
                );
            }
        }
        t
    }

    pub fn to_doc(&self) -> RhoDoc {
        let mut rows = BTreeMap::new();
        for b in 1..self.levels {
            for a in 0..b {
                rows.insert(format!("{a},{b}"), self.row(a, b).to_vec());
            }
        }
        RhoDoc {
            levels: self.levels,
            window: self.window,
            rows,
        }
    }
}

/// JSON form of a table: `{"levels": A, "window": N, "rows": {"a,b": [..]}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RhoDoc {
    pub levels: u32,
    pub window: u32,
    pub rows: BTreeMap<String, Vec<u32>>,
}

impl RhoDoc {
    pub fn to_table(&self) -> Result<RhoTable, RhoError> {
        let mut t = RhoTable::zero(self.levels, self.window);
        let mut seen = 0usize;
        for (key, values) in &self.rows {
            let parts: Vec<&str> = key.split(',').collect();
            let bad = || RhoError::MalformedTable(format!("bad row key `{key}`"));
            if parts.len() != 2 {
                return Err(bad());
            }
            let a: u32 = parts[0].trim().parse().map_err(|_| bad())?;
            let b: u32 = parts[1].trim().parse().map_err(|_| bad())?;
            if !(a < b && b < self.levels) {
                return Err(RhoError::MalformedTable(format!(
                    "row `{key}` out of range for {} levels",
                    self.levels
                )));
            }
            if values.len() != self.window as usize {
                return Err(RhoError::MalformedTable(format!(
                    "row `{key}` has {} entries, window is {}",
                    values.len(),
                    self.window
                )));
            }
            t.set_row(a, b, values.clone());
            seen += 1;
        }
        let expected = (self.levels as usize * self.levels.saturating_sub(1) as usize) / 2;
        if seen != expected {
            return Err(RhoError::MalformedTable(format!(
                "expected {expected} rows, found {seen}"
            )));
        }
        Ok(t)
    }
}

/// Overrides for the inductive builder: a per-stage non-decreasing level
/// sequence whose values approach the stage from below.
#[derive(Clone, Debug, Default)]
pub struct BuildChoices {
    pub stage_sequences: BTreeMap<u32, Vec<u32>>,
}

fn default_stage_sequence(delta: u32) -> Vec<u32> {
    (0..delta).collect()
}

fn seq_at(seq: &[u32], n: usize) -> u32 {
    seq[n.min(seq.len() - 1)]
}

/// Inductive construction of a table satisfying the axioms, stage by stage:
/// at stage `delta` pick the approach sequence, fold the given row `f_delta`
/// and all earlier rows between approach levels into a pointwise maximum, and
/// define the new rows by the stage formula. Eventual domination is finitized
/// to pointwise comparison on the window, so every inequality the stage
/// formula needs holds at every index.
pub fn build_rho(
    levels: u32,
    window: u32,
    f_family: &[Vec<u32>],
    choices: &BuildChoices,
) -> Result<RhoTable, RhoError> {
    if (f_family.len() as u32) < levels {
        return Err(RhoError::MalformedFamily(format!(
            "need at least {levels} rows, found {}",
            f_family.len()
        )));
    }
    for (i, f) in f_family.iter().enumerate().take(levels as usize) {
        if f.len() < window as usize {
            return Err(RhoError::MalformedFamily(format!(
                "row {i} shorter than the window"
            )));
        }
        if f.windows(2).any(|w| w[0] > w[1]) {
            return Err(RhoError::MalformedFamily(format!("row {i} decreases")));
        }
    }
    let mut t = RhoTable::zero(levels, window);
    for delta in 1..levels {
        let seq = match choices.stage_sequences.get(&delta) {
            Some(s) => {
                if s.is_empty()
                    || s.windows(2).any(|w| w[0] > w[1])
                    || *s.last().unwrap() != delta - 1
                    || s.iter().any(|&v| v >= delta)
                {
                    return Err(RhoError::MalformedFamily(format!(
                        "stage {delta} sequence must be non-decreasing, below the stage, \
                         and end at {}",
                        delta - 1
                    )));
                }
                s.clone()
            }
            None => default_stage_sequence(delta),
        };
        let n_alpha = |alpha: u32| -> usize {
            (0..)
                .find(|&n| alpha <= seq_at(&seq, n))
                .expect("sequence reaches delta - 1")
        };

        // pointwise maximum of f_delta and all rows between approach levels
        let mut f_star: Vec<u32> = f_family[delta as usize][..window as usize].to_vec();
        let mut values: Vec<u32> = seq.clone();
        values.sort_unstable();
        values.dedup();
        for (i, &lo) in values.iter().enumerate() {
            for &hi in &values[i + 1..] {
                for (k, v) in f_star.iter_mut().enumerate() {
                    *v = (*v).max(t.rho(lo, hi, k as u32));
                }
            }
        }
        for k in 1..window as usize {
            f_star[k] = f_star[k].max(f_star[k - 1]);
        }

        // threshold index for stage n: first window index from which all
        // earlier pairwise rows sit below f_star (0 under the pointwise max,
        // but computed literally; window-1 if none exists)
        let k_of = |n: usize| -> u32 {
            let holds_from = |k: u32| -> bool {
                (k..window).all(|j| {
                    (0..n).all(|m| {
                        let (lo, hi) = (seq_at(&seq, m), seq_at(&seq, n));
                        lo >= hi || t.rho(lo, hi, j) <= f_star[j as usize]
                    })
                })
            };
            (0..window).find(|&k| holds_from(k)).unwrap_or(window - 1)
        };

        let mut stage_rows = Vec::with_capacity(delta as usize);
        for alpha in 0..delta {
            let na = n_alpha(alpha);
            let d_na = seq_at(&seq, na);
            let k_na = k_of(na);
            let mut row = Vec::with_capacity(window as usize);
            for k in 0..window {
                // alpha <= d_na by the choice of the approach index
                let mut v = (na as u32)
                    .max(f_star[k as usize])
                    .max(t.rho(alpha, d_na, k));
                for m in 0..na {
                    let d_m = seq_at(&seq, m);
                    if d_m < d_na {
                        v = v.max(t.rho(d_m, d_na, k_na));
                    }
                }
                row.push(v);
            }
            stage_rows.push(row);
        }
        for (alpha, row) in stage_rows.into_iter().enumerate() {
            t.set_row(alpha as u32, delta, row);
        }
    }
    Ok(t)
}

/// Materialize the candidate set `{0} ∪ {(α,n,f(n)) : ϱ(0,α)(n) <= f(n)}`
/// inside a box and verify, on the box-safe interior, that it is meet-closed,
/// that each member has at most two lower covers in its induced order, and
/// that every interior point that still has window headroom lies below a
/// member.
pub fn nonmax_witness(t: &RhoTable, f: &[u32], kbox: &KBox) -> Result<Report, RhoError> {
    let axioms = t.check_axioms();
    if !axioms.passed() {
        return Err(RhoError::AxiomsRequired(axioms));
    }
    if f.len() < kbox.window as usize && kbox.levels > 0 {
        return Err(RhoError::MalformedFamily(
            "f shorter than the box window".to_string(),
        ));
    }
    if f.windows(2).any(|w| w[0] > w[1]) {
        return Err(RhoError::MalformedFamily("f decreases".to_string()));
    }

    let (p, points) = t.materialize(kbox)?;
    let interior = t.interior(kbox, &points)?;
    let in_c = |pt: KPoint| -> bool {
        match pt {
            KPoint::Zero => true,
            KPoint::Node { level, n, m } => m == f[n as usize] && t.rho(0, level, n) <= m,
        }
    };

    let mut rep = Report::pass();
    let c_bits = Bits::from_indices(
        points.len(),
        points
            .iter()
            .enumerate()
            .filter(|&(_, &pt)| in_c(pt))
            .map(|(i, _)| i),
    );
    let mut c_interior = c_bits.clone();
    c_interior.and_assign(&interior);

    // meet-closure on the interior (interior meets agree with the ambient ones)
    let (int_poset, int_map) = p.restrict(&interior);
    let c_in_int = Bits::from_indices(
        int_poset.len(),
        int_map
            .iter()
            .enumerate()
            .filter(|&(_, &old)| c_bits.get(old))
            .map(|(new, _)| new),
    );
    rep.merge(int_poset.is_meet_subsemilattice(&c_in_int));

    // at most two lower covers within the candidate set
    let (c_poset, _) = int_poset.restrict(&c_in_int);
    for x in 0..c_poset.len() {
        let covers = c_poset.lower_covers(x);
        if covers.len() > 2 {
            rep.add_witness(
                "more-than-2-lower-covers-in-witness",
                std::iter::once(c_poset.id(x).to_string())
                    .chain(covers.iter().map(|&q| c_poset.id(q).to_string()))
                    .collect(),
            );
        }
    }

    // box-relative cofinality: a point has headroom when the existence step
    // of the construction can land inside the box above it
    for (i, &pt) in points.iter().enumerate() {
        if !interior.get(i) {
            continue;
        }
        let KPoint::Node { level, n, m } = pt else {
            continue;
        };
        let headroom = (n..kbox.window).any(|n2| {
            let fv = f[n2 as usize];
            fv < kbox.mmax && m <= fv && t.rho(0, level, n2) <= fv
        });
        if !headroom {
            continue;
        }
        let dominated = c_bits.iter_ones().any(|j| p.leq(i, j));
        if !dominated {
            rep.add_witness("witness-not-cofinal-at", vec![pt.to_string()]);
        }
    }

    // diagnostic shadow of the at-most-one-infinite-column claim: no verdict
    if kbox.levels > 0 {
        let gamma = kbox.levels - 1;
        let counts: Vec<usize> = (0..kbox.window)
            .map(|n| {
                (0..kbox.mmax)
                    .filter(|&m| {
                        t.pi(gamma, KPoint::node(gamma, n, m))
                            .map(in_c)
                            .unwrap_or(false)
                    })
                    .count()
            })
            .collect();
        rep.note(format!(
            "projection-membership counts per n at level {gamma}: {counts:?} (diagnostic only)"
        ));
    }
    rep.note(format!(
        "candidate size {} ({} interior)",
        c_bits.count(),
        c_interior.count()
    ));
    rep.truncate_witnesses(20);
    Ok(rep)
}

/// The three points witnessing breadth 3: none is below the join of the
/// other two, on any table satisfying the first axiom.
pub fn breadth3_marker(t: &RhoTable) -> Result<Report, RhoError> {
    if t.levels < 2 || t.window < 2 {
        return Err(RhoError::MalformedTable(
            "breadth marker needs at least 2 levels and window 2".to_string(),
        ));
    }
    let x1 = KPoint::node(0, 0, t.rho(0, 1, 1) + 1);
    let x2 = KPoint::node(0, 1, 0);
    let x3 = KPoint::node(1, 0, 0);
    let mut rep = Report::pass();
    for (a, b, c) in [(x1, x2, x3), (x2, x1, x3), (x3, x1, x2)] {
        let j = t.join(b, c)?;
        if t.leq(a, j)? {
            rep.add_witness(
                "marker-point-below-join-of-other-two",
                vec![a.to_string(), b.to_string(), c.to_string(), j.to_string()],
            );
        }
    }
    Ok(rep)
}

/// Brute-force least upper bound inside a materialized box, for oracle
/// comparisons with the closed form.
pub fn brute_force_join(
    p: &FinitePoset,
    points: &[KPoint],
    x: KPoint,
    y: KPoint,
) -> Option<KPoint> {
    let xi = points.iter().position(|&q| q == x)?;
    let yi = points.iter().position(|&q| q == y)?;
    p.join(xi, yi).map(|j| points[j])
}

/// Brute-force ideal projection inside a materialized box: the poset `pi`
/// applied to the ideal of all points below the given level.
pub fn brute_force_pi(
    p: &FinitePoset,
    points: &[KPoint],
    level: u32,
    x: KPoint,
) -> Option<KPoint> {
    let xi = points.iter().position(|&q| q == x)?;
    let carrier = Bits::from_indices(
        points.len(),
        points.iter().enumerate().filter_map(|(i, &q)| match q {
            KPoint::Zero => Some(i),
            KPoint::Node { level: l, .. } if l < level => Some(i),
            _ => None,
        }),
    );
    let ideal = IdealSet::from_unchecked(carrier);
    p.pi(&ideal, xi).ok().map(|i| points[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::substream;

    fn table_with_row01(window: u32, values: Vec<u32>) -> RhoTable {
        let mut t = RhoTable::zero(2, window);
        t.set_row(0, 1, values);
        t
    }

    #[test]
    fn leq_basics() {
        let t = table_with_row01(3, vec![2, 2, 2]);
        let any = KPoint::node(1, 2, 7);
        assert!(t.leq(KPoint::Zero, any).unwrap());
        assert!(t.leq(KPoint::Zero, KPoint::Zero).unwrap());
        // same level: product order
        assert!(t
            .leq(KPoint::node(0, 0, 1), KPoint::node(0, 2, 1))
            .unwrap());
        assert!(!t
            .leq(KPoint::node(0, 1, 0), KPoint::node(0, 0, 5))
            .unwrap());
        // cross level consults the table
        assert!(t
            .leq(KPoint::node(0, 0, 0), KPoint::node(1, 0, 2))
            .unwrap());
        assert!(!t
            .leq(KPoint::node(0, 0, 0), KPoint::node(1, 0, 1))
            .unwrap());
        assert!(matches!(
            t.leq(KPoint::node(0, 5, 0), KPoint::Zero),
            Err(RhoError::WindowExceeded { .. })
        ));
    }

    #[test]
    fn join_closed_form() {
        let t = table_with_row01(3, vec![1, 2, 3]);
        let x = KPoint::node(0, 2, 0);
        assert_eq!(t.join(x, x).unwrap(), x);
        assert_eq!(t.join(KPoint::Zero, x).unwrap(), x);
        // rho(0,1)(k) = k+1: join((0,2,0),(1,0,0)) = (1,2,3)
        let j = t.join(x, KPoint::node(1, 0, 0)).unwrap();
        assert_eq!(j, KPoint::node(1, 2, 3));
        // brute-force agreement in a box with enough m headroom
        let kbox = KBox::new(2, 3, 5);
        let (p, points) = t.materialize(&kbox).unwrap();
        assert_eq!(
            brute_force_join(&p, &points, x, KPoint::node(1, 0, 0)),
            Some(j)
        );
    }

    #[test]
    fn pi_closed_form() {
        // rho(0,1) = [1,3]
        let t = table_with_row01(2, vec![1, 3]);
        // level-0 points project to zero at level 0
        assert_eq!(t.pi(0, KPoint::node(0, 1, 1)).unwrap(), KPoint::Zero);
        // points inside the ideal are fixed
        assert_eq!(
            t.pi(1, KPoint::node(0, 1, 1)).unwrap(),
            KPoint::node(0, 1, 1)
        );
        // the worked case: (1,1,2) projects to (0,0,2)
        assert_eq!(
            t.pi(1, KPoint::node(1, 1, 2)).unwrap(),
            KPoint::node(0, 0, 2)
        );
        // no level below reaches: zero
        assert_eq!(t.pi(1, KPoint::node(1, 0, 0)).unwrap(), KPoint::Zero);
        // brute-force agreement
        let kbox = KBox::new(2, 2, 5);
        let (p, points) = t.materialize(&kbox).unwrap();
        for &x in &points {
            for level in 0..=1 {
                assert_eq!(
                    brute_force_pi(&p, &points, level, x),
                    Some(t.pi(level, x).unwrap()),
                    "pi mismatch at level {level} for {x}"
                );
            }
        }
    }

    #[test]
    fn axiom_checks() {
        assert!(RhoTable::zero(3, 2).check_axioms().passed());
        let bad1 = table_with_row01(2, vec![2, 1]);
        let rep = bad1.check_axioms();
        assert!(!rep.passed());
        assert_eq!(rep.witnesses[0].claim, "rho1-not-nondecreasing");
        assert_eq!(rep.witnesses[0].elements, vec!["0", "1", "0"]);

        let mut bad2 = RhoTable::zero(3, 2);
        bad2.set_row(0, 2, vec![1, 1]);
        let rep = bad2.check_axioms();
        assert!(!rep.passed());
        assert!(rep.witnesses.iter().any(|w| w.claim == "rho2"
            && w.elements == vec!["0", "1", "2", "0"]));
    }

    #[test]
    fn lower_finiteness_profile() {
        let t = RhoTable::zero(3, 2);
        let rep = t.check_lower_finiteness(2);
        assert!(rep.passed());
        // rho = 0 everywhere: count equals the level for every n
        assert!(rep.notes[2].contains("[2, 2, 2]"));
        let t1 = RhoTable::zero(1, 2);
        assert!(t1.check_lower_finiteness(1).passed());
        // strictly increasing zero-index pattern: counts grow one at a time
        let mut gap = RhoTable::zero(3, 2);
        gap.set_row(0, 2, vec![1, 1]);
        gap.set_row(1, 2, vec![2, 2]);
        let rep = gap.check_lower_finiteness(2);
        assert!(rep.notes[2].contains("[0, 1, 2]"), "{rep}");
    }

    #[test]
    fn three_ladder_boxes() {
        let t = RhoTable::zero(2, 3);
        let rep = t.check_3ladder_box(&KBox::new(2, 3, 4));
        assert!(rep.passed(), "{rep}");
        // one-level box: grid truncation, a 2-ladder
        let (p, points) = t.materialize(&KBox::new(1, 3, 3)).unwrap();
        let interior = t.interior(&KBox::new(1, 3, 3), &points).unwrap();
        let (sub, _) = p.restrict(&interior);
        assert!(sub.is_n_ladder(2).passed());
        // zero-only box
        assert!(t.check_3ladder_box(&KBox::new(0, 1, 1)).passed());
    }

    #[test]
    fn build_two_levels_matches_hand_trace() {
        let f = vec![vec![0, 0, 0], vec![1, 2, 2]];
        let t = build_rho(2, 3, &f, &BuildChoices::default()).unwrap();
        assert_eq!(t.row(0, 1), &[1, 2, 2], "rho(0,1) = f*_1 = f_1");
        assert!(t.check_axioms().passed());
    }

    #[test]
    fn build_zero_family_three_levels() {
        let f = vec![vec![0; 3]; 3];
        let t = build_rho(3, 3, &f, &BuildChoices::default()).unwrap();
        assert!(t.check_axioms().passed());
        assert_eq!(t.row(0, 1), &[0, 0, 0]);
        assert_eq!(t.row(0, 2), &[0, 0, 0]);
        // alpha = 1 joins stage 2 at approach index 1
        assert_eq!(t.row(1, 2), &[1, 1, 1]);
    }

    #[test]
    fn build_one_level_is_empty() {
        let t = build_rho(1, 3, &[vec![0, 0, 0]], &BuildChoices::default()).unwrap();
        assert_eq!(t, RhoTable::zero(1, 3));
    }

    #[test]
    fn build_rejects_malformed_family() {
        assert!(matches!(
            build_rho(2, 3, &[vec![0, 0, 0]], &BuildChoices::default()),
            Err(RhoError::MalformedFamily(_))
        ));
        assert!(matches!(
            build_rho(2, 3, &[vec![0, 0, 0], vec![2, 1, 3]], &BuildChoices::default()),
            Err(RhoError::MalformedFamily(_))
        ));
    }

    #[test]
    fn build_accepts_custom_stage_sequences() {
        let f = vec![vec![0; 3]; 4];
        let mut choices = BuildChoices::default();
        // stage 3 approaches through level 2 only
        choices.stage_sequences.insert(3, vec![2]);
        let t = build_rho(4, 3, &f, &choices).unwrap();
        assert!(t.check_axioms().passed());
        // every alpha < 3 now has approach index 0, so no index floor appears
        assert_eq!(t.row(0, 3), &[0, 0, 0]);
        let bad = BuildChoices {
            stage_sequences: [(3u32, vec![0u32, 2, 1])].into_iter().collect(),
        };
        assert!(matches!(
            build_rho(4, 3, &f, &bad),
            Err(RhoError::MalformedFamily(_))
        ));
    }

    #[test]
    fn build_dominates_family() {
        let mut rng = substream(11, "rho-build-test");
        for _ in 0..10 {
            let levels = 4;
            let window = 3;
            let f: Vec<Vec<u32>> = (0..levels)
                .map(|_| crate::gen::random_nondecreasing(&mut rng, window, 4))
                .collect();
            let t = build_rho(levels as u32, window as u32, &f, &BuildChoices::default()).unwrap();
            assert!(t.check_axioms().passed());
            assert!(t.check_3ladder_box(&t.equivalence_box()).passed());
            for (delta, row) in f.iter().enumerate().skip(1) {
                for (k, &bound) in row.iter().enumerate() {
                    assert!(bound <= t.rho(0, delta as u32, k as u32));
                }
            }
        }
    }

    #[test]
    fn witness_chain_for_unreachable_levels() {
        // rho(0,alpha)(k) >= 1 everywhere, f = 0: the candidate is the
        // level-0 spine plus zero, a chain, and all checks pass
        let mut t = RhoTable::zero(3, 3);
        t.set_row(0, 1, vec![1, 1, 1]);
        t.set_row(0, 2, vec![1, 1, 1]);
        t.set_row(1, 2, vec![1, 1, 1]);
        assert!(t.check_axioms().passed());
        let rep = nonmax_witness(&t, &[0, 0, 0], &KBox::new(3, 3, 4)).unwrap();
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn witness_zero_box_and_diagonal_f() {
        let t = RhoTable::zero(2, 3);
        assert!(nonmax_witness(&t, &[0, 1, 2], &KBox::new(0, 1, 1))
            .unwrap()
            .passed());
        // rho = 0, f(n) = n: candidate holds every (alpha, n, n)
        let rep = nonmax_witness(&t, &[0, 1, 2], &KBox::new(2, 3, 4)).unwrap();
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn breadth_marker_holds() {
        let t = table_with_row01(3, vec![1, 2, 2]);
        assert!(breadth3_marker(&t).unwrap().passed());
        let z = RhoTable::zero(2, 2);
        assert!(breadth3_marker(&z).unwrap().passed());
    }

    #[test]
    fn doc_roundtrip() {
        let mut t = RhoTable::zero(3, 2);
        t.set_row(0, 1, vec![1, 2]);
        t.set_row(0, 2, vec![0, 1]);
        t.set_row(1, 2, vec![2, 2]);
        let doc = t.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        let back: RhoDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_table().unwrap(), t);
    }
}
