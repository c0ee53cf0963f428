//! The acceptance suite: twelve property-based criteria, each with a pinned
//! seed, corpus size, exact tolerance, and runtime budget. The `acceptance`
//! integration test and the CLI `selftest` both run these.

use crate::bits::Bits;
use crate::club;
use crate::cohen;
use crate::extension;
use crate::gen::{self, substream};
use crate::poset::{FinitePoset, IdealSet};
use crate::rho::{self, KBox, RhoTable};
use std::time::{Duration, Instant};

const SUITE_SEED: u64 = 20260809;

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} {:<28} {} ({:.2}s / budget {:.0}s)",
            self.id,
            self.name,
            if self.passed { "pass" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.budget.as_secs_f64(),
        )
    }
}

struct Check {
    failures: Vec<String>,
    cases: usize,
}

impl Check {
    fn new() -> Check {
        Check {
            failures: Vec::new(),
            cases: 0,
        }
    }

    fn case(&mut self) {
        self.cases += 1;
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 10 {
            self.failures.push(msg());
        }
    }

    fn finish(
        self,
        id: usize,
        name: &'static str,
        started: Instant,
        budget_secs: u64,
    ) -> CriterionOutcome {
        let elapsed = started.elapsed();
        let budget = Duration::from_secs(budget_secs);
        let within = elapsed <= budget;
        let mut detail = format!("{} cases", self.cases);
        if !self.failures.is_empty() {
            detail = format!("{detail}; failures: {}", self.failures.join(" | "));
        }
        if !within {
            detail = format!("{detail}; over budget");
        }
        CriterionOutcome {
            id,
            name,
            passed: self.failures.is_empty() && within,
            detail,
            elapsed,
            budget,
        }
    }
}

/// All ideals of a small poset, by subset enumeration.
fn all_ideals(p: &FinitePoset) -> Vec<Bits> {
    assert!(p.len() <= 10);
    let mut out = Vec::new();
    for mask in 1usize..(1 << p.len()) {
        let bits = Bits::from_indices(p.len(), (0..p.len()).filter(|&i| mask >> i & 1 == 1));
        if p.is_ideal(&bits).passed() {
            out.push(bits);
        }
    }
    out
}

/// 1. Projection laws on random lattices and all their ideals.
pub fn criterion_01_pi_laws() -> CriterionOutcome {
    let started = Instant::now();
    let mut check = Check::new();
    let mut rng = substream(SUITE_SEED, "c1-pi-laws");
    for _ in 0..200 {
        let p = gen::random_lattice(&mut rng, 8);
        let ideals: Vec<IdealSet> = all_ideals(&p)
            .into_iter()
            .map(IdealSet::from_unchecked)
            .collect();
        for i in &ideals {
            for x in 0..p.len() {
                for y in 0..p.len() {
                    check.case();
                    let lhs = p.pi(i, p.meet(x, y).unwrap()).unwrap();
                    let rhs = p
                        .meet(p.pi(i, x).unwrap(), p.pi(i, y).unwrap())
                        .unwrap();
                    check.expect(lhs == rhs, || {
                        format!("meet law fails at ({}, {})", p.id(x), p.id(y))
                    });
                }
            }
        }
        for i in &ideals {
            for j in &ideals {
                if !i.subset_of(j) {
                    continue;
                }
                for x in 0..p.len() {
                    check.case();
                    let lhs = p.pi(i, p.pi(j, x).unwrap()).unwrap();
                    let rhs = p.pi(i, x).unwrap();
                    check.expect(lhs == rhs, || {
                        format!("composition law fails at {}", p.id(x))
                    });
                }
            }
        }
    }
    check.finish(1, "pi-laws", started, 10)
}

/// 2. Breadth through (n+1)-subsets equals the definitional breadth; the
///    diamond reports its textbook values.
pub fn criterion_02_breadth_equivalence() -> CriterionOutcome {
    let started = Instant::now();
    let mut check = Check::new();
    let mut rng = substream(SUITE_SEED, "c2-breadth");
    for _ in 0..200 {
        let p = gen::random_join_semilattice(&mut rng, 9);
        check.case();
        let fast = p.breadth().unwrap();
        let oracle = p.breadth_by_definition().unwrap();
        check.expect(fast == oracle, || {
            format!("breadth {fast} != definitional {oracle} on {} elements", p.len())
        });
    }
    let m3 = FinitePoset::from_covers(
        ["bot", "a0", "a1", "a2", "top"].iter().map(|s| s.to_string()).collect(),
        &[
            ("bot", "a0"),
            ("bot", "a1"),
            ("bot", "a2"),
            ("a0", "top"),
            ("a1", "top"),
            ("a2", "top"),
        ],
    )
    .unwrap();
    check.case();
    check.expect(m3.breadth().unwrap() == 2, || "diamond breadth".into());
    check.expect(m3.is_n_ladder(3).passed(), || "diamond 3-ladder".into());
    check.expect(!m3.is_n_ladder(2).passed(), || "diamond 2-ladder".into());
    check.finish(2, "breadth-equivalence", started, 30)
}

fn ladder_degree(p: &FinitePoset) -> usize {
    (0..p.len())
        .map(|x| p.lower_covers(x).len())
        .max()
        .unwrap_or(0)
}

fn extension_corpus(count: usize) -> Vec<(FinitePoset, Bits, usize)> {
    let mut rng = substream(SUITE_SEED, "c3-extension-corpus");
    let mut out = Vec::new();
    while out.len() < count {
        let l = gen::random_lattice(&mut rng, 8);
        let c = gen::random_cofinal_meet_subsemilattice(&mut rng, &l);
        let (c_induced, _) = l.restrict(&c);
        let n = ladder_degree(&l)
            .max(ladder_degree(&c_induced) + 1)
            .max(2);
        out.push((l, c, n));
    }
    out
}

/// 3. Forward direction: the cofinal-copy extension is an n-ladder embedding
///    the input as a proper ideal, with the predecessor sets of the proof.
pub fn criterion_03_extension_forward() -> CriterionOutcome {
    let started = Instant::now();
    let mut check = Check::new();
    for (l, c, n) in extension_corpus(100) {
        check.case();
        match extension::extend_by_cofinal_copy(&l, &c, n) {
            Err(e) => check.expect(false, || format!("extension refused: {e}")),
            Ok((ext, res)) => {
                check.expect(ext.is_n_ladder(n).passed(), || "not an n-ladder".into());
                check.expect(
                    ext.is_proper_ideal(&res.embedded_bits(&ext)).passed(),
                    || "input not a proper ideal".into(),
                );
                check.expect(ext.len() == l.len() + c.count(), || "size mismatch".into());
                let in_l = res.embedded_bits(&ext);
                for y in res.new_bits(&ext).iter_ones() {
                    let phi_of =
                        |i: usize| ext.index(ext.id(i).trim_end_matches('\'')).unwrap();
                    let phi_y = phi_of(y);
                    for x in 0..ext.len() {
                        let expected = if in_l.get(x) {
                            ext.leq(x, phi_y)
                        } else {
                            ext.lt(phi_of(x), phi_y)
                        };
                        check.expect(ext.lt(x, y) == expected, || {
                            format!("predecessor formula at ({}, {})", ext.id(x), ext.id(y))
                        });
                    }
                }
            }
        }
    }
    check.finish(3, "extension-forward", started, 30)
}

/// 4. Reverse direction on the same corpus, round-tripped: every outside
///    point induces a cofinal meet-subsemilattice with the reduced cover bound.
pub fn criterion_04_extension_reverse() -> CriterionOutcome {
    let started = Instant::now();
    let mut check = Check::new();
    for (l, c, n) in extension_corpus(100) {
        let Ok((ext, res)) = extension::extend_by_cofinal_copy(&l, &c, n) else {
            check.case();
            check.expect(false, || "corpus entry failed to extend".into());
            continue;
        };
        let lbits = res.embedded_bits(&ext);
        for b in res.new_bits(&ext).iter_ones() {
            check.case();
            match extension::induced_cofinal_subsemilattice(&ext, &lbits, b, n) {
                Err(e) => check.expect(false, || format!("induced refused: {e}")),
                Ok(induced) => {
                    let (lp, old) = ext.restrict(&lbits);
                    let c_in_l = Bits::from_indices(
                        lp.len(),
                        old.iter()
                            .enumerate()
                            .filter(|&(_, &o)| induced.get(o))
                            .map(|(new, _)| new),
                    );
                    check.expect(lp.is_cofinal(&c_in_l).passed(), || "not cofinal".into());
                    check.expect(
                        lp.is_meet_subsemilattice(&c_in_l).passed(),
                        || "not meet-closed".into(),
                    );
                    let (cp, _) = lp.restrict(&c_in_l);
                    check.expect(ladder_degree(&cp) < n, || {
                        format!("cover bound {} exceeds {}", ladder_degree(&cp), n - 1)
                    });
                }
            }
        }
    }
    check.finish(4, "extension-reverse", started, 30)
}

fn random_passing_tables(count: usize, label: &str) -> Vec<RhoTable> {
    let mut rng = substream(SUITE_SEED, label);
    let mut out = Vec::new();
    while out.len() < count {
        use rand::Rng;
        let levels = rng.random_range(2..=4u32);
        let window = rng.random_range(2..=4u32);
        let f: Vec<Vec<u32>> = (0..levels)
            .map(|_| gen::random_nondecreasing(&mut rng, window as usize, 3))
            .collect();
        let t = rho::build_rho(levels, window, &f, &rho::BuildChoices::default()).unwrap();
        debug_assert!(t.check_axioms().passed());
        out.push(t);
    }
    out
}

fn mutations_of(t: &RhoTable) -> Vec<RhoTable> {
    let mut out = Vec::new();
    for b in 1..t.levels() {
        for a in 0..b {
            for k in 0..t.window() {
                let original = t.row(a, b).to_vec();
                let mut bumped = original.clone();
                bumped[k as usize] += 1;
                let mut mutant = t.clone();
                mutant.set_row(a, b, bumped);
                out.push(mutant);
                if original[k as usize] > 0 {
                    let mut zeroed = original.clone();
                    zeroed[k as usize] = 0;
                    let mut mutant = t.clone();
                    mutant.set_row(a, b, zeroed);
                    out.push(mutant);
                }
            }
        }
    }
    out
}

fn equivalence_holds(t: &RhoTable, check: &mut Check) {
    check.case();
    let axioms = t.check_axioms().passed();
    let kbox = t.equivalence_box();
    let semilattice = t
        .box_interior_is_join_semilattice(&kbox)
        .expect("box fits the table");
    check.expect(axioms == semilattice, || {
        format!(
            "axioms {} but box semilattice {} (levels {}, window {})",
            axioms,
            semilattice,
            t.levels(),
            t.window()
        )
    });
}

/// 5. The axioms hold exactly when the box-safe interior is a
///    join-semilattice, over random tables and single-entry mutations of
///    passing ones.
pub fn criterion_05_axiom_equivalence() -> CriterionOutcome {
    let started = Instant::now();
    let mut check = Check::new();
    let mut rng = substream(SUITE_SEED, "c5-tables");
    for _ in 0..300 {
        use rand::Rng;
        let levels = rng.random_range(2..=4u32);
        let window = rng.random_range(2..=4u32);
        let max_value = rng.random_range(0..=5u32);
        let t = RhoTable::random(&mut rng, levels, window, max_value);
        equivalence_holds(&t, &mut check);
    }
    for t in random_passing_tables(20, "c5-passing") {
        equivalence_holds(&t, &mut check);
        for mutant in mutations_of(&t) {
            equivalence_holds(&mutant, &mut check);
        }
    }
    check.finish(5, "axiom-equivalence", started, 60)
}

/// 6. Closed-form join and projection agree with the brute-force box oracles
///    on every in-box pair and point, for the axiom-passing corpus.
pub fn criterion_06_closed_forms() -> CriterionOutcome {
    let started = Instant::now();
    let mut check = Check::new();
    for t in random_passing_tables(25, "c6-tables") {
        let kbox = t.equivalence_box();
        let (p, points) = t.materialize(&kbox).unwrap();
        for (i, &x) in points.iter().enumerate() {
            for &y in points.iter().skip(i) {
                let closed = t.join(x, y).unwrap();
                if !kbox.contains(closed) {
                    continue;
                }
                check.case();
                let brute = rho::brute_force_join(&p, &points, x, y);
                check.expect(brute == Some(closed), || {
                    format!("join mismatch at ({x}, {y}): closed {closed}, brute {brute:?}")
                });
            }
            for level in 0..=t.levels() {
                check.case();
                let closed = t.pi(level, x).unwrap();
                let brute = rho::brute_force_pi(&p, &points, level, x);
                check.expect(brute == Some(closed), || {
                    format!("pi mismatch at level {level}, point {x}")
                });
            }
        }
    }
    check.finish(6, "closed-forms", started, 60)
}

/// 7. The inductive builder always satisfies the axioms and dominates its
///    input family pointwise on the window.
pub fn criterion_07_builder() -> CriterionOutcome {
    let started = Instant::now();
    let mut check = Check::new();
    let mut rng = substream(SUITE_SEED, "c7-builder");
    for _ in 0..50 {
        use rand::Rng;
        let levels = rng.random_range(2..=6u32);
        let window = rng.random_range(2..=4u32);
        let f: Vec<Vec<u32>> = (0..levels)
            .map(|_| gen::random_nondecreasing(&mut rng, window as usize, 6))
            .collect();
        check.case();
        let t = rho::build_rho(levels, window, &f, &rho::BuildChoices::default()).unwrap();
        check.expect(t.check_axioms().passed(), || "axioms fail".into());
        for delta in 1..levels {
            for k in 0..window {
                check.expect(
                    f[delta as usize][k as usize] <= t.rho(0, delta, k),
                    || format!("family row {delta} not dominated at {k}"),
                );
            }
        }
    }
    check.finish(7, "builder", started, 60)
}

/// 8. The non-maximality witness passes whenever the threshold function
///    pointwise-majorizes every zero-row on the window.
pub fn criterion_08_nonmax_witness() -> CriterionOutcome {
    let started = Instant::now();
    let mut check = Check::new();
    let mut rng = substream(SUITE_SEED, "c8-witness");
    let tables = random_passing_tables(50, "c8-tables");
    for t in tables {
        use rand::Rng;
        check.case();
        let window = t.window();
        let mut f: Vec<u32> = (0..window)
            .map(|k| (0..t.levels()).map(|a| if a == 0 { 0 } else { t.rho(0, a, k) }).max().unwrap())
            .collect();
        let mut bump = 0;
        for v in f.iter_mut() {
            bump += rng.random_range(0..=1u32);
            *v += bump;
        }
        let mmax = f.iter().max().unwrap() + 2;
        let kbox = KBox::new(t.levels(), window, mmax);
        match rho::nonmax_witness(&t, &f, &kbox) {
            Err(e) => check.expect(false, || format!("witness refused: {e}")),
            Ok(rep) => check.expect(rep.passed(), || format!("witness fails: {rep}")),
        }
    }
    check.finish(8, "nonmax-witness", started, 60)
}

/// 9. The breadth-3 marker triple never collapses on a passing table.
pub fn criterion_09_breadth_marker() -> CriterionOutcome {
    let started = Instant::now();
    let mut check = Check::new();
    for t in random_passing_tables(50, "c9-tables") {
        if t.levels() < 2 || t.window() < 2 {
            continue;
        }
        check.case();
        match rho::breadth3_marker(&t) {
            Err(e) => check.expect(false, || format!("marker refused: {e}")),
            Ok(rep) => check.expect(rep.passed(), || format!("marker fails: {rep}")),
        }
    }
    check.finish(9, "breadth-3-marker", started, 60)
}

/// 10. The pinned three-stage club build passes every stage property, the
///     ladder bound, and exhaustive breadth-2 on the box.
pub fn criterion_10_club_build() -> CriterionOutcome {
    let started = Instant::now();
    let mut check = Check::new();
    check.case();
    match club::build(&[4, 4, 4], None, SUITE_SEED, None) {
        Err(e) => check.expect(false, || format!("build failed: {e}")),
        Ok(state) => {
            check.expect(state.poset().len() <= 60, || {
                format!("box has {} elements", state.poset().len())
            });
            let props = state.check_stage_properties();
            check.expect(props.passed(), || format!("stage properties: {props}"));
            let breadth = state.check_breadth2();
            check.expect(breadth.passed(), || format!("breadth-2: {breadth}"));
            check.expect(
                state.poset().is_n_ladder_box(3).passed(),
                || "3-ladder bound".into(),
            );
        }
    }
    check.finish(10, "club-build", started, 60)
}

/// 11. The three-successor-stage diamond build passes the windowed
///     properties, the cover profile, every label-set check, and every branch
///     union check.
pub fn criterion_11_diamond_build() -> CriterionOutcome {
    let started = Instant::now();
    let mut check = Check::new();
    check.case();
    match crate::diamond::build(3, 8) {
        Err(e) => check.expect(false, || format!("build failed: {e}")),
        Ok(state) => {
            let props = state.check_properties();
            check.expect(props.passed(), || format!("properties: {props}"));
            let profile = state.lower_cover_profile();
            check.expect(profile.passed(), || format!("cover profile: {profile}"));
            check.expect(
                state.poset().is_n_ladder_box(3).passed(),
                || "3-ladder bound".into(),
            );
            for node in state.nodes() {
                check.case();
                let rep = state.gamma_ladder_check(node);
                check.expect(rep.passed(), || format!("node {node}: {rep}"));
            }
            for leaf in state.leaves() {
                check.case();
                let rep = state.branch_check(leaf);
                check.expect(rep.passed(), || format!("leaf {leaf}: {rep}"));
            }
        }
    }
    check.finish(11, "diamond-build", started, 60)
}

/// 12. Validated toy families: block partition, candidate-set monotonicity
///     under strengthening, meet-closure and the cover bound of unions, and the
///     density postcondition.
pub fn criterion_12_cohen_families() -> CriterionOutcome {
    let started = Instant::now();
    let mut check = Check::new();
    let mut rng = substream(SUITE_SEED, "c12-families");
    for idx in 0..30 {
        use rand::Rng;
        let depth = 1 + idx % 2;
        let fam = cohen::random_toy_family(&mut rng, depth, 10);
        check.case();
        check.expect(fam.validate().passed(), || "family invalid".into());
        // block partition
        let mut seen = Bits::new(fam.base().len());
        let mut disjoint = true;
        for leaf in fam.leaves() {
            let b = fam.block(&leaf);
            if !b.and(&seen).is_empty() {
                disjoint = false;
            }
            seen.or_assign(&b);
        }
        check.expect(disjoint, || "blocks overlap".into());
        check.expect(seen.count() == fam.base().len(), || "blocks miss".into());
        // density chain with growing candidate sets
        let mut cond = cohen::Condition::empty();
        let mut prev = Bits::new(fam.base().len());
        let mut conds = Vec::new();
        for _ in 0..3 {
            let x = rng.random_range(0..fam.base().len());
            let (q, y) = cohen::density_extend(&fam, &cond, x).unwrap();
            let c = cohen::c_of(&fam, &q).unwrap();
            check.expect(c.get(y), || "density element missing".into());
            check.expect(fam.base().leq(x, y), || "density not above input".into());
            check.expect(prev.subset_of(&c), || "candidate set shrank".into());
            check.expect(q.extends(&cond), || "condition not stronger".into());
            prev = c;
            cond = q.clone();
            conds.push(q);
        }
        match cohen::filter_union_checks(&fam, &conds) {
            Err(e) => check.expect(false, || format!("filter checks refused: {e}")),
            Ok(rep) => check.expect(rep.passed(), || format!("filter checks: {rep}")),
        }
    }
    check.finish(12, "cohen-families", started, 30)
}

pub fn run_all() -> Vec<CriterionOutcome> {
    vec![
        criterion_01_pi_laws(),
        criterion_02_breadth_equivalence(),
        criterion_03_extension_forward(),
        criterion_04_extension_reverse(),
        criterion_05_axiom_equivalence(),
        criterion_06_closed_forms(),
        criterion_07_builder(),
        criterion_08_nonmax_witness(),
        criterion_09_breadth_marker(),
        criterion_10_club_build(),
        criterion_11_diamond_build(),
        criterion_12_cohen_families(),
    ]
}
