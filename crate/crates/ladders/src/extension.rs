//! Both constructive directions of the maximality characterization: extend an
//! n-ladder along a cofinal meet-subsemilattice that is an (n-1)-ladder, and
//! recover such a subsemilattice from any proper-ideal embedding.

use crate::bits::Bits;
use crate::poset::{FinitePoset, IdealSet};
use crate::report::Report;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum ExtensionError {
    #[error("precondition violated: {hypothesis}\n{report}")]
    Precondition { hypothesis: String, report: Report },
}

fn require(hypothesis: &str, report: Report) -> Result<(), ExtensionError> {
    if report.passed() {
        Ok(())
    } else {
        Err(ExtensionError::Precondition {
            hypothesis: hypothesis.to_string(),
            report,
        })
    }
}

/// Output of `extend_by_cofinal_copy`: the larger poset, the image of the
/// original lattice (a proper ideal of it), and the freshly added copy.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtensionResult {
    pub extended_elements: Vec<String>,
    pub embedded_ideal: Vec<String>,
    pub new_elements: Vec<String>,
}

impl ExtensionResult {
    pub fn embedded_bits(&self, extended: &FinitePoset) -> Bits {
        Bits::from_indices(
            extended.len(),
            self.embedded_ideal
                .iter()
                .map(|id| extended.index(id).unwrap()),
        )
    }

    pub fn new_bits(&self, extended: &FinitePoset) -> Bits {
        Bits::from_indices(
            extended.len(),
            self.new_elements
                .iter()
                .map(|id| extended.index(id).unwrap()),
        )
    }
}

/// Fresh ids for the copy: the original id plus a repeated prime marker, the
/// marker count chosen once so no collision with existing ids is possible.
/// Stripping the suffix recovers the copied element.
fn copy_suffix(l: &FinitePoset) -> String {
    let mut k = 1;
    loop {
        let suffix = "'".repeat(k);
        if l.ids().iter().all(|id| !id.ends_with(&suffix)) {
            return suffix;
        }
        k += 1;
    }
}

/// Glue a disjoint copy of `c` on top of `l`: inside the copy the order is
/// pulled back along the copy map, and `x <= y'` for `x` in `l` holds exactly
/// when `x <= y`. For valid inputs the result is an n-ladder with `l` as a
/// proper ideal.
pub fn extend_by_cofinal_copy(
    l: &FinitePoset,
    c: &Bits,
    n: usize,
) -> Result<(FinitePoset, ExtensionResult), ExtensionError> {
    if n < 2 {
        return Err(ExtensionError::Precondition {
            hypothesis: "ladder parameter must be at least 2 (no 1-ladder has a 0-ladder inside)"
                .to_string(),
            report: Report::fail("n-too-small", vec![n.to_string()]),
        });
    }
    require("input is an n-ladder", l.is_n_ladder(n))?;
    require("subset is cofinal", l.is_cofinal(c))?;
    require(
        "subset is a meet-subsemilattice",
        l.is_meet_subsemilattice(c),
    )?;
    let (c_induced, _) = l.restrict(c);
    require(
        "subset is an (n-1)-ladder in the induced order",
        c_induced.is_n_ladder(n - 1),
    )?;

    let suffix = copy_suffix(l);
    let c_members: Vec<usize> = c.iter_ones().collect();
    let n_l = l.len();
    let mut ids: Vec<String> = l.ids().to_vec();
    let new_ids: Vec<String> = c_members
        .iter()
        .map(|&i| format!("{}{}", l.id(i), suffix))
        .collect();
    ids.extend(new_ids.iter().cloned());

    // index < n_l: element of l; otherwise the copy of c_members[index - n_l]
    let phi = |i: usize| c_members[i - n_l];
    let extended = FinitePoset::from_leq_fn(ids, |a, b| match (a < n_l, b < n_l) {
        (true, true) => l.leq(a, b),
        (true, false) => l.leq(a, phi(b)),
        (false, true) => false,
        (false, false) => l.leq(phi(a), phi(b)),
    });

    let result = ExtensionResult {
        extended_elements: extended.ids().to_vec(),
        embedded_ideal: l.ids().to_vec(),
        new_elements: new_ids,
    };
    Ok((extended, result))
}

/// From an n-ladder `k` with proper ideal `l` and a point `b` outside it,
/// project the up-set of `b` into `l`: the image is a cofinal
/// meet-subsemilattice of `l`, and its members have at most n-1 lower covers
/// in the induced order.
pub fn induced_cofinal_subsemilattice(
    k: &FinitePoset,
    l: &Bits,
    b: usize,
    n: usize,
) -> Result<Bits, ExtensionError> {
    require("ambient poset is an n-ladder", k.is_n_ladder(n))?;
    require("subset is a proper ideal", k.is_proper_ideal(l))?;
    if l.get(b) {
        return Err(ExtensionError::Precondition {
            hypothesis: "base point must lie outside the ideal".to_string(),
            report: Report::fail("point-inside-ideal", vec![k.id(b).to_string()]),
        });
    }
    let ideal = IdealSet::from_unchecked(l.clone());
    let mut c = Bits::new(k.len());
    for x in k.up_row(b).iter_ones() {
        let p = k.pi(&ideal, x).expect("lattice with least element");
        c.set(p);
    }
    Ok(c)
}

/// Search for a cofinal meet-subsemilattice of `l` that is an (n-1)-ladder,
/// in increasing subset size with lexicographic id tie-break, stopping at the
/// first witness. For finite lattices and n >= 2 the singleton top works, so
/// this passes; n = 1 asks for a 0-ladder, which has no instances.
pub fn finite_nonmaximality_check(l: &FinitePoset, n: usize) -> Report {
    assert!(n >= 1, "ladder parameter must be positive");
    assert!(
        l.len() <= 20,
        "exhaustive subset search is exponential; 20 elements max"
    );
    if n == 1 {
        let mut rep = Report::fail("no-candidate", vec![]);
        rep.note("a 0-ladder would be required, and there are none");
        return rep;
    }
    // positions sorted by id for the deterministic tie-break
    let mut order: Vec<usize> = (0..l.len()).collect();
    order.sort_by(|&a, &b| l.id(a).cmp(l.id(b)));

    for size in 1..=l.len() {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            let subset = Bits::from_indices(l.len(), comb.iter().map(|&i| order[i]));
            if l.is_cofinal(&subset).passed() && l.is_meet_subsemilattice(&subset).passed() {
                let (induced, _) = l.restrict(&subset);
                if induced.is_n_ladder(n - 1).passed() {
                    let mut rep = Report::pass();
                    let mut ids: Vec<String> = subset.iter_ones().map(|i| l.id(i).into()).collect();
                    ids.sort();
                    rep.note(format!("witness subset: {{{}}}", ids.join(", ")));
                    rep.witnesses.push(crate::report::Witness {
                        claim: "cofinal-meet-subsemilattice-ladder-witness".to_string(),
                        elements: ids,
                    });
                    return rep;
                }
            }
            // next combination of `size` positions out of l.len()
            let mut i = size;
            let done = loop {
                if i == 0 {
                    break true;
                }
                i -= 1;
                if comb[i] != i + l.len() - size {
                    break false;
                }
                if i == 0 {
                    break true;
                }
            };
            if done {
                break;
            }
            comb[i] += 1;
            for j in i + 1..size {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    Report::fail("no-cofinal-meet-subsemilattice-found", vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::fixtures::*;

    fn bits_of(p: &FinitePoset, ids: &[&str]) -> Bits {
        Bits::from_indices(p.len(), ids.iter().map(|s| p.index(s).unwrap()))
    }

    #[test]
    fn singleton_extends_to_two_chain() {
        let l = antichain(1);
        let c = bits_of(&l, &["x0"]);
        let (ext, res) = extend_by_cofinal_copy(&l, &c, 2).unwrap();
        assert_eq!(ext.len(), 2);
        assert!(ext.is_n_ladder(2).passed());
        assert_eq!(res.new_elements, vec!["x0'".to_string()]);
        assert!(ext
            .leq(ext.index("x0").unwrap(), ext.index("x0'").unwrap()));
    }

    #[test]
    fn m3_top_extension() {
        let l = m3();
        let c = bits_of(&l, &["top"]);
        let (ext, res) = extend_by_cofinal_copy(&l, &c, 3).unwrap();
        assert_eq!(ext.len(), 6);
        assert!(ext.is_n_ladder(3).passed());
        // the old m3 is a proper ideal of the extension
        assert!(ext.is_proper_ideal(&res.embedded_bits(&ext)).passed());
        // the new top has exactly one lower cover: the old top
        let new_top = ext.index("top'").unwrap();
        let covers = ext.lower_covers(new_top);
        assert_eq!(covers.len(), 1);
        assert_eq!(ext.id(covers[0]), "top");
        // output size is |l| + |c| exactly
        assert_eq!(ext.len(), l.len() + c.count());
    }

    #[test]
    fn chain_extension_is_chain() {
        let l = chain(4);
        let c = bits_of(&l, &["c3"]);
        let (ext, _) = extend_by_cofinal_copy(&l, &c, 2).unwrap();
        assert_eq!(ext.len(), 5);
        assert!(ext.is_n_ladder(1).passed(), "still a chain");
    }

    #[test]
    fn precondition_violations_are_reported() {
        let l = m3();
        let atoms = bits_of(&l, &["a0", "a1"]);
        let err = extend_by_cofinal_copy(&l, &atoms, 3).unwrap_err();
        let ExtensionError::Precondition { hypothesis, .. } = err;
        assert!(hypothesis.contains("cofinal") || hypothesis.contains("meet"));
    }

    #[test]
    fn induced_from_two_chain() {
        let k = chain(2);
        let l = bits_of(&k, &["c0"]);
        let b = k.index("c1").unwrap();
        let c = induced_cofinal_subsemilattice(&k, &l, b, 1).unwrap();
        assert_eq!(c, bits_of(&k, &["c0"]));
    }

    #[test]
    fn induced_on_grid_rows() {
        // 3x2 grid, bottom row as the ideal, top-right as the outside point
        let k = grid(3, 2);
        let l = bits_of(&k, &["g0_0", "g1_0", "g2_0"]);
        assert!(k.is_proper_ideal(&l).passed());
        let b = k.index("g2_1").unwrap();
        let c = induced_cofinal_subsemilattice(&k, &l, b, 2).unwrap();
        assert_eq!(c, bits_of(&k, &["g2_0"]), "column maximum below the point");
    }

    #[test]
    fn round_trip_through_both_operations() {
        let l = m3();
        let c = bits_of(&l, &["top"]);
        let n = 3;
        let (ext, res) = extend_by_cofinal_copy(&l, &c, n).unwrap();
        let lbits = res.embedded_bits(&ext);
        for b in res.new_bits(&ext).iter_ones() {
            let induced = induced_cofinal_subsemilattice(&ext, &lbits, b, n).unwrap();
            // restrict to the l-part and check the characterization properties
            let (lp, old) = ext.restrict(&lbits);
            let c_in_l = Bits::from_indices(
                lp.len(),
                induced
                    .iter_ones()
                    .map(|i| old.iter().position(|&o| o == i).unwrap()),
            );
            assert!(lp.is_cofinal(&c_in_l).passed());
            assert!(lp.is_meet_subsemilattice(&c_in_l).passed());
            let (cp, _) = lp.restrict(&c_in_l);
            assert!(cp.is_n_ladder(n - 1).passed());
        }
    }

    #[test]
    fn predecessor_sets_match_the_construction() {
        let l = m3();
        let c = bits_of(&l, &["a0", "top"]);
        // {a0, top} is meet-closed (a0 ^ top = a0), cofinal, and a chain
        let (ext, res) = extend_by_cofinal_copy(&l, &c, 3).unwrap();
        let in_l = res.embedded_bits(&ext);
        // strict lower set of each copy element y: the l-part below phi(y)
        // plus the copies of elements strictly below phi(y)
        for y in res.new_bits(&ext).iter_ones() {
            let phi_of = |i: usize| ext.index(ext.id(i).trim_end_matches('\'')).unwrap();
            let phi_y = phi_of(y);
            for x in 0..ext.len() {
                let expected = if in_l.get(x) {
                    ext.leq(x, phi_y)
                } else {
                    ext.lt(phi_of(x), phi_y)
                };
                assert_eq!(ext.lt(x, y), expected);
            }
        }
    }

    #[test]
    fn nonmaximality_check_cases() {
        let rep = finite_nonmaximality_check(&m3(), 3);
        assert!(rep.passed());
        assert_eq!(
            rep.witnesses[0].elements,
            vec!["top".to_string()],
            "singleton top is the first witness"
        );
        assert!(finite_nonmaximality_check(&chain(3), 2).passed());
        assert!(!finite_nonmaximality_check(&chain(3), 1).passed());
    }
}
