//! Seeded generators for random finite structures. All randomness flows from
//! one master seed; per-module substreams are derived by labeled splitting so
//! runs are reproducible across module boundaries.

use crate::bits::Bits;
use crate::poset::FinitePoset;
use rand::prelude::IndexedRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a, fixed here so substream derivation is stable across platforms.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Derive the RNG for a labeled substream of `seed`.
pub fn substream(seed: u64, label: &str) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv1a(label.as_bytes()).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Random finite lattice with at most `max_elems` elements (and at least 2).
///
/// Drawn as an intersection-closed family of subsets of a small universe,
/// together with the universe itself: a finite meet-semilattice with a top,
/// hence a lattice. Every finite lattice arises this way, so the sample is
/// not confined to distributive ones (the three singletons inside a 3-set
/// close to M3, for instance).
pub fn random_lattice(rng: &mut ChaCha8Rng, max_elems: usize) -> FinitePoset {
    assert!(max_elems >= 2);
    loop {
        let universe = rng.random_range(2..=5usize);
        let full: u32 = (1 << universe) - 1;
        let n_gen = rng.random_range(1..=4usize);
        let mut family: Vec<u32> = vec![full];
        for _ in 0..n_gen {
            let s = rng.random_range(0..=full);
            if !family.contains(&s) {
                family.push(s);
            }
        }
        // close under intersection
        loop {
            let mut added = false;
            let snapshot = family.clone();
            for i in 0..snapshot.len() {
                for j in i + 1..snapshot.len() {
                    let cap = snapshot[i] & snapshot[j];
                    if !family.contains(&cap) {
                        family.push(cap);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        if family.len() > max_elems {
            continue;
        }
        family.sort();
        let ids: Vec<String> = (0..family.len()).map(|i| format!("e{i}")).collect();
        let p = FinitePoset::from_leq_fn(ids, |a, b| family[a] & family[b] == family[a]);
        debug_assert!(p.validate().passed() && p.is_lattice().passed());
        return p;
    }
}

/// Random finite join-semilattice with at most `max_elems` elements, drawn as
/// a union-closed family of subsets (ordered by inclusion).
pub fn random_join_semilattice(rng: &mut ChaCha8Rng, max_elems: usize) -> FinitePoset {
    assert!(max_elems >= 1);
    loop {
        let universe = rng.random_range(2..=5usize);
        let full: u32 = (1 << universe) - 1;
        let n_gen = rng.random_range(1..=5usize);
        let mut family: Vec<u32> = Vec::new();
        for _ in 0..n_gen {
            let s = rng.random_range(0..=full);
            if !family.contains(&s) {
                family.push(s);
            }
        }
        loop {
            let mut added = false;
            let snapshot = family.clone();
            for i in 0..snapshot.len() {
                for j in i + 1..snapshot.len() {
                    let cup = snapshot[i] | snapshot[j];
                    if !family.contains(&cup) {
                        family.push(cup);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        if family.is_empty() || family.len() > max_elems {
            continue;
        }
        family.sort();
        let ids: Vec<String> = (0..family.len()).map(|i| format!("e{i}")).collect();
        let p = FinitePoset::from_leq_fn(ids, |a, b| family[a] & family[b] == family[a]);
        debug_assert!(p.is_join_semilattice().passed());
        return p;
    }
}

/// Random meet-closed subset containing the top of a finite lattice `p`.
/// Such a subset is always cofinal (the top dominates everything).
pub fn random_cofinal_meet_subsemilattice(rng: &mut ChaCha8Rng, p: &FinitePoset) -> Bits {
    let top = p
        .maximal_elements()
        .into_iter()
        .next()
        .expect("nonempty lattice has a top");
    let mut c = Bits::new(p.len());
    c.set(top);
    for x in 0..p.len() {
        if rng.random_bool(0.4) {
            c.set(x);
        }
    }
    // close under meets
    loop {
        let mut added = false;
        let members: Vec<usize> = c.iter_ones().collect();
        for &a in &members {
            for &b in &members {
                if let Some(m) = p.meet(a, b) {
                    if !c.get(m) {
                        c.set(m);
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    c
}

/// Non-decreasing array of `len` values bounded by `max_value`.
pub fn random_nondecreasing(rng: &mut ChaCha8Rng, len: usize, max_value: u32) -> Vec<u32> {
    let mut v: Vec<u32> = (0..len).map(|_| rng.random_range(0..=max_value)).collect();
    for i in 1..len {
        v[i] = v[i].max(v[i - 1]);
    }
    v
}

pub fn choose<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("nonempty")
}
