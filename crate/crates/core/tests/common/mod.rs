//! Random instances shared by the property and acceptance suites.
#![allow(dead_code)]

use std::sync::Arc;

use dax_kernel::pairing::{PairingTable, SphereClass};
use dax_kernel::trace::{HomotopyTrace, KnotRecord};
use dax_kernel::{parse_group_spec, DaxContext, GroupSpec, Mode, RingElem, SpecRef, Word};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

/// One representative per group class, plus products.
pub const GROUPS: &[&str] = &[
    "1",
    "F<x>",
    "F<x,y>",
    "Z<t>",
    "Z<a,b>",
    "Z/5<u>",
    "Z/4<u>",
    "Z<t> x Z/3<u>",
    "F<x,y> x Z<t>",
];

pub fn spec(text: &str) -> SpecRef {
    Arc::new(parse_group_spec(text).unwrap())
}

pub fn random_spec<R: Rng>(rng: &mut R) -> SpecRef {
    spec(GROUPS.choose(rng).unwrap())
}

pub fn random_nontrivial_spec<R: Rng>(rng: &mut R) -> SpecRef {
    spec(GROUPS[1..].choose(rng).unwrap())
}

pub fn random_word<R: Rng>(rng: &mut R, g: &SpecRef, max_letters: usize) -> Word {
    let n = g.num_generators();
    let mut w = Word::identity(g);
    if n == 0 {
        return w;
    }
    for _ in 0..rng.gen_range(0..=max_letters) {
        let x = Word::generator_at(g, rng.gen_range(0..n));
        let x = if rng.gen_bool(0.5) { x } else { x.inv() };
        w = w.mul(&x).unwrap();
    }
    w
}

pub fn random_ring<R: Rng>(rng: &mut R, g: &SpecRef, max_terms: usize, max_letters: usize) -> RingElem {
    let mut r = RingElem::zero(g);
    for _ in 0..rng.gen_range(0..=max_terms) {
        let c = rng.gen_range(-3i64..=3);
        r = &r + &RingElem::monomial(&random_word(rng, g, max_letters), BigInt::from(c));
    }
    r
}

/// Generator rows forming a crossed homomorphism: `m (1 - x̄)` always
/// works; groups presented without relators also take arbitrary rows.
pub fn random_rows<R: Rng>(rng: &mut R, g: &SpecRef) -> Vec<RingElem> {
    let m = random_ring(rng, g, 3, 2);
    let one = RingElem::one(g);
    let free = matches!(&**g, GroupSpec::Free(_)) || (g.num_generators() == 1 && !matches!(&**g, GroupSpec::FiniteCyclic { .. }));
    (0..g.num_generators())
        .map(|i| {
            let x = Word::generator_at(g, i);
            let principal = &m * &(&one - &RingElem::from_word(&x.inv()));
            if free {
                &principal + &random_ring(rng, g, 2, 2)
            } else {
                principal
            }
        })
        .collect()
}

pub fn random_class<R: Rng>(rng: &mut R, g: &SpecRef, name: &str, embedded: bool) -> SphereClass {
    let base = if embedded { RingElem::zero(g) } else { random_ring(rng, g, 3, 2).bar_reduce() };
    SphereClass::new(name, embedded, true, base, random_ring(rng, g, 3, 2), random_rows(rng, g)).unwrap()
}

pub fn random_arcs_ctx<R: Rng>(rng: &mut R, g: &SpecRef, embedded: bool) -> (DaxContext, SphereClass) {
    let d = rng.gen_range(3..=7);
    let a = random_class(rng, g, "a", embedded);
    let u = random_word(rng, g, 2);
    (DaxContext::arcs(PairingTable::new(d, vec![a.clone()], u).unwrap()), a)
}

/// Circle scene data with the boundary class `Φ` in the table.
pub fn phi_ctx(g: &SpecRef, d: u32, s: &Word) -> (DaxContext, SphereClass) {
    let phi = dax_kernel::scene::boundary_class(g, s);
    let table = PairingTable::new(d, vec![phi.clone()], s.clone()).unwrap();
    (DaxContext::new(table, Mode::Circles, s.clone()).unwrap(), phi)
}

pub fn random_trace<R: Rng>(rng: &mut R, g: &SpecRef, max_events: usize, max_letters: usize) -> HomotopyTrace {
    let events = (0..rng.gen_range(0..=max_events))
        .map(|_| (if rng.gen_bool(0.5) { 1 } else { -1 }, random_word(rng, g, max_letters)))
        .collect();
    HomotopyTrace::new(g, events).unwrap()
}

pub fn knot(name: impl Into<String>, trace: HomotopyTrace) -> KnotRecord {
    KnotRecord { name: name.into(), trace }
}

/// `(-1)^(d-1)`.
pub fn eps(d: u32) -> i64 {
    if d % 2 == 0 {
        -1
    } else {
        1
    }
}

pub fn t_pow(z: &SpecRef, k: i64) -> Word {
    Word::generator_at(z, 0).pow(&BigInt::from(k))
}
