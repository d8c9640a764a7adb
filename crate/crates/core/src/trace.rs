//! Dax values of knots given by homotopy traces, the μ₂ fold, and the
//! type-≤1 universality solver.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{same_spec, SpecRef, Word};
use crate::quotient::{centralizer_orbit_reduce, RelationSet, Whisker};
use crate::ring::RingElem;
use crate::snf::{Infeasibility, Smith};

/// Signed double-point loops of a generic homotopy, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomotopyTrace {
    spec: SpecRef,
    events: Vec<(i8, Word)>,
}

impl HomotopyTrace {
    pub fn new(spec: &SpecRef, events: Vec<(i8, Word)>) -> Result<Self> {
        for (sign, w) in &events {
            if *sign != 1 && *sign != -1 {
                return Err(Error::Scene(format!("event sign must be +1 or -1, got {sign}")));
            }
            if !same_spec(spec, w.spec()) {
                return Err(Error::SpecMismatch);
            }
        }
        Ok(HomotopyTrace {
            spec: spec.clone(),
            events,
        })
    }

    pub fn empty(spec: &SpecRef) -> Self {
        HomotopyTrace {
            spec: spec.clone(),
            events: Vec::new(),
        }
    }

    /// Events written as `("+", "t^2*s^-1")`.
    pub fn parse<S: AsRef<str>>(spec: &SpecRef, events: &[(S, S)]) -> Result<Self> {
        let events = events
            .iter()
            .map(|(sign, loop_)| {
                let sign = match sign.as_ref().trim() {
                    "+" | "+1" => 1,
                    "-" | "-1" => -1,
                    other => return Err(Error::Scene(format!("bad event sign `{other}`"))),
                };
                Ok((sign, Word::parse(spec, loop_.as_ref())?))
            })
            .collect::<Result<Vec<_>>>()?;
        HomotopyTrace::new(spec, events)
    }

    pub fn spec(&self) -> &SpecRef {
        &self.spec
    }

    pub fn events(&self) -> &[(i8, Word)] {
        &self.events
    }

    pub fn concat(&self, other: &HomotopyTrace) -> Result<HomotopyTrace> {
        if !same_spec(&self.spec, &other.spec) {
            return Err(Error::SpecMismatch);
        }
        let mut events = self.events.clone();
        events.extend(other.events.iter().cloned());
        Ok(HomotopyTrace {
            spec: self.spec.clone(),
            events,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnotRecord {
    pub name: String,
    pub trace: HomotopyTrace,
}

/// `Σ sign · loop` with identity loops discarded.
pub fn eval_dax_trace(t: &HomotopyTrace) -> RingElem {
    let mut acc = RingElem::zero(&t.spec);
    for (sign, w) in &t.events {
        acc = &acc + &RingElem::monomial(w, BigInt::from(*sign));
    }
    acc.bar_reduce()
}

/// Folds every term onto the smaller of `g` and `ḡ` in term order, keeping
/// its sign.
pub fn mu2_reduce(v: &RingElem) -> RingElem {
    let mut acc = RingElem::zero(v.spec());
    for (g, c) in v.terms() {
        let h = g.inv();
        let rep = if h < g { h } else { g };
        acc = &acc + &RingElem::monomial(&rep, c.clone());
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnotValue {
    pub raw: RingElem,
    pub coordinates: Vec<BigInt>,
    pub representative: RingElem,
    /// Orbit representative under the centralizer action, when requested.
    pub orbit: Option<RingElem>,
}

/// Dax value of a knot modulo `rs`. With `orbit` set, also reduces by the
/// centralizer action.
pub fn dax_of_knot(k: &KnotRecord, rs: &RelationSet, orbit: Option<(&[Word], &Whisker)>) -> Result<KnotValue> {
    let raw = eval_dax_trace(&k.trace);
    let coordinates = rs.coordinates(&raw)?;
    let representative = rs.reduce(&raw)?;
    let orbit = match orbit {
        Some((cent, wh)) => Some(centralizer_orbit_reduce(&raw, rs, cent, wh)?),
        None => None,
    };
    Ok(KnotValue {
        raw,
        coordinates,
        representative,
        orbit,
    })
}

/// `v(K) = offset + Σ_g weights[g] · Dax(K)_g` in the value group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub moduli: Vec<BigInt>,
    pub offset: Vec<BigInt>,
    /// One row per window generator, one entry per value coordinate.
    pub weights: Vec<Vec<BigInt>>,
}

/// A combination of knots (and relations) whose Dax values cancel while
/// their values under `v` do not, in coordinate `coordinate`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfeasibilityWitness {
    pub coordinate: usize,
    pub knot_weights: Vec<(String, BigInt)>,
    pub relation_weights: Vec<BigInt>,
    /// Zero means the identity holds in `Z`.
    pub modulus: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Universality {
    Factors(Factorization),
    NotTypeOne(InfeasibilityWitness),
}

fn reduce_mod(x: &BigInt, m: &BigInt) -> BigInt {
    if m.is_zero() {
        x.clone()
    } else {
        x.mod_floor(m)
    }
}

/// Looks for `w` on the window generators with `v(K) = v(u) + w(Dax(K))`
/// for all knots, `w` vanishing on `rs`. Values live in
/// `⊕ Z/moduli[i]` (a zero modulus means `Z`).
pub fn universality_witness(
    knots: &[KnotRecord],
    values: &[Vec<BigInt>],
    moduli: &[BigInt],
    rs: &RelationSet,
) -> Result<Universality> {
    if values.len() != knots.len() || values.iter().any(|v| v.len() != moduli.len()) {
        return Err(Error::Scene("value table does not match knots and value group".into()));
    }
    let dax: Vec<Vec<BigInt>> = knots
        .par_iter()
        .map(|k| rs.vector(&eval_dax_trace(&k.trace)))
        .collect::<Result<_>>()?;
    let n = rs.generators().len();
    let rel_rows = rs.matrix();
    let eqs = rel_rows.len() + knots.len();

    let mut offset = Vec::new();
    let mut weights = vec![Vec::new(); n];
    for (k, m) in moduli.iter().enumerate() {
        // unknowns: w_1..w_n, c, then one slack per equation when m > 0
        let slack = !m.is_zero();
        let cols = n + 1 + if slack { eqs } else { 0 };
        let mut mat = Vec::with_capacity(eqs);
        let mut rhs = Vec::with_capacity(eqs);
        let row = |base: &[BigInt], c: i32, i: usize| {
            let mut r = base.to_vec();
            r.push(BigInt::from(c));
            if slack {
                r.extend((0..eqs).map(|j| if j == i { m.clone() } else { BigInt::zero() }));
            }
            r
        };
        for (i, rel) in rel_rows.iter().enumerate() {
            mat.push(row(rel, 0, i));
            rhs.push(BigInt::zero());
        }
        for (i, d) in dax.iter().enumerate() {
            mat.push(row(d, 1, rel_rows.len() + i));
            rhs.push(reduce_mod(&values[i][k], m));
        }
        let smith = Smith::compute(&mat, cols);
        match smith.solve(&rhs) {
            Ok(y) => {
                for (j, wj) in weights.iter_mut().enumerate() {
                    wj.push(reduce_mod(&y[j], m));
                }
                offset.push(reduce_mod(&y[n], m));
            }
            Err(Infeasibility { combination, modulus }) => {
                let witness = InfeasibilityWitness {
                    coordinate: k,
                    knot_weights: knots
                        .iter()
                        .zip(&combination[rel_rows.len()..])
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(kn, c)| (kn.name.clone(), c.clone()))
                        .collect(),
                    relation_weights: combination[..rel_rows.len()].to_vec(),
                    modulus,
                };
                debug_assert!(Infeasibility {
                    combination,
                    modulus: witness.modulus.clone()
                }
                .verify(&mat, cols, &rhs));
                return Ok(Universality::NotTypeOne(witness));
            }
        }
    }
    let fact = Factorization {
        moduli: moduli.to_vec(),
        offset,
        weights,
    };
    debug_assert!(dax.iter().zip(values).all(|(d, v)| fact.apply(d) == reduce_all(v, moduli)));
    Ok(Universality::Factors(fact))
}

fn reduce_all(v: &[BigInt], moduli: &[BigInt]) -> Vec<BigInt> {
    v.iter().zip(moduli).map(|(x, m)| reduce_mod(x, m)).collect()
}

impl Factorization {
    /// `offset + w(x)` for a Dax vector `x` over the window generators.
    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut out = self.offset.clone();
        for (xi, wi) in x.iter().zip(&self.weights) {
            for (o, w) in out.iter_mut().zip(wi) {
                *o += xi * w;
            }
        }
        reduce_all(&out, &self.moduli)
    }
}

impl InfeasibilityWitness {
    /// Re-checks the witness from the knot data alone: the weighted Dax
    /// values and knot count vanish modulo `rs`, the weighted values do not.
    pub fn verify(&self, knots: &[KnotRecord], values: &[Vec<BigInt>], rs: &RelationSet) -> Result<bool> {
        let m = &self.modulus;
        let mut dax = vec![BigInt::zero(); rs.generators().len()];
        let mut count = BigInt::zero();
        let mut val = BigInt::zero();
        for (name, c) in &self.knot_weights {
            let i = knots
                .iter()
                .position(|k| &k.name == name)
                .ok_or_else(|| Error::Scene(format!("unknown knot `{name}`")))?;
            for (a, b) in dax.iter_mut().zip(rs.vector(&eval_dax_trace(&knots[i].trace))?) {
                *a += c * b;
            }
            count += c;
            val += c * &values[i][self.coordinate];
        }
        for (rel, c) in rs.matrix().iter().zip(&self.relation_weights) {
            for (a, b) in dax.iter_mut().zip(rel) {
                *a += c * b;
            }
        }
        let zero = |x: &BigInt| reduce_mod(x, m).is_zero();
        Ok(dax.iter().all(zero) && zero(&count) && !zero(&val))
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::group::parse_group_spec;
    use crate::quotient::{concordance_quotient, Provenance};

    fn spec(s: &str) -> SpecRef {
        Arc::new(parse_group_spec(s).unwrap())
    }

    fn r(sp: &SpecRef, s: &str) -> RingElem {
        RingElem::parse(sp, s).unwrap()
    }

    fn trace(sp: &SpecRef, ev: &[(&str, &str)]) -> HomotopyTrace {
        HomotopyTrace::parse(sp, ev).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = spec("F<g,h>");
        assert_eq!(eval_dax_trace(&trace(&f, &[("+", "g")])), r(&f, "g"));
        assert!(eval_dax_trace(&trace(&f, &[("+", "g"), ("-", "g")])).is_zero());
        assert!(eval_dax_trace(&trace(&f, &[("+", "1")])).is_zero());
        assert!(HomotopyTrace::parse(&f, &[("*", "g")]).is_err());
    }

    #[test]
    fn mu2_examples() {
        let z = spec("Z<t>");
        assert_eq!(mu2_reduce(&r(&z, "t^-1")), r(&z, "t"));
        assert!(mu2_reduce(&r(&z, "t^2 - t^-2")).is_zero());
        assert!(mu2_reduce(&RingElem::zero(&z)).is_zero());
    }

    #[test]
    fn knot_examples() {
        let f = spec("F<x,y>");
        let rs = RelationSet::empty(&f, 2);
        let unknot = KnotRecord {
            name: "u".into(),
            trace: HomotopyTrace::empty(&f),
        };
        assert!(dax_of_knot(&unknot, &rs, None).unwrap().coordinates.iter().all(Zero::is_zero));
        let k = KnotRecord {
            name: "k".into(),
            trace: trace(&f, &[("+", "x*y")]),
        };
        let v = dax_of_knot(&k, &rs, None).unwrap();
        assert_eq!(v.representative, r(&f, "x*y"));
        assert!(v.coordinates.iter().any(|c| !c.is_zero()));

        let mut rs = RelationSet::empty(&f, 2);
        rs.push(r(&f, "x - y^-1*x"), Provenance::DaxImage).unwrap();
        let k1 = KnotRecord {
            name: "a".into(),
            trace: trace(&f, &[("+", "y^2")]),
        };
        let k2 = KnotRecord {
            name: "b".into(),
            trace: trace(&f, &[("+", "y^2"), ("+", "x"), ("-", "y^-1*x")]),
        };
        assert_eq!(
            dax_of_knot(&k1, &rs, None).unwrap().coordinates,
            dax_of_knot(&k2, &rs, None).unwrap().coordinates
        );
    }

    #[test]
    fn universality_examples() {
        let z = spec("Z<t>");
        let mut rs = RelationSet::empty(&z, 2);
        rs.push(r(&z, "t + t^-1"), Provenance::DaxImage).unwrap();
        rs.push(r(&z, "2*t^2"), Provenance::DaxImage).unwrap();
        let knots: Vec<KnotRecord> = [vec![], vec![("+", "t")], vec![("-", "t^2")], vec![("+", "t^-1"), ("+", "t^-2")], vec![("+", "t^2"), ("+", "t^-2")]]
            .iter()
            .enumerate()
            .map(|(i, ev)| KnotRecord {
                name: format!("k{i}"),
                trace: trace(&z, ev),
            })
            .collect();
        let moduli = rs.smith().moduli();
        // v = Dax
        let values: Vec<Vec<BigInt>> = knots.iter().map(|k| dax_of_knot(k, &rs, None).unwrap().coordinates).collect();
        match universality_witness(&knots, &values, &moduli, &rs).unwrap() {
            Universality::Factors(f) => {
                assert!(f.offset.iter().all(Zero::is_zero));
                for (g, row) in rs.generators().iter().zip(&f.weights) {
                    assert_eq!(row, &rs.coordinates(&RingElem::from_word(g)).unwrap());
                }
            }
            other => panic!("{other:?}"),
        }
        // v constant
        let values = vec![vec![BigInt::from(7)]; knots.len()];
        match universality_witness(&knots, &values, &[BigInt::zero()], &rs).unwrap() {
            Universality::Factors(f) => {
                assert_eq!(f.offset, vec![BigInt::from(7)]);
                assert!(f.weights.iter().flatten().all(Zero::is_zero));
            }
            other => panic!("{other:?}"),
        }
        // v = mu2 ∘ Dax in the concordance target
        let q = concordance_quotient(&rs);
        let values: Vec<Vec<BigInt>> = knots
            .iter()
            .map(|k| q.coordinates(&mu2_reduce(&eval_dax_trace(&k.trace))).unwrap())
            .collect();
        match universality_witness(&knots, &values, &q.smith().moduli(), &rs).unwrap() {
            Universality::Factors(f) => {
                for (g, row) in rs.generators().iter().zip(&f.weights) {
                    assert_eq!(row, &q.coordinates(&RingElem::from_word(g)).unwrap());
                }
            }
            other => panic!("{other:?}"),
        }
        // planted inconsistency: the empty trace and a trivial trace disagree
        let mut values = vec![vec![BigInt::zero()]; knots.len()];
        values[4] = vec![BigInt::from(1)];
        let twin = KnotRecord {
            name: "twin".into(),
            trace: trace(&z, &[("+", "t^2"), ("-", "t^2")]),
        };
        let mut ks = knots.clone();
        ks.push(twin);
        values.push(vec![BigInt::from(5)]);
        match universality_witness(&ks, &values, &[BigInt::zero()], &rs).unwrap() {
            Universality::NotTypeOne(w) => assert!(w.verify(&ks, &values, &rs).unwrap()),
            other => panic!("{other:?}"),
        }
    }
}
