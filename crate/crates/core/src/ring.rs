//! The integral group ring `Z[G]`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{inv_elem, mul_elems, same_spec, GroupElem, SpecRef, Word};
use crate::syntax::{Cursor, Tok};

/// A finite integer combination of group elements. No zero coefficients are
/// stored, so equality of term maps is equality of ring elements.
#[derive(Clone)]
pub struct RingElem {
    spec: SpecRef,
    terms: BTreeMap<GroupElem, BigInt>,
}

impl PartialEq for RingElem {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && same_spec(&self.spec, &other.spec)
    }
}

impl Eq for RingElem {}

/// Lexicographic on the term-ordered coefficient lists.
impl PartialOrd for RingElem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RingElem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.terms.cmp(&other.terms)
    }
}

impl std::hash::Hash for RingElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElem({self})")
    }
}

impl RingElem {
    pub fn zero(spec: &SpecRef) -> Self {
        RingElem {
            spec: spec.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(spec: &SpecRef) -> Self {
        RingElem::from_word(&Word::identity(spec))
    }

    pub fn from_word(w: &Word) -> Self {
        RingElem::monomial(w, BigInt::one())
    }

    pub fn monomial(w: &Word, coeff: BigInt) -> Self {
        let mut r = RingElem::zero(w.spec());
        if !coeff.is_zero() {
            r.terms.insert(w.elem().clone(), coeff);
        }
        r
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, BigInt)>>(spec: &SpecRef, terms: I) -> Result<Self> {
        let mut r = RingElem::zero(spec);
        for (w, c) in terms {
            if !same_spec(spec, w.spec()) {
                return Err(Error::SpecMismatch);
            }
            r.add_term(w.elem().clone(), c);
        }
        Ok(r)
    }

    pub fn spec(&self) -> &SpecRef {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, g: GroupElem, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(g) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Terms in term order.
    pub fn terms(&self) -> impl Iterator<Item = (Word, &BigInt)> + '_ {
        self.terms
            .iter()
            .map(move |(g, c)| (Word::from_elem(&self.spec, g.clone()), c))
    }

    pub fn coeff(&self, w: &Word) -> BigInt {
        self.terms.get(w.elem()).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> Vec<Word> {
        self.terms().map(|(w, _)| w).collect()
    }

    /// Sum of coefficients.
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }

    fn check(&self, other: &RingElem) -> Result<()> {
        if same_spec(&self.spec, &other.spec) {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    pub fn checked_add(&self, other: &RingElem) -> Result<RingElem> {
        self.check(other)?;
        let mut r = self.clone();
        for (g, c) in &other.terms {
            r.add_term(g.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn checked_sub(&self, other: &RingElem) -> Result<RingElem> {
        self.checked_add(&-other)
    }

    /// Convolution product.
    pub fn checked_mul(&self, other: &RingElem) -> Result<RingElem> {
        self.check(other)?;
        let mut r = RingElem::zero(&self.spec);
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                r.add_term(mul_elems(&self.spec, g, h), a * b);
            }
        }
        Ok(r)
    }

    pub fn scale(&self, k: &BigInt) -> RingElem {
        let mut r = RingElem::zero(&self.spec);
        if k.is_zero() {
            return r;
        }
        r.terms = self.terms.iter().map(|(g, c)| (g.clone(), c * k)).collect();
        r
    }

    pub fn left_mul_word(&self, g: &Word) -> RingElem {
        self.map_terms(|h| mul_elems(&self.spec, g.elem(), h))
    }

    pub fn right_mul_word(&self, g: &Word) -> RingElem {
        self.map_terms(|h| mul_elems(&self.spec, h, g.elem()))
    }

    fn map_terms(&self, f: impl Fn(&GroupElem) -> GroupElem) -> RingElem {
        let mut r = RingElem::zero(&self.spec);
        for (g, c) in &self.terms {
            r.add_term(f(g), c.clone());
        }
        r
    }

    /// The bar involution: `sum c_i g_i -> sum c_i g_i^-1`.
    pub fn involute(&self) -> RingElem {
        self.map_terms(|g| inv_elem(&self.spec, g))
    }

    /// `g r g^-1`.
    pub fn conj(&self, g: &Word) -> RingElem {
        let gi = g.inv();
        self.map_terms(|h| mul_elems(&self.spec, &mul_elems(&self.spec, g.elem(), h), gi.elem()))
    }

    pub fn checked_conj(&self, g: &Word) -> Result<RingElem> {
        if !same_spec(&self.spec, g.spec()) {
            return Err(Error::SpecMismatch);
        }
        Ok(self.conj(g))
    }

    /// Drops the coefficient at the identity, landing in `Z[G \ 1]`.
    pub fn bar_reduce(&self) -> RingElem {
        let mut r = self.clone();
        r.terms.retain(|g, _| !g.is_identity());
        r
    }

    pub fn identity_coeff(&self) -> BigInt {
        self.coeff(&Word::identity(&self.spec))
    }

    pub fn parse(spec: &SpecRef, text: &str) -> Result<RingElem> {
        let mut cur = Cursor::new(text)?;
        let mut r = RingElem::zero(spec);
        if cur.at_end() {
            return Err(Error::syntax(0, "empty ring element"));
        }
        let mut first = true;
        loop {
            let sign = if cur.eat(&Tok::Minus) {
                -BigInt::one()
            } else if cur.eat(&Tok::Plus) || first {
                BigInt::one()
            } else {
                return Err(Error::syntax(cur.pos(), "expected `+` or `-`"));
            };
            first = false;
            let (w, c) = parse_term(spec, &mut cur)?;
            r.add_term(w.elem().clone(), sign * c);
            if cur.at_end() {
                return Ok(r);
            }
        }
    }
}

fn parse_term(spec: &SpecRef, cur: &mut Cursor) -> Result<(Word, BigInt)> {
    let mut coeff = BigInt::one();
    let mut w = Word::identity(spec);
    loop {
        let pos = cur.pos();
        match cur.next() {
            Some(Tok::Int(n)) => {
                if cur.peek() == Some(&Tok::Caret) {
                    return Err(Error::syntax(cur.pos(), "exponent on an integer"));
                }
                coeff *= n;
            }
            Some(Tok::Ident(name)) => {
                let g = Word::generator(spec, &name)?;
                let e = cur.exponent()?.unwrap_or_else(BigInt::one);
                w = w.mul_unchecked(&g.pow(&e));
            }
            _ => return Err(Error::syntax(pos, "expected coefficient or generator")),
        }
        if !cur.eat(&Tok::Star) {
            return Ok((w, coeff));
        }
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if w.is_identity() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{mag}*{w}")?;
            }
        }
        Ok(())
    }
}

// Operators panic on spec mismatch; the `checked_*` methods report it.

impl Add for &RingElem {
    type Output = RingElem;
    fn add(self, rhs: &RingElem) -> RingElem {
        self.checked_add(rhs).expect("group spec mismatch")
    }
}

impl Sub for &RingElem {
    type Output = RingElem;
    fn sub(self, rhs: &RingElem) -> RingElem {
        self.checked_sub(rhs).expect("group spec mismatch")
    }
}

impl Mul for &RingElem {
    type Output = RingElem;
    fn mul(self, rhs: &RingElem) -> RingElem {
        self.checked_mul(rhs).expect("group spec mismatch")
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        self.scale(&-BigInt::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RingElem {
            type Output = RingElem;
            fn $m(self, rhs: RingElem) -> RingElem {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RingElem> for RingElem {
            type Output = RingElem;
            fn $m(self, rhs: &RingElem) -> RingElem {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        -&self
    }
}
