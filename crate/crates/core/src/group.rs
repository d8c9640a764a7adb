//! Finitely generated groups with an easy normal form.
//!
//! Supported classes are the trivial group, free groups, free abelian groups,
//! finite cyclic groups and finite direct products of these. Anything given
//! by arbitrary relators is rejected at parse time.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::syntax::{is_ident_char, is_ident_start, Cursor, Tok};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    Trivial,
    Free(Vec<String>),
    FreeAbelian(Vec<String>),
    FiniteCyclic { order: BigInt, generator: String },
    /// Flat list of non-product factors.
    DirectProduct(Vec<GroupSpec>),
}

pub type SpecRef = Arc<GroupSpec>;

pub(crate) fn same_spec(a: &SpecRef, b: &SpecRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl GroupSpec {
    /// Builds a direct product, flattening nested products. A single factor
    /// is returned unwrapped.
    pub fn product(factors: Vec<GroupSpec>) -> Result<GroupSpec> {
        let mut flat = Vec::new();
        for f in factors {
            match f {
                GroupSpec::DirectProduct(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        let spec = match flat.len() {
            0 => return Err(Error::InvalidGroup("empty direct product".into())),
            1 => flat.pop().unwrap(),
            _ => GroupSpec::DirectProduct(flat),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for name in self.generator_names() {
            if !seen.insert(name) {
                return Err(Error::InvalidGroup(format!("duplicate generator `{name}`")));
            }
        }
        for f in self.factors() {
            match f {
                GroupSpec::FiniteCyclic { order, .. } if *order < BigInt::one() => {
                    return Err(Error::InvalidGroup(format!("cyclic order {order} < 1")));
                }
                GroupSpec::DirectProduct(_) => {
                    return Err(Error::InvalidGroup("nested direct product".into()));
                }
                _ => {}
            }
        }
        if let GroupSpec::DirectProduct(v) = self {
            if v.is_empty() {
                return Err(Error::InvalidGroup("empty direct product".into()));
            }
        }
        Ok(())
    }

    pub fn factors(&self) -> &[GroupSpec] {
        match self {
            GroupSpec::DirectProduct(v) => v,
            other => std::slice::from_ref(other),
        }
    }

    fn local_names(&self) -> Vec<&str> {
        match self {
            GroupSpec::Trivial => vec![],
            GroupSpec::Free(n) | GroupSpec::FreeAbelian(n) => n.iter().map(String::as_str).collect(),
            GroupSpec::FiniteCyclic { generator, .. } => vec![generator.as_str()],
            GroupSpec::DirectProduct(v) => v.iter().flat_map(|f| f.local_names()).collect(),
        }
    }

    /// All generator names in declaration order.
    pub fn generator_names(&self) -> Vec<&str> {
        self.local_names()
    }

    pub fn num_generators(&self) -> usize {
        self.local_names().len()
    }

    /// (factor index, index within factor) of a named generator.
    pub fn locate(&self, name: &str) -> Option<(usize, usize)> {
        for (fi, f) in self.factors().iter().enumerate() {
            if let Some(li) = f.local_names().iter().position(|n| *n == name) {
                return Some((fi, li));
            }
        }
        None
    }

    fn factor_offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.factors()
            .iter()
            .map(|f| {
                let o = acc;
                acc += f.local_names().len();
                o
            })
            .collect()
    }

    /// Global generator index -> (factor, local).
    pub(crate) fn split_index(&self, global: usize) -> Option<(usize, usize)> {
        let offsets = self.factor_offsets();
        for (fi, f) in self.factors().iter().enumerate().rev() {
            if global >= offsets[fi] && global < offsets[fi] + f.local_names().len() {
                return Some((fi, global - offsets[fi]));
            }
        }
        None
    }

    pub fn is_abelian(&self) -> bool {
        self.factors().iter().all(|f| match f {
            GroupSpec::Free(n) => n.len() <= 1,
            _ => true,
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.factors().iter().all(|f| match f {
            GroupSpec::Trivial => true,
            GroupSpec::Free(n) | GroupSpec::FreeAbelian(n) => n.is_empty(),
            GroupSpec::FiniteCyclic { order, .. } => order.is_one(),
            GroupSpec::DirectProduct(_) => unreachable!("flat"),
        })
    }

    /// Whether generators `i` and `j` (global indices) commute by the
    /// defining relations of the presentation.
    pub(crate) fn generators_commute(&self, i: usize, j: usize) -> bool {
        let (fi, _) = self.split_index(i).expect("generator index");
        let (fj, _) = self.split_index(j).expect("generator index");
        fi != fj || !matches!(self.factors()[fi], GroupSpec::Free(_)) || i == j
    }

    /// Order of generator `i` when it lies in a finite cyclic factor.
    pub(crate) fn generator_order(&self, i: usize) -> Option<&BigInt> {
        let (fi, _) = self.split_index(i)?;
        match &self.factors()[fi] {
            GroupSpec::FiniteCyclic { order, .. } => Some(order),
            _ => None,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Trivial => write!(f, "1"),
            GroupSpec::Free(n) => write!(f, "F<{}>", n.join(",")),
            GroupSpec::FreeAbelian(n) => write!(f, "Z<{}>", n.join(",")),
            GroupSpec::FiniteCyclic { order, generator } => write!(f, "Z/{order}<{generator}>"),
            GroupSpec::DirectProduct(v) => {
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " x ")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// presentation parser

struct SpecParser<'a> {
    chars: Vec<(usize, char)>,
    i: usize,
    text: &'a str,
}

impl SpecParser<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.chars.len() && self.chars[self.i].1.is_whitespace() {
            self.i += 1;
        }
    }

    fn pos(&self) -> usize {
        self.chars.get(self.i).map_or(self.text.len(), |c| c.0)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|c| c.1)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.i += 1;
            Ok(())
        } else {
            Err(Error::syntax(self.pos(), format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.i;
        if !self.peek().is_some_and(is_ident_start) {
            return Err(Error::syntax(self.pos(), "expected generator name"));
        }
        while self.peek().is_some_and(is_ident_char) {
            self.i += 1;
        }
        Ok(self.chars[start..self.i].iter().map(|c| c.1).collect())
    }

    fn int(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.i;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.i += 1;
        }
        if start == self.i {
            return Err(Error::syntax(self.pos(), "expected integer"));
        }
        let s: String = self.chars[start..self.i].iter().map(|c| c.1).collect();
        Ok(s.parse().expect("digits"))
    }

    fn names(&mut self) -> Result<Vec<String>> {
        self.expect('<')?;
        let mut names = Vec::new();
        self.skip_ws();
        if self.peek() == Some('>') {
            self.i += 1;
            return Ok(names);
        }
        loop {
            names.push(self.ident()?);
            self.skip_ws();
            match self.peek() {
                Some(',') => self.i += 1,
                Some('>') => {
                    self.i += 1;
                    return Ok(names);
                }
                Some('|') => {
                    return Err(Error::UndecidableClass(
                        "presentations with relators have no decidable normal form here".into(),
                    ))
                }
                _ => return Err(Error::syntax(self.pos(), "expected `,` or `>`")),
            }
        }
    }

    fn factor(&mut self) -> Result<GroupSpec> {
        self.skip_ws();
        let pos = self.pos();
        match self.peek() {
            Some('1') => {
                self.i += 1;
                if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    return Err(Error::syntax(pos, "expected group factor"));
                }
                Ok(GroupSpec::Trivial)
            }
            Some(c) if is_ident_start(c) => {
                let head = self.ident()?;
                match head.as_str() {
                    "F" => Ok(GroupSpec::Free(self.names()?)),
                    "Z" => {
                        self.skip_ws();
                        if self.peek() == Some('/') {
                            self.i += 1;
                            let order = self.int()?;
                            let names = self.names()?;
                            if names.len() != 1 {
                                return Err(Error::syntax(pos, "finite cyclic factor takes exactly one generator"));
                            }
                            if order < BigInt::one() {
                                return Err(Error::InvalidGroup(format!("cyclic order {order} < 1")));
                            }
                            Ok(GroupSpec::FiniteCyclic {
                                order,
                                generator: names.into_iter().next().unwrap(),
                            })
                        } else {
                            Ok(GroupSpec::FreeAbelian(self.names()?))
                        }
                    }
                    other => {
                        self.skip_ws();
                        if matches!(self.peek(), Some('<') | Some('(')) {
                            Err(Error::UndecidableClass(format!("unsupported group class `{other}`")))
                        } else {
                            Err(Error::syntax(pos, format!("unknown group factor `{other}`")))
                        }
                    }
                }
            }
            _ => Err(Error::syntax(pos, "expected group factor")),
        }
    }
}

/// Parses `spec := factor ("x" factor)*`.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    let mut p = SpecParser {
        chars: text.char_indices().collect(),
        i: 0,
        text,
    };
    let mut factors = vec![p.factor()?];
    loop {
        p.skip_ws();
        match p.peek() {
            None => break,
            Some('x') => {
                p.i += 1;
                factors.push(p.factor()?);
            }
            Some(_) => return Err(Error::syntax(p.pos(), "expected `x` or end of input")),
        }
    }
    GroupSpec::product(factors)
}

// ---------------------------------------------------------------------------
// normal forms

/// Order on exponents used by the term order: by absolute value, positive
/// before negative.
pub(crate) fn exp_cmp(a: &BigInt, b: &BigInt) -> Ordering {
    a.magnitude()
        .cmp(b.magnitude())
        .then_with(|| a.is_negative().cmp(&b.is_negative()))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Part {
    /// Reduced word: runs of (local generator, nonzero exponent), adjacent
    /// runs on distinct generators.
    Free(Vec<(usize, BigInt)>),
    /// One exponent per generator; residues in `[0, m)` for cyclic factors.
    Abelian(Vec<BigInt>),
}

impl Part {
    fn weight(&self) -> BigInt {
        match self {
            Part::Free(v) => v.iter().map(|(_, e)| e.abs()).sum(),
            Part::Abelian(v) => v.iter().map(|e| e.abs()).sum(),
        }
    }

    /// Nonzero letters `(local generator, exponent)` in order.
    fn letters(&self) -> impl Iterator<Item = (usize, &BigInt)> + '_ {
        let (free, abelian) = match self {
            Part::Free(v) => (Some(v), None),
            Part::Abelian(v) => (None, Some(v)),
        };
        free.into_iter()
            .flatten()
            .map(|(g, e)| (*g, e))
            .chain(abelian.into_iter().flat_map(|v| v.iter().enumerate().filter(|(_, e)| !e.is_zero())))
    }
}

/// Normal-form body of a group element, independent of its spec handle.
///
/// Ordered by the term order: total exponent weight first, then
/// lexicographically with `t < t^-1 < t^2 < ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElem(pub(crate) Vec<Part>);

impl GroupElem {
    pub(crate) fn identity(spec: &GroupSpec) -> Self {
        GroupElem(
            spec.factors()
                .iter()
                .map(|f| match f {
                    GroupSpec::Free(_) => Part::Free(Vec::new()),
                    other => Part::Abelian(vec![BigInt::zero(); other.local_names().len()]),
                })
                .collect(),
        )
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|p| match p {
            Part::Free(v) => v.is_empty(),
            Part::Abelian(v) => v.iter().all(Zero::is_zero),
        })
    }

    fn weight(&self) -> BigInt {
        self.0.iter().map(Part::weight).sum()
    }
}

impl PartialOrd for GroupElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupElem {
    fn cmp(&self, other: &Self) -> Ordering {
        fn letters(g: &GroupElem) -> impl Iterator<Item = ((usize, usize), &BigInt)> + '_ {
            g.0.iter()
                .enumerate()
                .flat_map(|(f, p)| p.letters().map(move |(l, e)| ((f, l), e)))
        }
        self.weight().cmp(&other.weight()).then_with(|| {
            let (mut a, mut b) = (letters(self), letters(other));
            loop {
                match (a.next(), b.next()) {
                    (None, None) => return Ordering::Equal,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(_), None) => return Ordering::Greater,
                    (Some(x), Some(y)) => {
                        let c = x.0.cmp(&y.0).then_with(|| exp_cmp(x.1, y.1));
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                }
            }
        })
    }
}

fn push_free(run: &mut Vec<(usize, BigInt)>, gen: usize, exp: BigInt) {
    if exp.is_zero() {
        return;
    }
    if let Some(last) = run.last_mut() {
        if last.0 == gen {
            last.1 += exp;
            if last.1.is_zero() {
                run.pop();
            }
            return;
        }
    }
    run.push((gen, exp));
}

fn reduce_mod(e: &BigInt, order: &BigInt) -> BigInt {
    e.mod_floor(order)
}

pub(crate) fn mul_elems(spec: &GroupSpec, a: &GroupElem, b: &GroupElem) -> GroupElem {
    GroupElem(
        spec.factors()
            .iter()
            .zip(a.0.iter().zip(&b.0))
            .map(|(f, pair)| match pair {
                (Part::Free(x), Part::Free(y)) => {
                    let mut run = x.clone();
                    for (g, e) in y {
                        push_free(&mut run, *g, e.clone());
                    }
                    Part::Free(run)
                }
                (Part::Abelian(x), Part::Abelian(y)) => Part::Abelian(
                    x.iter()
                        .zip(y)
                        .map(|(p, q)| {
                            let s = p + q;
                            match f {
                                GroupSpec::FiniteCyclic { order, .. } => reduce_mod(&s, order),
                                _ => s,
                            }
                        })
                        .collect(),
                ),
                _ => unreachable!("parts follow the spec"),
            })
            .collect(),
    )
}

pub(crate) fn inv_elem(spec: &GroupSpec, a: &GroupElem) -> GroupElem {
    GroupElem(
        spec.factors()
            .iter()
            .zip(&a.0)
            .map(|(f, p)| match p {
                Part::Free(x) => Part::Free(x.iter().rev().map(|(g, e)| (*g, -e)).collect()),
                Part::Abelian(x) => Part::Abelian(
                    x.iter()
                        .map(|e| match f {
                            GroupSpec::FiniteCyclic { order, .. } => reduce_mod(&-e, order),
                            _ => -e,
                        })
                        .collect(),
                ),
            })
            .collect(),
    )
}

/// A normalized element of a supported group.
#[derive(Clone)]
pub struct Word {
    spec: SpecRef,
    elem: GroupElem,
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.elem == other.elem && same_spec(&self.spec, &other.spec)
    }
}

impl Eq for Word {}

/// Term order; only meaningful within one group.
impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.elem.cmp(&other.elem)
    }
}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.elem.hash(state);
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Normalizes a raw letter sequence `(generator name, exponent)`.
pub fn normalize<S: AsRef<str>>(raw: &[(S, BigInt)], spec: &SpecRef) -> Result<Word> {
    let mut w = Word::identity(spec);
    for (name, e) in raw {
        let g = Word::generator(spec, name.as_ref())?;
        w = w.mul_unchecked(&g.pow(e));
    }
    Ok(w)
}

impl Word {
    pub fn identity(spec: &SpecRef) -> Self {
        Word {
            spec: spec.clone(),
            elem: GroupElem::identity(spec),
        }
    }

    pub(crate) fn from_elem(spec: &SpecRef, elem: GroupElem) -> Self {
        Word {
            spec: spec.clone(),
            elem,
        }
    }

    pub fn generator(spec: &SpecRef, name: &str) -> Result<Self> {
        let (fi, li) = spec
            .locate(name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        let mut elem = GroupElem::identity(spec);
        elem.0[fi] = match &spec.factors()[fi] {
            GroupSpec::Free(_) => Part::Free(vec![(li, BigInt::one())]),
            f => {
                let mut v = vec![BigInt::zero(); f.local_names().len()];
                v[li] = match f {
                    GroupSpec::FiniteCyclic { order, .. } => reduce_mod(&BigInt::one(), order),
                    _ => BigInt::one(),
                };
                Part::Abelian(v)
            }
        };
        Ok(Word::from_elem(spec, elem))
    }

    /// Generator by global index.
    pub fn generator_at(spec: &SpecRef, index: usize) -> Self {
        let name = spec.generator_names()[index].to_string();
        Word::generator(spec, &name).expect("index in range")
    }

    pub fn parse(spec: &SpecRef, text: &str) -> Result<Self> {
        let mut cur = Cursor::new(text)?;
        if cur.at_end() {
            return Err(Error::syntax(0, "empty word"));
        }
        let w = parse_word_factors(spec, &mut cur)?;
        if !cur.at_end() {
            return Err(Error::syntax(cur.pos(), "trailing input after word"));
        }
        Ok(w)
    }

    pub fn spec(&self) -> &SpecRef {
        &self.spec
    }

    pub fn elem(&self) -> &GroupElem {
        &self.elem
    }

    pub fn is_identity(&self) -> bool {
        self.elem.is_identity()
    }

    pub(crate) fn mul_unchecked(&self, other: &Word) -> Word {
        Word::from_elem(&self.spec, mul_elems(&self.spec, &self.elem, &other.elem))
    }

    pub fn mul(&self, other: &Word) -> Result<Word> {
        if !same_spec(&self.spec, &other.spec) {
            return Err(Error::SpecMismatch);
        }
        Ok(self.mul_unchecked(other))
    }

    pub fn inv(&self) -> Word {
        Word::from_elem(&self.spec, inv_elem(&self.spec, &self.elem))
    }

    pub fn pow(&self, n: &BigInt) -> Word {
        // square-and-multiply keeps huge exponents cheap for abelian parts
        let (base, mut k) = if n.is_negative() {
            (self.inv(), -n)
        } else {
            (self.clone(), n.clone())
        };
        let mut acc = Word::identity(&self.spec);
        let mut sq = base;
        let two = BigInt::from(2);
        while !k.is_zero() {
            if k.is_odd() {
                acc = acc.mul_unchecked(&sq);
            }
            k /= &two;
            if !k.is_zero() {
                sq = sq.mul_unchecked(&sq);
            }
        }
        acc
    }

    /// `g w g^-1`.
    pub fn conj(&self, by: &Word) -> Word {
        by.mul_unchecked(self).mul_unchecked(&by.inv())
    }

    pub fn commutes_with(&self, other: &Word) -> bool {
        self.mul_unchecked(other) == other.mul_unchecked(self)
    }

    /// Normal-form letters as (global generator index, exponent).
    pub fn letters(&self) -> Vec<(usize, BigInt)> {
        let offsets = self.spec.factor_offsets();
        let mut out = Vec::new();
        for (p, off) in self.elem.0.iter().zip(offsets) {
            match p {
                Part::Free(v) => out.extend(v.iter().map(|(g, e)| (off + g, e.clone()))),
                Part::Abelian(v) => out.extend(
                    v.iter()
                        .enumerate()
                        .filter(|(_, e)| !e.is_zero())
                        .map(|(g, e)| (off + g, e.clone())),
                ),
            }
        }
        out
    }

    /// Word-metric length (exponent sum for abelian parts, `min(r, m - r)`
    /// for cyclic ones).
    pub fn length(&self) -> BigInt {
        self.spec
            .factors()
            .iter()
            .zip(&self.elem.0)
            .map(|(f, p)| match (f, p) {
                (GroupSpec::FiniteCyclic { order, .. }, Part::Abelian(v)) => {
                    let r = &v[0];
                    r.clone().min(order - r)
                }
                (_, p) => p.weight(),
            })
            .sum()
    }
}

pub(crate) fn parse_word_factors(spec: &SpecRef, cur: &mut Cursor) -> Result<Word> {
    let mut w = Word::identity(spec);
    loop {
        let pos = cur.pos();
        match cur.next() {
            Some(Tok::Ident(name)) => {
                let g = Word::generator(spec, &name)?;
                let e = cur.exponent()?.unwrap_or_else(BigInt::one);
                w = w.mul_unchecked(&g.pow(&e));
            }
            Some(Tok::Int(n)) if n.is_one() => {}
            _ => return Err(Error::syntax(pos, "expected generator or `1`")),
        }
        if !cur.eat(&Tok::Star) {
            return Ok(w);
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = self.letters();
        if letters.is_empty() {
            return write!(f, "1");
        }
        let names = self.spec.generator_names();
        for (i, (g, e)) in letters.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{}", names[*g])?;
            if !e.is_one() {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// balls

fn free_ball(rank: usize, radius: usize) -> Vec<Vec<(usize, BigInt)>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<(usize, i64)>> = vec![Vec::new()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            for g in 0..rank {
                for s in [1i64, -1] {
                    if let Some(&(lg, le)) = w.last() {
                        if lg == g && le.signum() != s {
                            continue;
                        }
                    }
                    let mut v = w.clone();
                    match v.last_mut() {
                        Some(last) if last.0 == g => last.1 += s,
                        _ => v.push((g, s)),
                    }
                    next.push(v);
                }
            }
        }
        out.extend(
            next.iter()
                .map(|v| v.iter().map(|&(g, e)| (g, BigInt::from(e))).collect()),
        );
        frontier = next;
    }
    out
}

fn abelian_ball(rank: usize, radius: i64) -> Vec<Vec<BigInt>> {
    fn rec(rank: usize, budget: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<BigInt>>) {
        if prefix.len() == rank {
            out.push(prefix.iter().map(|&e| BigInt::from(e)).collect());
            return;
        }
        for e in -budget..=budget {
            prefix.push(e);
            rec(rank, budget - e.abs(), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(rank, radius, &mut Vec::new(), &mut out);
    out
}

impl GroupSpec {
    /// Elements of word length at most `radius`, sorted in term order.
    pub fn ball(self: &Arc<Self>, radius: u32) -> Vec<Word> {
        let r = radius as usize;
        // per factor: (length, part)
        let per_factor: Vec<Vec<(usize, Part)>> = self
            .factors()
            .iter()
            .map(|f| match f {
                GroupSpec::Trivial => vec![(0, Part::Abelian(vec![]))],
                GroupSpec::Free(n) => free_ball(n.len(), r)
                    .into_iter()
                    .map(|w| {
                        let len = w.iter().map(|(_, e)| e.magnitude().to_usize().unwrap()).sum();
                        (len, Part::Free(w))
                    })
                    .collect(),
                GroupSpec::FreeAbelian(n) => abelian_ball(n.len(), r as i64)
                    .into_iter()
                    .map(|v| {
                        let len = v.iter().map(|e| e.magnitude().to_usize().unwrap()).sum();
                        (len, Part::Abelian(v))
                    })
                    .collect(),
                GroupSpec::FiniteCyclic { order, .. } => {
                    let mut seen = BTreeSet::new();
                    for k in 0..=r {
                        let k = BigInt::from(k);
                        seen.insert(reduce_mod(&k, order));
                        seen.insert(reduce_mod(&-k, order));
                    }
                    seen.into_iter()
                        .map(|res| {
                            let len = res.clone().min(order - &res).to_usize().unwrap();
                            (len, Part::Abelian(vec![res]))
                        })
                        .collect()
                }
                GroupSpec::DirectProduct(_) => unreachable!("flat"),
            })
            .collect();

        let mut acc: Vec<(usize, Vec<Part>)> = vec![(0, Vec::new())];
        for parts in per_factor {
            let mut next = Vec::new();
            for (len, prefix) in &acc {
                for (l, p) in &parts {
                    if len + l <= r {
                        let mut v = prefix.clone();
                        v.push(p.clone());
                        next.push((len + l, v));
                    }
                }
            }
            acc = next;
        }
        let mut words: Vec<Word> = acc
            .into_iter()
            .map(|(_, parts)| Word::from_elem(self, GroupElem(parts)))
            .collect();
        words.sort_by(|a, b| a.elem.cmp(&b.elem));
        words.dedup_by(|a, b| a.elem == b.elem);
        words
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> SpecRef {
        Arc::new(parse_group_spec(s).unwrap())
    }

    fn w(sp: &SpecRef, s: &str) -> Word {
        Word::parse(sp, s).unwrap()
    }

    #[test]
    fn parses_grammar_cases() {
        assert_eq!(
            parse_group_spec("Z<t>").unwrap(),
            GroupSpec::FreeAbelian(vec!["t".into()])
        );
        assert_eq!(
            parse_group_spec("F<x,y>").unwrap(),
            GroupSpec::Free(vec!["x".into(), "y".into()])
        );
        assert_eq!(
            parse_group_spec("Z<t> x Z/3<u>").unwrap(),
            GroupSpec::DirectProduct(vec![
                GroupSpec::FreeAbelian(vec!["t".into()]),
                GroupSpec::FiniteCyclic {
                    order: 3.into(),
                    generator: "u".into()
                }
            ])
        );
        assert_eq!(parse_group_spec("1").unwrap(), GroupSpec::Trivial);
    }

    #[test]
    fn display_round_trips() {
        for s in ["Z<t>", "F<x,y>", "Z<t> x Z/3<u>", "1", "F<a> x Z<b,c> x Z/7<u>"] {
            assert_eq!(parse_group_spec(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn parse_errors() {
        match parse_group_spec("Z<t> y F<x>") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_group_spec("G<a,b | aba^-1b^-1>"),
            Err(Error::UndecidableClass(_))
        ));
        assert!(matches!(
            parse_group_spec("F<a,b | abab>"),
            Err(Error::UndecidableClass(_))
        ));
        assert!(matches!(parse_group_spec("Z<t> x F<t>"), Err(Error::InvalidGroup(_))));
        assert!(matches!(parse_group_spec("Z/0<u>"), Err(Error::InvalidGroup(_))));
        assert!(matches!(parse_group_spec("Z<t"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn normalize_examples() {
        let f = spec("F<x,y>");
        let one = BigInt::one();
        let raw = [("x", one.clone()), ("y", one.clone()), ("y", -&one), ("x", one.clone())];
        assert_eq!(normalize(&raw, &f).unwrap().to_string(), "x^2");

        let z = spec("Z<t>");
        let raw = [("t", BigInt::from(2)), ("t", BigInt::from(-3))];
        assert_eq!(normalize(&raw, &z).unwrap().to_string(), "t^-1");

        let c = spec("Z/3<u>");
        assert_eq!(normalize(&[("u", BigInt::from(5))], &c).unwrap().to_string(), "u^2");

        assert_eq!(
            normalize(&[("q", BigInt::one())], &c),
            Err(Error::UnknownGenerator("q".into()))
        );
    }

    #[test]
    fn mul_and_inv_examples() {
        let f = spec("F<x,y>");
        assert!(w(&f, "x").mul(&w(&f, "x^-1")).unwrap().is_identity());
        assert_eq!(w(&f, "x*y").mul(&w(&f, "y^-1*x")).unwrap(), w(&f, "x^2"));
        assert_eq!(w(&f, "x*y").inv().to_string(), "y^-1*x^-1");
        assert!(Word::identity(&f).inv().is_identity());

        let z = spec("Z<t>");
        assert_eq!(w(&z, "t^2").mul(&w(&z, "t^3")).unwrap(), w(&z, "t^5"));

        let c = spec("Z/3<u>");
        assert_eq!(w(&c, "u").inv().to_string(), "u^2");

        assert_eq!(w(&z, "t").mul(&w(&c, "u")), Err(Error::SpecMismatch));
    }

    #[test]
    fn product_words_commute_across_factors() {
        let p = spec("F<x,y> x Z<t>");
        assert_eq!(w(&p, "t*x*t^-1*y"), w(&p, "x*y"));
        assert_eq!(w(&p, "x*t*y").to_string(), "x*y*t");
    }

    #[test]
    fn balls_have_expected_sizes() {
        assert_eq!(spec("Z<t>").ball(3).len(), 7);
        // 1 + 4 + 12 + 36
        assert_eq!(spec("F<x,y>").ball(3).len(), 53);
        assert_eq!(spec("Z<a,b>").ball(2).len(), 13);
        assert_eq!(spec("Z/5<u>").ball(1).len(), 3);
        assert_eq!(spec("Z/5<u>").ball(9).len(), 5);
        assert_eq!(spec("1").ball(4).len(), 1);
        let p = spec("Z<t> x Z/2<u>");
        assert_eq!(p.ball(1).len(), 4);
        for word in spec("F<x,y>").ball(3) {
            assert!(word.length() <= BigInt::from(3));
        }
    }

    #[test]
    fn term_order() {
        let z = spec("Z<t>");
        let ball = z.ball(2);
        let shown: Vec<String> = ball.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, ["1", "t", "t^-1", "t^2", "t^-2"]);
    }

    #[test]
    fn cyclic_length_is_symmetric() {
        let c = spec("Z/7<u>");
        assert_eq!(w(&c, "u^6").length(), BigInt::one());
        assert_eq!(w(&c, "u^3").length(), BigInt::from(3));
    }

    #[test]
    fn big_exponents() {
        let z = spec("Z<t>");
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let g = Word::generator(&z, "t").unwrap().pow(&big);
        assert_eq!(g.letters()[0].1, big);
        let c = spec("Z/1000000007<u>");
        let g = Word::generator(&c, "u").unwrap().pow(&big);
        assert_eq!(g.letters()[0].1, big.mod_floor(&BigInt::from(1_000_000_007u64)));
    }
}
