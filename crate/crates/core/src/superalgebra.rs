//! Sparse supercommutative polynomials over exact rationals, with graded
//! superderivations and exact linear solving on graded components. This is
//! the shared representation for descendent elements and vertex-algebra
//! states: only the generator families differ.

use crate::linalg::QMatrix;
use crate::rat::Rat;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_degree(d: i64) -> Parity {
        if d.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn compose(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Side {
    V,
    F,
}

/// Generator families. The global total order on generators (and hence every
/// canonical form and Koszul sign in the crate) is the derived lexicographic
/// order: family tag, then the indices in declaration order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Family {
    /// ch^H_i of the basis class `b` (holomorphic indexing).
    DescHol {
        i: u32,
        basis: u16,
    },
    /// ch_i of the basis class `b` (topological indexing, i >= 1).
    DescTop {
        i: u32,
        basis: u16,
    },
    DescPairHol {
        side: Side,
        i: u32,
        basis: u16,
    },
    DescPairTop {
        side: Side,
        i: u32,
        basis: u16,
    },
    /// Lattice generator v_{-k} for the vertex algebra, k >= 1; `slot` indexes
    /// the owning lattice's basis.
    Lattice {
        k: u32,
        slot: u16,
    },
    Formal {
        tag: u16,
        index: u16,
    },
}

/// A generator together with its cohomological degree. The degree is derived
/// data (it depends on the Hodge bidegrees of the owning geometry) carried on
/// the id so the kernel stays context-free; parity is degree mod 2.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GeneratorId {
    pub family: Family,
    pub degree: i32,
}

impl GeneratorId {
    pub fn new(family: Family, degree: i64) -> Self {
        GeneratorId {
            family,
            degree: i32::try_from(degree).expect("degree out of range"),
        }
    }

    pub fn parity(&self) -> Parity {
        Parity::of_degree(self.degree as i64)
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == Parity::Odd
    }
}

/// A canonical monomial: generators strictly increasing in the global order,
/// exponents >= 1, odd generators with exponent exactly 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(Vec<(GeneratorId, u32)>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn generator(g: GeneratorId) -> Self {
        Monomial(vec![(g, 1)])
    }

    pub fn from_factors(factors: &[(GeneratorId, u32)]) -> Option<(Self, i64)> {
        let mut acc = Monomial::unit();
        let mut sign = 1i64;
        for &(g, e) in factors {
            for _ in 0..e {
                let (m, s) = acc.mul(&Monomial::generator(g))?;
                acc = m;
                sign *= s;
            }
        }
        Some((acc, sign))
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(GeneratorId, u32)] {
        &self.0
    }

    pub fn total_exponent(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree(&self) -> i64 {
        self.0
            .iter()
            .map(|&(g, e)| g.degree as i64 * e as i64)
            .sum()
    }

    pub fn parity(&self) -> Parity {
        let odd = self.0.iter().filter(|(g, _)| g.is_odd()).count();
        Parity::of_degree(odd as i64)
    }

    /// Supercommutative product with the Koszul sign relative to canonical
    /// order. Returns None when an odd generator squares to zero.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, i64)> {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let mut sign = 1i64;
        // Odd generators of `self` not yet emitted; every odd generator of
        // `other` emitted while `suffix_odd` of them remain crosses that many.
        let mut suffix_odd = self.0.iter().filter(|(g, _)| g.is_odd()).count();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let take_left = match (self.0.get(i), other.0.get(j)) {
                (Some(a), Some(b)) => a.0 <= b.0,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => unreachable!(),
            };
            if take_left {
                let (g, e) = self.0[i];
                i += 1;
                if g.is_odd() {
                    suffix_odd -= 1;
                }
                if j < other.0.len() && other.0[j].0 == g {
                    let (_, e2) = other.0[j];
                    j += 1;
                    if g.is_odd() {
                        // crossing happens before the collision
                        return None;
                    }
                    out.push((g, e + e2));
                } else {
                    out.push((g, e));
                }
            } else {
                let (g, e) = other.0[j];
                j += 1;
                if g.is_odd() && suffix_odd % 2 == 1 {
                    sign = -sign;
                }
                out.push((g, e));
            }
        }
        Some((Monomial(out), sign))
    }

    /// Removes the first factor, returning (generator, remainder). The
    /// remainder stays canonical; no sign is produced because the factor is
    /// taken from the leftmost position.
    pub fn split_first(&self) -> Option<(GeneratorId, Monomial)> {
        let (g, e) = *self.0.first()?;
        let mut rest = self.0.clone();
        if e > 1 {
            rest[0].1 = e - 1;
        } else {
            rest.remove(0);
        }
        Some((g, Monomial(rest)))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SuperPoly {
    terms: BTreeMap<Monomial, Rat>,
}

impl SuperPoly {
    pub fn zero() -> Self {
        SuperPoly::default()
    }

    pub fn one() -> Self {
        SuperPoly::scalar(Rat::from_integer(1.into()))
    }

    pub fn scalar(c: Rat) -> Self {
        let mut p = SuperPoly::default();
        p.add_term(Monomial::unit(), c);
        p
    }

    pub fn generator(g: GeneratorId) -> Self {
        let mut p = SuperPoly::default();
        p.add_term(Monomial::generator(g), Rat::from_integer(1.into()));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coefficient(&Monomial::unit())
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &SuperPoly) -> SuperPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SuperPoly) -> SuperPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> SuperPoly {
        self.scale(&Rat::from_integer((-1).into()))
    }

    pub fn scale(&self, c: &Rat) -> SuperPoly {
        if c.is_zero() {
            return SuperPoly::zero();
        }
        SuperPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.clone() * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &SuperPoly) -> SuperPoly {
        let mut out = SuperPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, sign)) = ma.mul(mb) {
                    out.add_term(m, ca.clone() * cb * Rat::from_integer(sign.into()));
                }
            }
        }
        out
    }

    pub fn mul_generator_left(&self, g: GeneratorId) -> SuperPoly {
        SuperPoly::generator(g).mul(self)
    }

    /// The degree when every term has the same one.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys();
        let d = it.next()?.degree();
        it.all(|m| m.degree() == d).then_some(d)
    }

    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys();
        let p = match it.next() {
            None => return Some(Parity::Even),
            Some(m) => m.parity(),
        };
        it.all(|m| m.parity() == p).then_some(p)
    }

    /// Extends `f` on generators to an algebra homomorphism. `f` must send
    /// each generator to an element of the same parity.
    pub fn apply_hom(&self, f: &mut dyn FnMut(GeneratorId) -> SuperPoly) -> SuperPoly {
        let mut out = SuperPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = SuperPoly::scalar(c.clone());
            for &(g, e) in m.factors() {
                let img = f(g);
                for _ in 0..e {
                    acc = acc.mul(&img);
                }
            }
            out = out.add(&acc);
        }
        out
    }

    /// Extends `act` on generators to a superderivation of the given parity:
    /// d(vw) = d(v)w + (-1)^{r|v|} v d(w).
    pub fn apply_derivation(
        &self,
        parity: Parity,
        act: &mut dyn FnMut(GeneratorId) -> SuperPoly,
    ) -> SuperPoly {
        let mut out = SuperPoly::zero();
        for (m, c) in &self.terms {
            let factors = m.factors();
            let mut prefix_odd = 0usize;
            for (pos, &(g, e)) in factors.iter().enumerate() {
                let img = act(g);
                if !img.is_zero() {
                    // left part: factors before pos, plus g^{e-1}
                    let mut left: Vec<(GeneratorId, u32)> = factors[..pos].to_vec();
                    if e > 1 {
                        left.push((g, e - 1));
                    }
                    let left = Monomial(left);
                    let right = Monomial(factors[pos + 1..].to_vec());
                    // e > 1 only happens for even g, so the g^{e-1} block
                    // contributes no sign of its own.
                    let negate = parity == Parity::Odd && prefix_odd % 2 == 1;
                    let mut coeff = c.clone() * Rat::from_integer((e as i64).into());
                    if negate {
                        coeff = -coeff;
                    }
                    let mut term = SuperPoly::zero();
                    term.add_term(left, coeff);
                    let mut rightp = SuperPoly::zero();
                    rightp.add_term(right, Rat::from_integer(1.into()));
                    let piece = term.mul(&img).mul(&rightp);
                    out = out.add(&piece);
                }
                if g.is_odd() {
                    prefix_odd += e as usize;
                }
            }
        }
        out
    }

    /// Canonical text rendering: coefficient, then generators in global
    /// order, e.g. "3/2·chH[1](pt)·chH[2](1)". Bit-exact across runs.
    pub fn render(&self, name: &dyn Fn(GeneratorId) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut s = crate::rat::render_rat(c);
            for &(g, e) in m.factors() {
                s.push('·');
                s.push_str(&name(g));
                if e > 1 {
                    s.push_str(&format!("^{e}"));
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

impl fmt::Display for SuperPoly {
    // Fallback rendering with raw family debug names; callers with a naming
    // context should use `render`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&|g| format!("{:?}", g.family)))
    }
}

/// A superderivation given by a finite action table; generators not listed
/// map to zero.
#[derive(Clone, Debug)]
pub struct SuperDerivation {
    pub degree: i64,
    pub parity: Parity,
    pub action: BTreeMap<GeneratorId, SuperPoly>,
}

impl SuperDerivation {
    pub fn new(degree: i64, parity: Parity) -> Self {
        SuperDerivation {
            degree,
            parity,
            action: BTreeMap::new(),
        }
    }

    pub fn with_rule(mut self, g: GeneratorId, image: SuperPoly) -> Self {
        self.action.insert(g, image);
        self
    }

    pub fn apply(&self, x: &SuperPoly) -> SuperPoly {
        x.apply_derivation(self.parity, &mut |g| {
            self.action.get(&g).cloned().unwrap_or_else(SuperPoly::zero)
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("graded_solve requires homogeneous inputs of a single degree")]
    Inhomogeneous,
}

/// Expresses `target` as an exact rational combination of `vectors`, all
/// homogeneous of one degree, or returns Ok(None) if it is not in the span.
pub fn graded_solve(
    vectors: &[SuperPoly],
    target: &SuperPoly,
) -> Result<Option<Vec<Rat>>, AlgebraError> {
    let mut degree: Option<i64> = None;
    for p in vectors.iter().chain(std::iter::once(target)) {
        if p.is_zero() {
            continue;
        }
        let d = p.homogeneous_degree().ok_or(AlgebraError::Inhomogeneous)?;
        match degree {
            None => degree = Some(d),
            Some(existing) if existing != d => return Err(AlgebraError::Inhomogeneous),
            _ => {}
        }
    }
    let mut monomials: BTreeMap<Monomial, usize> = BTreeMap::new();
    for p in vectors.iter().chain(std::iter::once(target)) {
        for (m, _) in p.terms() {
            let next = monomials.len();
            monomials.entry(m.clone()).or_insert(next);
        }
    }
    let rows = monomials.len();
    let mut mat = QMatrix::zero(rows, vectors.len());
    let mut rhs = vec![Rat::zero(); rows];
    for (j, v) in vectors.iter().enumerate() {
        for (m, c) in v.terms() {
            *mat.at_mut(monomials[m], j) = c.clone();
        }
    }
    for (m, c) in target.terms() {
        rhs[monomials[m]] = c.clone();
    }
    match mat.solve(&rhs) {
        None => Ok(None),
        Some(x) => {
            // solve() zero-fills free variables; verify the combination.
            let mut recon = SuperPoly::zero();
            for (j, v) in vectors.iter().enumerate() {
                recon = recon.add(&v.scale(&x[j]));
            }
            if recon == *target {
                Ok(Some(x))
            } else {
                Ok(None)
            }
        }
    }
}
