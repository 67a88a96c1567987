//! The lattice vertex operator algebra attached to the K-theory of a target
//! geometry: mode calculus with bosonic modes on the even part and fermionic
//! modes on the odd part, general field reconstruction, the conformal
//! element built from the Hodge isotropic splitting, Virasoro operators L_n
//! for all n, the Borcherds bracket, the mod-translation quotient, and
//! primary-state testing.

use crate::geometry::{GeometryError, IsoClass, KTheoryLattice, TargetGeometry};
use crate::linalg::QMatrix;
use crate::rat::{int_parity, is_integer, rint, to_i64, Rat};
use crate::superalgebra::{Family, GeneratorId, Monomial, Parity, SuperPoly};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VaError {
    #[error("degenerate pairing: {0}")]
    DegeneratePairing(String),
    #[error("no conformal data: {0}")]
    NoConformal(String),
    #[error("state must live in a single sector")]
    NotSingleSector,
    #[error("no even vector pairs to 1 against this sector")]
    NoDualVector,
    #[error("sector is torsion (zero); lift requires a non-torsion sector")]
    TorsionSector,
    #[error("states must be graded-homogeneous per sector")]
    Inhomogeneous,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A point of the semi-topological lattice in integer coordinates over the
/// preset generators.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Sector(pub Vec<i64>);

impl Sector {
    pub fn zero(n: usize) -> Sector {
        Sector(vec![0; n])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &Sector) -> Sector {
        Sector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

/// An element of the vertex algebra: finitely many sectors, each carrying a
/// polynomial in the lattice generators.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct VAState {
    sectors: BTreeMap<Sector, SuperPoly>,
}

impl VAState {
    pub fn zero() -> VAState {
        VAState::default()
    }

    pub fn from_parts(sector: Sector, poly: SuperPoly) -> VAState {
        let mut s = VAState::zero();
        s.add_to(sector, poly);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn sectors(&self) -> impl Iterator<Item = (&Sector, &SuperPoly)> {
        self.sectors.iter()
    }

    pub fn single_sector(&self) -> Option<(&Sector, &SuperPoly)> {
        if self.sectors.len() == 1 {
            self.sectors.iter().next()
        } else {
            None
        }
    }

    pub fn add_to(&mut self, sector: Sector, poly: SuperPoly) {
        if poly.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.sectors.entry(sector) {
            Entry::Vacant(e) => {
                e.insert(poly);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&poly);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, o: &VAState) -> VAState {
        let mut out = self.clone();
        for (s, p) in &o.sectors {
            out.add_to(s.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, o: &VAState) -> VAState {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> VAState {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> VAState {
        if c.is_zero() {
            return VAState::zero();
        }
        VAState {
            sectors: self
                .sectors
                .iter()
                .map(|(s, p)| (s.clone(), p.scale(c)))
                .collect(),
        }
    }
}

/// Per-invocation memo table for the mode recursion; semantically
/// transparent (pure caching of subresults).
#[derive(Default)]
struct ModeMemo {
    modes: std::collections::HashMap<(Sector, Monomial, i64, Sector, SuperPoly), VAState>,
}

/// Conformal data: the conformal element, its central charge, and the dual
/// basis for the shifted supersymmetric pairing.
#[derive(Clone, Debug)]
pub struct ConformalData {
    pub omega: VAState,
    pub central_charge: Rat,
    /// For each slot, the dual vector (sparse slot coordinates) with respect
    /// to the conformally shifted pairing.
    dual: Vec<Vec<(usize, Rat)>>,
}

#[derive(Clone, Debug)]
pub struct LatticeVA {
    pub lattice: KTheoryLattice,
    gram: Vec<Vec<Rat>>,
    pub conformal: Option<ConformalData>,
    /// why conformal data is absent, when it is
    pub conformal_refusal: Option<String>,
}

/// Outcome of a primary-state test.
#[derive(Clone, Debug)]
pub struct PrimaryReport {
    pub homogeneous: bool,
    pub weights: Vec<Rat>,
    pub n_max: i64,
    pub primary: bool,
    pub failed_at: Option<i64>,
}

impl LatticeVA {
    pub fn new(geometry: TargetGeometry, pair: bool) -> Result<LatticeVA, VaError> {
        let lattice = KTheoryLattice::new(geometry, pair)?;
        let n = lattice.slots.len();
        let mut gram = vec![vec![Rat::zero(); n]; n];
        for a in 0..n {
            for b in 0..n {
                gram[a][b] = lattice.q_slots(a, b);
            }
        }
        let mut va = LatticeVA {
            lattice,
            gram,
            conformal: None,
            conformal_refusal: None,
        };
        match va.build_conformal() {
            Ok(data) => va.conformal = Some(data),
            Err(reason) => va.conformal_refusal = Some(reason),
        }
        Ok(va)
    }

    pub fn even_slots(&self) -> Vec<usize> {
        (0..self.lattice.slots.len())
            .filter(|&s| self.lattice.slots[s].iso == IsoClass::Even)
            .collect()
    }

    fn iso_slots(&self, class: IsoClass) -> Vec<usize> {
        (0..self.lattice.slots.len())
            .filter(|&s| self.lattice.slots[s].iso == class)
            .collect()
    }

    /// Kac's conformal element for the isotropic splitting: requires the
    /// symmetrized pairing to be nondegenerate on the even part and to pair
    /// the two isotropic halves perfectly.
    fn build_conformal(&self) -> Result<ConformalData, String> {
        let even = self.even_slots();
        let iso_i = self.iso_slots(IsoClass::IsoI);
        let iso_h = self.iso_slots(IsoClass::IsoHat);
        let ne = even.len();
        let mut even_gram = QMatrix::zero(ne, ne);
        for (a, &sa) in even.iter().enumerate() {
            for (b, &sb) in even.iter().enumerate() {
                *even_gram.at_mut(a, b) = self.gram[sa][sb].clone();
            }
        }
        let even_inv = even_gram
            .inverse()
            .ok_or_else(|| "degenerate pairing on the even part".to_string())?;
        if iso_i.len() != iso_h.len() {
            return Err("isotropic halves have mismatched dimensions".to_string());
        }
        let ni = iso_i.len();
        let mut cross = QMatrix::zero(ni, ni);
        for (a, &sa) in iso_i.iter().enumerate() {
            for (b, &sb) in iso_h.iter().enumerate() {
                *cross.at_mut(a, b) = self.gram[sa][sb].clone();
            }
        }
        let cross_inv = if ni > 0 {
            Some(
                cross
                    .inverse()
                    .ok_or_else(|| "degenerate pairing between the isotropic halves".to_string())?,
            )
        } else {
            None
        };

        let nslots = self.lattice.slots.len();
        let mut dual: Vec<Vec<(usize, Rat)>> = vec![Vec::new(); nslots];
        // even: dual of even slot b is sum_a inv[a][b]·slot_a (Q symmetric)
        for (b, &sb) in even.iter().enumerate() {
            let mut v = Vec::new();
            for (a, &sa) in even.iter().enumerate() {
                let c = even_inv.at(a, b).clone();
                if !c.is_zero() {
                    v.push((sa, c));
                }
            }
            dual[sb] = v;
        }
        if let Some(cinv) = &cross_inv {
            // dual of the I-slot at position b: x over the Ihat span with
            // cross·x = e_b, i.e. x_a = cinv[a][b]
            for (b, &sb) in iso_i.iter().enumerate() {
                let mut v = Vec::new();
                for (a, &sa) in iso_h.iter().enumerate() {
                    let c = cinv.at(a, b).clone();
                    if !c.is_zero() {
                        v.push((sa, c));
                    }
                }
                dual[sb] = v;
            }
            // dual of the Ihat-slot at position b: x over the I span with
            // cross^T·x = -e_b, i.e. x_a = -cinv[b][a]
            for (b, &sb) in iso_h.iter().enumerate() {
                let mut v = Vec::new();
                for (a, &sa) in iso_i.iter().enumerate() {
                    let c = -cinv.at(b, a).clone();
                    if !c.is_zero() {
                        v.push((sa, c));
                    }
                }
                dual[sb] = v;
            }
        }

        // omega = 1/2 sum_even dual(v)_{-1} v_{-1} + sum_I dual(v)_{-2} v_{-1}
        let mut omega_poly = SuperPoly::zero();
        for &s in &even {
            let dual_elt = self.vector_element(&dual[s], 1);
            let term = dual_elt.mul(&SuperPoly::generator(self.gen(s, 1)));
            omega_poly = omega_poly.add(&term.scale(&crate::rat::rfrac(1, 2)));
        }
        for &s in &iso_i {
            let dual_elt = self.vector_element(&dual[s], 2);
            let term = dual_elt.mul(&SuperPoly::generator(self.gen(s, 1)));
            omega_poly = omega_poly.add(&term);
        }
        let omega = VAState::from_parts(Sector::zero(self.lattice.sst.len()), omega_poly);
        let central_charge = rint(even.len() as i64 - (iso_i.len() + iso_h.len()) as i64);
        Ok(ConformalData {
            omega,
            central_charge,
            dual,
        })
    }

    pub fn conformal(&self) -> Result<&ConformalData, VaError> {
        self.conformal.as_ref().ok_or_else(|| {
            VaError::NoConformal(
                self.conformal_refusal
                    .clone()
                    .unwrap_or_else(|| "unavailable".into()),
            )
        })
    }

    pub fn central_charge(&self) -> Result<Rat, VaError> {
        Ok(self.conformal()?.central_charge.clone())
    }

    pub fn gen(&self, slot: usize, k: i64) -> GeneratorId {
        debug_assert!(k >= 1);
        let odd = self.lattice.slots[slot].parity == Parity::Odd;
        GeneratorId::new(
            Family::Lattice {
                k: k as u32,
                slot: slot as u16,
            },
            2 * k - if odd { 1 } else { 0 },
        )
    }

    pub fn sector_dim(&self) -> usize {
        self.lattice.sst.len()
    }

    pub fn vacuum(&self) -> VAState {
        VAState::from_parts(Sector::zero(self.sector_dim()), SuperPoly::one())
    }

    pub fn sector_state(&self, sector: Sector) -> VAState {
        VAState::from_parts(sector, SuperPoly::one())
    }

    /// The element sum_slots coeff·slot_{-k}.
    pub fn vector_element(&self, v: &[(usize, Rat)], k: i64) -> SuperPoly {
        let mut out = SuperPoly::zero();
        for (slot, c) in v {
            out = out.add(&SuperPoly::generator(self.gen(*slot, k)).scale(c));
        }
        out
    }

    fn vector_parity(&self, v: &[(usize, Rat)]) -> Parity {
        v.first()
            .map(|(s, _)| self.lattice.slots[*s].parity)
            .unwrap_or(Parity::Even)
    }

    /// Largest generator depth appearing in the polynomial.
    fn reach(poly: &SuperPoly) -> i64 {
        poly.terms()
            .flat_map(|(m, _)| m.factors().iter())
            .map(|&(g, _)| match g.family {
                Family::Lattice { k, .. } => k as i64,
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// The largest sum of generator depths in any monomial (bounds how many
    /// annihilations the polynomial survives).
    fn depth_capacity(poly: &SuperPoly) -> i64 {
        poly.terms()
            .map(|(m, _)| {
                m.factors()
                    .iter()
                    .map(|&(g, e)| match g.family {
                        Family::Lattice { k, .. } => k as i64 * e as i64,
                        _ => 0,
                    })
                    .sum::<i64>()
            })
            .max()
            .unwrap_or(0)
    }

    /// Q(vector, slot) row contraction.
    fn q_vec_slot(&self, v: &[(usize, Rat)], w: usize) -> Rat {
        v.iter().map(|(s, c)| self.gram[*s][w].clone() * c).sum()
    }

    /// Q(vector, sector point).
    fn q_vec_sector(&self, v: &[(usize, Rat)], alpha: &Sector) -> Rat {
        v.iter()
            .map(|(s, c)| self.lattice.q_slot_sector(*s, &alpha.0) * c)
            .sum()
    }

    /// The plain (unshifted) mode of a lattice vector on a sector
    /// polynomial: creation multiplies by the depth -k element; the even
    /// annihilation is the derivation k·Q(v,-)∂ with the zero mode acting by
    /// Q(v, sector); the odd annihilation is the derivation Q(v,-)∂ one
    /// depth up.
    pub fn plain_mode(
        &self,
        v: &[(usize, Rat)],
        k: i64,
        sector: &Sector,
        poly: &SuperPoly,
    ) -> SuperPoly {
        if k < 0 {
            return self.vector_element(v, -k).mul(poly);
        }
        let parity = self.vector_parity(v);
        match parity {
            Parity::Even => {
                if k == 0 {
                    return poly.scale(&self.q_vec_sector(v, sector));
                }
                poly.apply_derivation(Parity::Even, &mut |g| match g.family {
                    Family::Lattice { k: depth, slot }
                        if depth as i64 == k
                            && self.lattice.slots[slot as usize].parity == Parity::Even =>
                    {
                        SuperPoly::scalar(self.q_vec_slot(v, slot as usize) * rint(k))
                    }
                    _ => SuperPoly::zero(),
                })
            }
            Parity::Odd => poly.apply_derivation(Parity::Odd, &mut |g| match g.family {
                Family::Lattice { k: depth, slot }
                    if depth as i64 == k + 1
                        && self.lattice.slots[slot as usize].parity == Parity::Odd =>
                {
                    SuperPoly::scalar(self.q_vec_slot(v, slot as usize))
                }
                _ => SuperPoly::zero(),
            }),
        }
    }

    /// The conformally shifted mode: even and I-type vectors keep their
    /// plain modes; Ihat-type vectors pick up the translation shift
    /// (Tv)_{(n)} = -n·v_{(n-1)}.
    pub fn shifted_mode(
        &self,
        v: &[(usize, Rat)],
        iso: IsoClass,
        n: i64,
        sector: &Sector,
        poly: &SuperPoly,
    ) -> SuperPoly {
        match iso {
            IsoClass::Even | IsoClass::IsoI => self.plain_mode(v, n, sector, poly),
            IsoClass::IsoHat => {
                if n == 0 {
                    SuperPoly::zero()
                } else {
                    self.plain_mode(v, n - 1, sector, poly).scale(&rint(-n))
                }
            }
        }
    }

    fn iso_of_vector(&self, v: &[(usize, Rat)]) -> IsoClass {
        v.first()
            .map(|(s, _)| self.lattice.slots[*s].iso)
            .unwrap_or(IsoClass::Even)
    }

    /// Z-degree of a sector monomial.
    pub fn degree_of(&self, sector: &Sector, m: &Monomial) -> i64 {
        m.degree()
            + to_i64(&self.lattice.q_sym_sectors(&sector.0, &sector.0))
                .expect("integral sector self-pairing")
    }

    pub fn state_degrees(&self, s: &VAState) -> Vec<i64> {
        let mut out: Vec<i64> = s
            .sectors()
            .flat_map(|(sec, p)| {
                p.terms()
                    .map(|(m, _)| self.degree_of(sec, m))
                    .collect::<Vec<_>>()
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Largest n with a possibly nonzero mode a_(n)b, from the Z-grading:
    /// deg(a_(n)b) = deg a + deg b - 2n - 2 and the polynomial part of any
    /// sector is non-negatively graded.
    pub fn mode_upper_bound(&self, a: &VAState, b: &VAState) -> i64 {
        let mut bound = i64::MIN;
        for (sa, pa) in a.sectors() {
            let da = pa.terms().map(|(m, _)| self.degree_of(sa, m)).max();
            for (sb, pb) in b.sectors() {
                let db = pb.terms().map(|(m, _)| self.degree_of(sb, m)).max();
                if let (Some(da), Some(db)) = (da, db) {
                    let gamma = sa.add(sb);
                    let qg = to_i64(&self.lattice.q_sym_sectors(&gamma.0, &gamma.0))
                        .expect("integral sector self-pairing");
                    bound = bound.max((da + db - qg - 2).div_euclid(2));
                }
            }
        }
        bound
    }

    /// The mode a_(n)b, by recursive reconstruction: strip one generator
    /// from the state polynomial, expand the derivative field against the
    /// remainder with normal ordering, and resolve the exponential base
    /// field exactly on the finitely many terms that reach the requested
    /// power. Subresults are memoized per invocation (the recursion tree
    /// revisits the same remainder against the same target).
    pub fn mode(&self, a: &VAState, n: i64, b: &VAState) -> VAState {
        let mut memo = ModeMemo::default();
        let mut out = VAState::zero();
        for (alpha, pa) in a.sectors() {
            for (mono, coeff) in pa.terms() {
                for (beta, pb) in b.sectors() {
                    let part = self.mono_mode(alpha, mono, n, beta, pb, &mut memo);
                    out = out.add(&part.scale(coeff));
                }
            }
        }
        out
    }

    /// Largest mode index with a possibly nonzero action, from the degrees
    /// alone.
    fn mono_mode_bound(
        &self,
        alpha: &Sector,
        mono: &Monomial,
        beta: &Sector,
        pb: &SuperPoly,
    ) -> i64 {
        let da = self.degree_of(alpha, mono);
        let db = pb
            .terms()
            .map(|(m, _)| self.degree_of(beta, m))
            .max()
            .unwrap_or(i64::MIN);
        if db == i64::MIN {
            return i64::MIN;
        }
        let gamma = alpha.add(beta);
        let qg = to_i64(&self.lattice.q_sym_sectors(&gamma.0, &gamma.0))
            .expect("integral sector self-pairing");
        (da + db - qg - 2).div_euclid(2)
    }

    fn mono_mode(
        &self,
        alpha: &Sector,
        mono: &Monomial,
        n: i64,
        beta: &Sector,
        pb: &SuperPoly,
        memo: &mut ModeMemo,
    ) -> VAState {
        let key = (alpha.clone(), mono.clone(), n, beta.clone(), pb.clone());
        if let Some(hit) = memo.modes.get(&key) {
            return hit.clone();
        }
        let out = self.mono_mode_uncached(alpha, mono, n, beta, pb, memo);
        memo.modes.insert(key, out.clone());
        out
    }

    fn mono_mode_uncached(
        &self,
        alpha: &Sector,
        mono: &Monomial,
        n: i64,
        beta: &Sector,
        pb: &SuperPoly,
        memo: &mut ModeMemo,
    ) -> VAState {
        let Some((g, rest)) = mono.split_first() else {
            return self.exp_field_mode(alpha, n, beta, pb);
        };
        let Family::Lattice { k: depth, slot } = g.family else {
            panic!("vertex-algebra states use lattice generators only");
        };
        let slot = slot as usize;
        let k = depth as i64 - 1; // derivative order in the reconstruction
        let v: Vec<(usize, Rat)> = vec![(slot, Rat::one())];
        let v_odd = self.lattice.slots[slot].parity == Parity::Odd;
        let rest_parity = rest.parity();
        let mut acc = VAState::zero();

        // creation side: the surviving z-powers of the derivative field
        let inner_bound = self.mono_mode_bound(alpha, &rest, beta, pb);
        if inner_bound > i64::MIN {
            // m < 0 and n - m - 1 <= inner_bound
            let m_lo = n - 1 - inner_bound;
            for m in m_lo..0 {
                let c = derivative_coefficient(k, m);
                if c.is_zero() {
                    continue;
                }
                let inner = self.mono_mode(alpha, &rest, n - m - 1, beta, pb, memo);
                if inner.is_zero() {
                    continue;
                }
                let creation = self.gen(slot, k - m);
                let mut shifted = VAState::zero();
                for (sec, poly) in inner.sectors() {
                    shifted.add_to(sec.clone(), poly.mul_generator_left(creation).scale(&c));
                }
                acc = acc.add(&shifted);
            }
        }

        // annihilation side: the stripped field's annihilation part acts on
        // b first, crossing the remaining factors with a Koszul sign
        let cross_sign = if v_odd && rest_parity == Parity::Odd {
            -Rat::one()
        } else {
            Rat::one()
        };
        let m_hi = k + Self::reach(pb) + 1;
        for m in k..=m_hi {
            let c = derivative_coefficient(k, m);
            if c.is_zero() {
                continue;
            }
            let hit = self.plain_mode(&v, m - k, beta, pb);
            if hit.is_zero() {
                continue;
            }
            let inner = self.mono_mode(alpha, &rest, n - m - 1, beta, &hit, memo);
            acc = acc.add(&inner.scale(&(c * &cross_sign)));
        }

        acc.scale(&crate::rat::factorial(k as u64).recip())
    }

    /// The exponential field of a sector point applied to e^beta (x) pb,
    /// extracting the z^{-n-1} coefficient.
    fn exp_field_mode(&self, alpha: &Sector, n: i64, beta: &Sector, pb: &SuperPoly) -> VAState {
        let q_ab = self.lattice.q_sectors(&alpha.0, &beta.0);
        assert!(is_integer(&q_ab), "q must be integral on the lattice");
        let sign = if int_parity(&q_ab) {
            -Rat::one()
        } else {
            Rat::one()
        };
        let zq = to_i64(&self.lattice.q_sym_sectors(&alpha.0, &beta.0))
            .expect("Q must be integral on the lattice");
        let alpha_coords = self.sector_slot_coords(alpha);
        let target = alpha.add(beta);

        // annihilation exponential coefficients: E_0 = id,
        // c·E_c = sum_{k=1..c} (-alpha_(k))·E_{c-k}
        let cap = Self::depth_capacity(pb);
        let mut e_ops: Vec<SuperPoly> = vec![pb.clone()];
        for c in 1..=cap {
            let mut acc = SuperPoly::zero();
            for k in 1..=c {
                let prev = &e_ops[(c - k) as usize];
                if prev.is_zero() {
                    continue;
                }
                acc = acc.sub(&self.plain_mode(&alpha_coords, k, beta, prev));
            }
            e_ops.push(acc.scale(&rint(c).recip()));
        }

        // creation exponential elements: C_0 = 1,
        // a·C_a = sum_{m=1..a} alpha_{-m}·C_{a-m}
        let mut out = VAState::zero();
        let mut c_elts: Vec<SuperPoly> = vec![SuperPoly::one()];
        for (c, ec) in e_ops.iter().enumerate() {
            if ec.is_zero() {
                continue;
            }
            let a = -n - 1 - zq + c as i64;
            if a < 0 {
                continue;
            }
            while (c_elts.len() as i64) <= a {
                let i = c_elts.len() as i64;
                let mut acc = SuperPoly::zero();
                for m in 1..=i {
                    let elt = self.vector_element(&alpha_coords, m);
                    acc = acc.add(&elt.mul(&c_elts[(i - m) as usize]));
                }
                c_elts.push(acc.scale(&rint(i).recip()));
            }
            out.add_to(target.clone(), c_elts[a as usize].mul(ec).scale(&sign));
        }
        out
    }

    /// Slot coordinates of the Chern character of a sector point.
    pub fn sector_slot_coords(&self, alpha: &Sector) -> Vec<(usize, Rat)> {
        let class = self.lattice.sector_class(&alpha.0);
        let mut out = Vec::new();
        for (s, slot) in self.lattice.slots.iter().enumerate() {
            let c = match slot.side {
                crate::superalgebra::Side::V => class[0].0[slot.basis].clone(),
                crate::superalgebra::Side::F => class[1].0[slot.basis].clone(),
            };
            if !c.is_zero() {
                out.push((s, c));
            }
        }
        out
    }

    /// The translation operator: an even derivation with T(v_{-k}) =
    /// k·v_{-k-1}, plus multiplication by the sector's depth-one element.
    pub fn translate(&self, s: &VAState) -> VAState {
        let mut out = VAState::zero();
        for (sector, poly) in s.sectors() {
            let derived = poly.apply_derivation(Parity::Even, &mut |g| match g.family {
                Family::Lattice { k, slot } => {
                    SuperPoly::generator(self.gen(slot as usize, k as i64 + 1))
                        .scale(&rint(k as i64))
                }
                _ => SuperPoly::zero(),
            });
            out.add_to(sector.clone(), derived);
            let alpha_elt = self.vector_element(&self.sector_slot_coords(sector), 1);
            out.add_to(sector.clone(), alpha_elt.mul(poly));
        }
        out
    }

    /// L_n from the normal-ordered quadratic sum over the shifted modes of a
    /// basis and its dual.
    pub fn virasoro(&self, n: i64, s: &VAState) -> Result<VAState, VaError> {
        let conf = self.conformal()?;
        let mut out = VAState::zero();
        let half = crate::rat::rfrac(1, 2);
        for (sector, poly) in s.sectors() {
            let reach = Self::reach(poly) + 2;
            let mut acc = SuperPoly::zero();
            for slot in 0..self.lattice.slots.len() {
                let v: Vec<(usize, Rat)> = vec![(slot, Rat::one())];
                let v_iso = self.lattice.slots[slot].iso;
                let dual = &conf.dual[slot];
                let d_iso = self.iso_of_vector(dual);
                let odd = self.lattice.slots[slot].parity == Parity::Odd;
                for j in (n - reach - 1)..=(reach + 1) {
                    let i = n - j;
                    if i >= 0 && j < 0 {
                        // normal order: apply the dual annihilation first
                        let tmp = self.shifted_mode(dual, d_iso, i, sector, poly);
                        if tmp.is_zero() {
                            continue;
                        }
                        let term = self.shifted_mode(&v, v_iso, j, sector, &tmp);
                        acc = if odd { acc.sub(&term) } else { acc.add(&term) };
                    } else {
                        let tmp = self.shifted_mode(&v, v_iso, j, sector, poly);
                        if tmp.is_zero() {
                            continue;
                        }
                        let term = self.shifted_mode(dual, d_iso, i, sector, &tmp);
                        acc = acc.add(&term);
                    }
                }
            }
            out.add_to(sector.clone(), acc.scale(&half));
        }
        Ok(out)
    }

    /// Conformal weight of one sector monomial: depth for even and I-type
    /// factors, depth minus one for Ihat factors, plus half the sector
    /// self-pairing.
    pub fn conformal_weight_of(&self, sector: &Sector, m: &Monomial) -> Rat {
        let mut acc = self.lattice.q_sym_sectors(&sector.0, &sector.0) * crate::rat::rfrac(1, 2);
        for &(g, e) in m.factors() {
            if let Family::Lattice { k, slot } = g.family {
                let w = match self.lattice.slots[slot as usize].iso {
                    IsoClass::Even | IsoClass::IsoI => k as i64,
                    IsoClass::IsoHat => k as i64 - 1,
                };
                acc += rint(w * e as i64);
            }
        }
        acc
    }

    pub fn is_primary(&self, s: &VAState, n_max: Option<i64>) -> Result<PrimaryReport, VaError> {
        self.conformal()?;
        let mut weights: Vec<Rat> = Vec::new();
        let mut max_contrib = 0i64;
        for (sector, poly) in s.sectors() {
            let base = self.lattice.q_sym_sectors(&sector.0, &sector.0) * crate::rat::rfrac(1, 2);
            for (m, _) in poly.terms() {
                let w = self.conformal_weight_of(sector, m);
                let contrib = to_i64(&(w.clone() - base.clone())).expect("integer contribution");
                max_contrib = max_contrib.max(contrib);
                if !weights.contains(&w) {
                    weights.push(w);
                }
            }
        }
        let homogeneous = weights.len() <= 1;
        let n_max = n_max.unwrap_or(max_contrib + 1).max(1);
        let mut failed_at = None;
        for n in 1..=n_max {
            if !self.virasoro(n, s)?.is_zero() {
                failed_at = Some(n);
                break;
            }
        }
        Ok(PrimaryReport {
            homogeneous,
            weights,
            n_max,
            primary: failed_at.is_none(),
            failed_at,
        })
    }

    /// The Borcherds bracket [a, b] = a_(0)b (the partial lift to the vertex
    /// algebra; well-definedness modulo translation in the first slot is a
    /// tested property).
    pub fn lie_bracket(&self, a: &VAState, b: &VAState) -> VAState {
        self.mode(a, 0, b)
    }

    pub fn omega_bracket(&self, a: &VAState) -> Result<VAState, VaError> {
        let conf = self.conformal()?;
        Ok(self.mode(a, 0, &conf.omega))
    }

    /// All canonical monomials of the given polynomial degree.
    pub fn monomials_of_degree(&self, d: i64) -> Vec<Monomial> {
        if d == 0 {
            return vec![Monomial::unit()];
        }
        if d < 0 {
            return Vec::new();
        }
        let mut gens = Vec::new();
        for slot in 0..self.lattice.slots.len() {
            let mut k = 1i64;
            loop {
                let g = self.gen(slot, k);
                if g.degree as i64 > d {
                    break;
                }
                gens.push(g);
                k += 1;
            }
        }
        gens.sort();
        let mut out = Vec::new();
        let mut current: Vec<(GeneratorId, u32)> = Vec::new();
        fn rec(
            gens: &[GeneratorId],
            from: usize,
            remaining: i64,
            current: &mut Vec<(GeneratorId, u32)>,
            out: &mut Vec<Monomial>,
        ) {
            if remaining == 0 {
                out.push(Monomial::from_factors(current).expect("canonical").0);
                return;
            }
            for idx in from..gens.len() {
                let g = gens[idx];
                let d = g.degree as i64;
                if d > remaining {
                    continue;
                }
                let max_e = if g.is_odd() { 1 } else { remaining / d };
                for e in 1..=max_e {
                    current.push((g, e as u32));
                    rec(gens, idx + 1, remaining - e * d, current, out);
                    current.pop();
                }
            }
        }
        rec(&gens, 0, d, &mut current, &mut out);
        out
    }

    /// All canonical monomials whose conformal-weight contribution (without
    /// the sector shift) is exactly w. Finite because the weight-zero
    /// generators are odd.
    pub fn monomials_of_weight(&self, w: i64) -> Vec<Monomial> {
        if w < 0 {
            return Vec::new();
        }
        let mut gens: Vec<(GeneratorId, i64)> = Vec::new();
        for slot in 0..self.lattice.slots.len() {
            for k in 1i64.. {
                let weight = match self.lattice.slots[slot].iso {
                    IsoClass::Even | IsoClass::IsoI => k,
                    IsoClass::IsoHat => k - 1,
                };
                if weight > w {
                    break;
                }
                gens.push((self.gen(slot, k), weight));
            }
        }
        gens.sort();
        let mut out = Vec::new();
        let mut current: Vec<(GeneratorId, u32)> = Vec::new();
        fn rec(
            gens: &[(GeneratorId, i64)],
            from: usize,
            remaining: i64,
            current: &mut Vec<(GeneratorId, u32)>,
            out: &mut Vec<Monomial>,
        ) {
            if from == gens.len() {
                if remaining == 0 {
                    out.push(Monomial::from_factors(current).expect("canonical").0);
                }
                return;
            }
            let (g, wt) = gens[from];
            let max_e: i64 = if g.is_odd() {
                1
            } else {
                debug_assert!(wt > 0, "even generators have positive weight");
                remaining / wt
            };
            for e in 0..=max_e {
                if wt * e > remaining {
                    break;
                }
                if e > 0 {
                    current.push((g, e as u32));
                }
                rec(gens, from + 1, remaining - wt * e, current, out);
                if e > 0 {
                    current.pop();
                }
            }
        }
        rec(&gens, 0, w, &mut current, &mut out);
        out
    }

    /// True iff a - b lies in the image of the translation operator, decided
    /// by exact linear algebra on the finite spanning set of translated
    /// monomials in each sector and degree.
    pub fn equal_mod_t(&self, a: &VAState, b: &VAState) -> Result<bool, VaError> {
        let diff = a.sub(b);
        for (sector, poly) in diff.sectors() {
            let Some(d) = poly.homogeneous_degree() else {
                return Err(VaError::Inhomogeneous);
            };
            let span: Vec<SuperPoly> = self
                .monomials_of_degree(d - 2)
                .into_iter()
                .filter_map(|m| {
                    let t = self.translate(&VAState::from_parts(
                        sector.clone(),
                        SuperPoly::from_mono(m),
                    ));
                    t.sectors.get(sector).cloned().filter(|p| !p.is_zero())
                })
                .collect();
            match crate::superalgebra::graded_solve(&span, poly) {
                Ok(Some(_)) => {}
                Ok(None) => return Ok(false),
                Err(_) => return Err(VaError::Inhomogeneous),
            }
        }
        Ok(true)
    }

    /// An even vector pairing to 1 against the sector, for the primary lift.
    pub fn find_bracket_dual(&self, sector: &Sector) -> Result<Vec<(usize, Rat)>, VaError> {
        if sector.is_zero() {
            return Err(VaError::TorsionSector);
        }
        for s in self.even_slots() {
            let q = self.lattice.q_slot_sector(s, &sector.0);
            if !q.is_zero() {
                return Ok(vec![(s, q.recip())]);
            }
        }
        Err(VaError::NoDualVector)
    }

    /// The lift -a_(0)(e^0 (x) b_{-1}) of a sector state; equal to a modulo
    /// translation, and primary exactly when a kills the conformal element.
    pub fn primary_lift(
        &self,
        a: &VAState,
        b: Option<Vec<(usize, Rat)>>,
    ) -> Result<VAState, VaError> {
        let (sector, _) = a.single_sector().ok_or(VaError::NotSingleSector)?;
        let b = match b {
            Some(b) => b,
            None => self.find_bracket_dual(sector)?,
        };
        let b_state =
            VAState::from_parts(Sector::zero(self.sector_dim()), self.vector_element(&b, 1));
        Ok(self.mode(a, 0, &b_state).neg())
    }

    pub fn slot_name(&self, slot: usize) -> String {
        let s = &self.lattice.slots[slot];
        let base = &self.lattice.geometry.basis[s.basis].name;
        if self.lattice.pair {
            format!("{}{}", crate::geometry::side_tag(s.side), base)
        } else {
            base.clone()
        }
    }

    pub fn gen_name(&self, g: GeneratorId) -> String {
        match g.family {
            Family::Lattice { k, slot } => {
                format!("v[{},-{}]", self.slot_name(slot as usize), k)
            }
            _ => format!("{:?}", g.family),
        }
    }

    pub fn render(&self, s: &VAState) -> String {
        if s.is_zero() {
            return "0".into();
        }
        s.sectors()
            .map(|(sec, p)| {
                format!(
                    "e[{}]⊗({})",
                    sec.0
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                    p.render(&|g| self.gen_name(g))
                )
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Coefficient of the z^{-m-1} mode in the k-th derivative of a field,
/// relative to the underlying mode v_{(m-k)}: (-1)^k·(m-k+1)(m-k+2)···m.
fn derivative_coefficient(k: i64, m: i64) -> Rat {
    let mut acc = Rat::one();
    for t in (m - k + 1)..=m {
        acc *= rint(t);
    }
    if k % 2 == 1 {
        -acc
    } else {
        acc
    }
}

impl SuperPoly {
    pub fn from_mono(m: Monomial) -> SuperPoly {
        let mut p = SuperPoly::zero();
        p.add_term(m, Rat::one());
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rfrac;

    fn curve_pair(g: u32) -> LatticeVA {
        LatticeVA::new(TargetGeometry::curve(g), true).unwrap()
    }

    fn slot_named(va: &LatticeVA, name: &str) -> usize {
        (0..va.lattice.slots.len())
            .find(|&s| va.slot_name(s) == name)
            .unwrap()
    }

    fn single_gen_state(va: &LatticeVA, slot: usize, k: i64) -> VAState {
        VAState::from_parts(
            Sector::zero(va.sector_dim()),
            SuperPoly::generator(va.gen(slot, k)),
        )
    }

    #[test]
    fn central_charges() {
        for g in 0..3u32 {
            let va = curve_pair(g);
            assert_eq!(va.central_charge().unwrap(), rint(2 * (2 - 2 * g as i64)));
            // pair lattice of a genus-g curve: even rank 4, odd rank 4g
            let evens = va.even_slots().len();
            assert_eq!(evens, 4);
            assert_eq!(va.lattice.slots.len() - evens, 4 * g as usize);
        }
        let p2 = LatticeVA::new(TargetGeometry::p2(), true).unwrap();
        assert_eq!(p2.central_charge().unwrap(), rint(6));
        // the single p2 lattice is already nondegenerate, central charge 3
        let p2s = LatticeVA::new(TargetGeometry::p2(), false).unwrap();
        assert_eq!(p2s.central_charge().unwrap(), rint(3));
        // single curve lattices are degenerate: conformal data refused
        let c1 = LatticeVA::new(TargetGeometry::curve(1), false).unwrap();
        assert!(c1.conformal.is_none());
        assert!(c1
            .conformal_refusal
            .as_deref()
            .unwrap()
            .contains("degenerate pairing"));
    }

    #[test]
    fn single_lattice_conformal_structure() {
        // the single plane lattice has a nondegenerate symmetrized pairing,
        // so Kac's construction applies without passing to pairs: purely
        // bosonic, central charge 3
        let va = LatticeVA::new(TargetGeometry::p2(), false).unwrap();
        let c = va.central_charge().unwrap();
        assert_eq!(c, rint(3));
        // vacuum extraction and a bracket with central term
        let down = va.virasoro(-2, &va.vacuum()).unwrap();
        let back = va.virasoro(2, &down).unwrap();
        assert_eq!(back, va.vacuum().scale(&(c / rint(2))));
        for s in [
            va.vacuum(),
            single_gen_state(&va, 0, 1),
            single_gen_state(&va, 2, 2),
        ] {
            for (n, m) in [(1i64, -1i64), (2, -1), (-2, 1), (2, 0)] {
                let lhs = va
                    .virasoro(n, &va.virasoro(m, &s).unwrap())
                    .unwrap()
                    .sub(&va.virasoro(m, &va.virasoro(n, &s).unwrap()).unwrap());
                let mut rhs = va.virasoro(n + m, &s).unwrap().scale(&rint(n - m));
                if n + m == 0 {
                    let central = rint(n * n * n - n) / rint(12) * va.central_charge().unwrap();
                    rhs = rhs.add(&s.scale(&central));
                }
                assert_eq!(lhs, rhs, "single-lattice bracket ({n},{m})");
            }
        }
        // L_{-1} agrees with translation on a sector state
        let mut alpha = Sector::zero(va.sector_dim());
        alpha.0[0] = 1;
        let a = va.sector_state(alpha);
        assert_eq!(va.virasoro(-1, &a).unwrap(), va.translate(&a));
    }

    #[test]
    fn golden_conformal_element() {
        // the genus-1 pair conformal element, byte-exact: two even terms
        // from the framing/sheaf duality and one term per isotropic pair
        let va = curve_pair(1);
        let omega = &va.conformal().unwrap().omega;
        assert_eq!(
            va.render(omega),
            "e[0,0,0,0]⊗(-1·v[V.1,-1]·v[F.pt,-1] + -1·v[V.e1,-1]·v[F.f1,-2] \
             + 1·v[V.pt,-1]·v[F.1,-1] + 1·v[F.e1,-1]·v[V.f1,-2])"
        );
    }

    #[test]
    fn vacuum_axiom() {
        let va = curve_pair(1);
        let a = single_gen_state(&va, slot_named(&va, "F.1"), 1);
        // a_(-1)|0> = a
        assert_eq!(va.mode(&a, -1, &va.vacuum()), a);
        // a_(n)|0> = 0 for n >= 0
        for n in 0..3 {
            assert!(va.mode(&a, n, &va.vacuum()).is_zero());
        }
        // a_(-2)|0> = T(a)
        assert_eq!(va.mode(&a, -2, &va.vacuum()), va.translate(&a));
    }

    #[test]
    fn bosonic_and_fermionic_pairings() {
        let va = curve_pair(1);
        let v = slot_named(&va, "F.1");
        let w = slot_named(&va, "V.pt");
        let q = va.gram[v][w].clone();
        assert!(!q.is_zero());
        let a = single_gen_state(&va, v, 1);
        let b = single_gen_state(&va, w, 1);
        // even: (v_{-1})_(1)(w_{-1}) = Q(v,w)|0>
        assert_eq!(va.mode(&a, 1, &b), va.vacuum().scale(&q));
        // odd: (v_{-1})_(0)(w_{-1}) = Q(v,w)|0>
        let e = slot_named(&va, "F.e1");
        let f = slot_named(&va, "V.f1");
        let qef = va.gram[e][f].clone();
        assert!(!qef.is_zero());
        let ae = single_gen_state(&va, e, 1);
        let bf = single_gen_state(&va, f, 1);
        assert_eq!(va.mode(&ae, 0, &bf), va.vacuum().scale(&qef));
    }

    #[test]
    fn exponential_mode_sign() {
        // the z^{Q(alpha,beta)} mode of e^alpha on e^beta is
        // (-1)^{q(alpha,beta)} e^{alpha+beta}
        let va = curve_pair(0);
        let dim = va.sector_dim();
        for ai in 0..dim {
            for bi in 0..dim {
                let mut alpha = Sector::zero(dim);
                alpha.0[ai] = 1;
                let mut beta = Sector::zero(dim);
                beta.0[bi] = 1;
                let q = to_i64(&va.lattice.q_sectors(&alpha.0, &beta.0)).unwrap();
                let qsym = to_i64(&va.lattice.q_sym_sectors(&alpha.0, &beta.0)).unwrap();
                let n = -qsym - 1;
                let got = va.mode(
                    &va.sector_state(alpha.clone()),
                    n,
                    &va.sector_state(beta.clone()),
                );
                let expected = va
                    .sector_state(alpha.add(&beta))
                    .scale(&if q.rem_euclid(2) == 1 {
                        -Rat::one()
                    } else {
                        Rat::one()
                    });
                assert_eq!(got, expected, "sectors {ai},{bi}");
            }
        }
    }

    #[test]
    fn translation_rules() {
        let va = curve_pair(1);
        let v = slot_named(&va, "F.1");
        // T(v_{-1}) = v_{-2}
        let a = single_gen_state(&va, v, 1);
        assert_eq!(va.translate(&a), single_gen_state(&va, v, 2));
        // T|0> = 0
        assert!(va.translate(&va.vacuum()).is_zero());
        // T(e^alpha) = e^alpha (x) alpha_{-1}
        let mut alpha = Sector::zero(va.sector_dim());
        alpha.0[0] = 1;
        let t = va.translate(&va.sector_state(alpha.clone()));
        let coords = va.sector_slot_coords(&alpha);
        let expected = VAState::from_parts(alpha, va.vector_element(&coords, 1));
        assert_eq!(t, expected);
    }

    #[test]
    fn translation_covariance() {
        // (Ta)_(n) = -n·a_(n-1) on sampled states
        let va = curve_pair(1);
        let a = single_gen_state(&va, slot_named(&va, "F.e1"), 1);
        let b = {
            let s1 = single_gen_state(&va, slot_named(&va, "V.f1"), 2);
            let s2 = single_gen_state(&va, slot_named(&va, "F.pt"), 1);
            va.mode(&s1, -1, &s2) // product state f1_{-2}·pt_{-1}
        };
        let ta = va.translate(&a);
        for n in -3..3i64 {
            let lhs = va.mode(&ta, n, &b);
            let rhs = va.mode(&a, n - 1, &b).scale(&rint(-n));
            assert_eq!(lhs, rhs, "n={n}");
        }
    }

    #[test]
    fn virasoro_basics() {
        let va = curve_pair(1);
        // L_n |0> = 0 for n >= -1
        for n in -1..4i64 {
            assert!(va.virasoro(n, &va.vacuum()).unwrap().is_zero(), "n={n}");
        }
        // even v: L_0(v_{-k}) = k·v_{-k}
        let v = slot_named(&va, "F.pt");
        for k in 1..4i64 {
            let a = single_gen_state(&va, v, k);
            assert_eq!(va.virasoro(0, &a).unwrap(), a.scale(&rint(k)));
        }
        // L_1(v_{-2}) = 2·v_{-1}
        let a2 = single_gen_state(&va, v, 2);
        assert_eq!(
            va.virasoro(1, &a2).unwrap(),
            single_gen_state(&va, v, 1).scale(&rint(2))
        );
        // L_{-1} = T on a few states
        for s in [
            single_gen_state(&va, v, 1),
            single_gen_state(&va, slot_named(&va, "F.e1"), 1),
            single_gen_state(&va, slot_named(&va, "V.f1"), 2),
        ] {
            assert_eq!(va.virasoro(-1, &s).unwrap(), va.translate(&s));
        }
    }

    #[test]
    fn virasoro_vs_omega_modes() {
        // the normal-ordered sum agrees with the modes of the conformal
        // element computed through the general reconstruction
        let va = curve_pair(1);
        let omega = va.conformal().unwrap().omega.clone();
        let states = [
            single_gen_state(&va, slot_named(&va, "F.1"), 1),
            single_gen_state(&va, slot_named(&va, "F.e1"), 2),
            single_gen_state(&va, slot_named(&va, "V.f1"), 1),
        ];
        for s in &states {
            for n in -2..3i64 {
                let sum = va.virasoro(n, s).unwrap();
                let via_modes = va.mode(&omega, n + 1, s);
                assert_eq!(sum, via_modes, "n={n}");
            }
        }
    }

    #[test]
    fn central_charge_via_modes() {
        // L_2 L_{-2} |0> = (c/2)|0>
        for va in [
            curve_pair(0),
            curve_pair(1),
            curve_pair(2),
            LatticeVA::new(TargetGeometry::p2(), true).unwrap(),
        ] {
            let down = va.virasoro(-2, &va.vacuum()).unwrap();
            let back = va.virasoro(2, &down).unwrap();
            let c = va.central_charge().unwrap();
            assert_eq!(back, va.vacuum().scale(&(c / rint(2))));
        }
    }

    #[test]
    fn conformal_weights() {
        let va = curve_pair(1);
        // weight of an Ihat generator at depth 1 is zero
        let f = slot_named(&va, "F.f1");
        let s = single_gen_state(&va, f, 1);
        if let Some((sec, p)) = s.single_sector() {
            for (m, _) in p.terms() {
                assert_eq!(va.conformal_weight_of(sec, m), rint(0));
            }
        }
        // L_0 acts by the conformal weight
        let e = slot_named(&va, "F.e1");
        let se = single_gen_state(&va, e, 2);
        assert_eq!(va.virasoro(0, &se).unwrap(), se.scale(&rint(2)));
        assert_eq!(va.virasoro(0, &s).unwrap(), VAState::zero());
    }

    #[test]
    fn primary_states() {
        let va = curve_pair(1);
        // |0> is primary of weight 0
        let rep = va.is_primary(&va.vacuum(), None).unwrap();
        assert!(rep.primary && rep.homogeneous);
        assert_eq!(rep.weights, vec![rint(0)]);
        // e^0 (x) b_{-1} is primary of weight 1 for every even b
        for s in va.even_slots() {
            let b = single_gen_state(&va, s, 1);
            let rep = va.is_primary(&b, None).unwrap();
            assert!(rep.primary, "slot {s}");
            assert_eq!(rep.weights, vec![rint(1)]);
        }
        // v_{-2} is not primary: the L_1 image is 2·v_{-1}
        let v = slot_named(&va, "F.pt");
        let rep = va.is_primary(&single_gen_state(&va, v, 2), None).unwrap();
        assert!(!rep.primary);
        assert_eq!(rep.failed_at, Some(1));
    }

    #[test]
    fn equal_mod_t_examples() {
        let va = curve_pair(0);
        let v = slot_named(&va, "F.1");
        let a = single_gen_state(&va, v, 1);
        // T(x) == 0 mod T
        assert!(va.equal_mod_t(&va.translate(&a), &VAState::zero()).unwrap());
        // v_{-2} == 0 mod T (it is T(v_{-1}))
        assert!(va
            .equal_mod_t(&single_gen_state(&va, v, 2), &VAState::zero())
            .unwrap());
        // v_{-1} != 0 mod T
        assert!(!va.equal_mod_t(&a, &VAState::zero()).unwrap());
    }

    #[test]
    fn skew_symmetry_small() {
        // a_(n)b = sum_i (-1)^{|a||b|+i+n+1} T^i/i! (b_(n+i)a)
        let va = curve_pair(1);
        let a = single_gen_state(&va, slot_named(&va, "F.e1"), 1);
        let b = single_gen_state(&va, slot_named(&va, "V.f1"), 2);
        for n in -2..2i64 {
            let lhs = va.mode(&a, n, &b);
            let mut rhs = VAState::zero();
            let bound = va.mode_upper_bound(&b, &a);
            let mut i = 0i64;
            while n + i <= bound {
                let mut term = va.mode(&b, n + i, &a);
                for _ in 0..i {
                    term = va.translate(&term);
                }
                let coeff = crate::rat::factorial(i as u64).recip();
                // |a| = |b| = 1 here
                let sign = if (1 + i + n + 1).rem_euclid(2) == 0 {
                    Rat::one()
                } else {
                    -Rat::one()
                };
                rhs = rhs.add(&term.scale(&(sign * &coeff)));
                i += 1;
            }
            assert_eq!(lhs, rhs, "n={n}");
        }
    }

    #[test]
    fn primary_lift_roundtrip() {
        // The equivalence "kills omega iff the lift is primary" concerns
        // weight-one states (degree-zero classes of the quotient Lie
        // algebra). Sweep the weight-one component of a few sectors: on the
        // omega-bracket nullspace the lift must be primary; off it, not.
        for (g, sector_idx) in [(0u32, 2usize), (1, 2), (1, 0)] {
            let va = curve_pair(g);
            let dim = va.sector_dim();
            let mut alpha = Sector::zero(dim);
            alpha.0[sector_idx] = 1;
            let base = va.lattice.q_sym_sectors(&alpha.0, &alpha.0) * rfrac(1, 2);
            let Some(contrib) = to_i64(&(rint(1) - base)) else {
                continue;
            };
            if contrib < 0 {
                continue;
            }
            let monos = va.monomials_of_weight(contrib);
            let states: Vec<VAState> = monos
                .iter()
                .map(|m| VAState::from_parts(alpha.clone(), SuperPoly::from_mono(m.clone())))
                .collect();
            // assemble the omega-bracket map on the weight-one component
            let brackets: Vec<VAState> = states
                .iter()
                .map(|s| va.omega_bracket(s).unwrap())
                .collect();
            let mut seen = 0;
            for (i, a) in states.iter().enumerate() {
                let lift = match va.primary_lift(a, None) {
                    Ok(l) => l,
                    Err(VaError::NoDualVector) => continue,
                    Err(e) => panic!("{e}"),
                };
                assert!(va.equal_mod_t(&lift, a).unwrap(), "lift is a lift");
                let rep = va.is_primary(&lift, None).unwrap();
                assert_eq!(
                    brackets[i].is_zero(),
                    rep.primary,
                    "g={g} sector {sector_idx} monomial {i}"
                );
                seen += 1;
            }
            assert!(seen > 0);
        }
    }

    #[test]
    fn mode_upper_bound_is_sharp_enough() {
        // modes above the degree bound vanish; the truncated identity sums
        // rely on this
        let va = curve_pair(1);
        let states = [
            va.vacuum(),
            single_gen_state(&va, slot_named(&va, "F.pt"), 2),
            single_gen_state(&va, slot_named(&va, "F.e1"), 1),
            va.sector_state({
                let mut s = Sector::zero(va.sector_dim());
                s.0[0] = 1;
                s
            }),
        ];
        for a in &states {
            for b in &states {
                let bound = va.mode_upper_bound(a, b);
                for extra in 1..=3 {
                    assert!(
                        va.mode(a, bound + extra, b).is_zero(),
                        "mode above bound must vanish"
                    );
                }
            }
        }
    }

    #[test]
    fn torsion_sector_rejected() {
        let va = curve_pair(0);
        let a = va.vacuum();
        assert!(matches!(
            va.primary_lift(&a, None),
            Err(VaError::TorsionSector)
        ));
    }

    #[test]
    fn monomial_enumeration() {
        let va = curve_pair(1);
        // degree-2 monomials: even gens at k=1 (4 of them), and products of
        // two distinct odd depth-1 gens (C(4,2) = 6 of those), total 10
        let d2 = va.monomials_of_degree(2);
        assert_eq!(d2.len(), 10);
        for m in &d2 {
            assert_eq!(m.degree(), 2);
        }
        // weight-0 monomials: subsets of the 2g Ihat depth-1 generators
        let w0 = va.monomials_of_weight(0);
        assert_eq!(w0.len(), 4);
        let c2 = curve_pair(2);
        assert_eq!(c2.monomials_of_weight(0).len(), 16);
        let _ = rfrac(1, 2);
    }
}
