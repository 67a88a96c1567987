//! Descendent algebras over a target geometry, in four flavors (full,
//! realized at a K-theory class, and their pair versions), together with the
//! derivation/multiplication operators acting on them: the raising
//! derivations, the quadratic diagonal terms, their sums, the normalized and
//! fixed-determinant variants, the weight-zero projector, and the twist
//! automorphisms.

use crate::geometry::{CohClass, GeometryError, KunnethPair, TargetGeometry};
use crate::rat::{factorial, rint, Rat};
use crate::superalgebra::{Family, GeneratorId, Parity, Side, SuperPoly};
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Clone, Debug)]
pub enum Flavor {
    Full,
    /// Realized at a K-class: degree-zero symbols become the scalars
    /// ∫ gamma·ch(alpha).
    AtAlpha(CohClass),
    Pair,
    PairAtAlpha([CohClass; 2]),
}

impl Flavor {
    pub fn is_pair(&self) -> bool {
        matches!(self, Flavor::Pair | Flavor::PairAtAlpha(_))
    }

    pub fn is_realized(&self) -> bool {
        matches!(self, Flavor::AtAlpha(_) | Flavor::PairAtAlpha(_))
    }
}

#[derive(Debug, Error)]
pub enum DescError {
    #[error("operator incompatible with algebra flavor: {0}")]
    FlavorMismatch(String),
    #[error("delta-normalization undefined: ∫ delta·ch(alpha) = 0")]
    DeltaNormalizationUndefined,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Debug)]
pub struct DescAlgebra {
    pub geometry: TargetGeometry,
    pub flavor: Flavor,
    todd_pairs: Vec<KunnethPair>,
    unit_pairs: Vec<KunnethPair>,
}

/// Operators on a descendent algebra, named by their action. Each is a sum
/// of a superderivation and a multiplication operator; all are even.
#[derive(Clone, Debug)]
pub enum DescOperator {
    /// Raising derivation of degree 2k.
    R(i32),
    /// Multiplication by the degree-2k diagonal element.
    T(i32),
    /// T with the framing correction for a fixed K-class V (given by ch(V)).
    TV(i32, CohClass),
    /// Pair version of T.
    TPair(i32),
    /// Normalized correction term for a reference class delta (realized
    /// flavors only).
    SDelta(i32, CohClass),
    /// Fixed-determinant correction built from the diagonal of the unit.
    SFixed(i32),
    L(i32),
    LDelta(i32, CohClass),
    LV(i32, CohClass),
    LPair(i32),
    /// L - (1/r)·SFixed with the rank r explicit.
    LFixed(i32, Rat),
    /// The weight-zero projector sum over L_j composed with lowering powers.
    LWt0,
    /// Algebra automorphism twisting every argument class by exp(H).
    FTwist(CohClass),
    /// exp(c·R_{-1}) for a rational scalar c.
    ETwist(Rat),
    /// The normalization homomorphism onto the weight-zero subalgebra for a
    /// reference class delta (realized flavors only).
    EtaNorm(CohClass),
}

impl DescAlgebra {
    fn build(geometry: TargetGeometry, flavor: Flavor) -> Self {
        let todd_pairs = geometry
            .diagonal_kunneth(&geometry.todd.clone())
            .expect("todd is even");
        let unit_pairs = geometry
            .diagonal_kunneth(&geometry.unit())
            .expect("unit is even");
        DescAlgebra {
            geometry,
            flavor,
            todd_pairs,
            unit_pairs,
        }
    }

    pub fn full(geometry: TargetGeometry) -> Self {
        Self::build(geometry, Flavor::Full)
    }

    pub fn at_alpha(geometry: TargetGeometry, alpha: CohClass) -> Self {
        Self::build(geometry, Flavor::AtAlpha(alpha))
    }

    pub fn pair(geometry: TargetGeometry) -> Self {
        Self::build(geometry, Flavor::Pair)
    }

    pub fn pair_at_alpha(geometry: TargetGeometry, alphas: [CohClass; 2]) -> Self {
        Self::build(geometry, Flavor::PairAtAlpha(alphas))
    }

    fn hodge_shift(&self, b: usize) -> i64 {
        let cls = &self.geometry.basis[b];
        (cls.p as i64 - cls.q as i64).div_euclid(2)
    }

    fn hol_degree(&self, i: i64, b: usize) -> i64 {
        let cls = &self.geometry.basis[b];
        2 * i - cls.p as i64 + cls.q as i64
    }

    fn top_degree(&self, i: i64, b: usize) -> i64 {
        let odd = self.geometry.basis[b].parity() == Parity::Odd;
        2 * i - if odd { 1 } else { 0 }
    }

    pub fn hol_gen(&self, side: Option<Side>, i: u32, b: usize) -> GeneratorId {
        let degree = self.hol_degree(i as i64, b);
        let family = match side {
            None => Family::DescHol { i, basis: b as u16 },
            Some(side) => Family::DescPairHol {
                side,
                i,
                basis: b as u16,
            },
        };
        GeneratorId::new(family, degree)
    }

    pub fn top_gen(&self, side: Option<Side>, i: u32, b: usize) -> GeneratorId {
        let degree = self.top_degree(i as i64, b);
        let family = match side {
            None => Family::DescTop { i, basis: b as u16 },
            Some(side) => Family::DescPairTop {
                side,
                i,
                basis: b as u16,
            },
        };
        GeneratorId::new(family, degree)
    }

    /// ch^H_i of a basis class as an element (zero when i < 0).
    pub fn hol(&self, side: Option<Side>, i: i64, b: usize) -> SuperPoly {
        if i < 0 {
            return SuperPoly::zero();
        }
        SuperPoly::generator(self.hol_gen(side, i as u32, b))
    }

    /// ch^H_i of a general class, by linearity.
    pub fn hol_of_class(&self, side: Option<Side>, i: i64, class: &CohClass) -> SuperPoly {
        let mut out = SuperPoly::zero();
        if i < 0 {
            return out;
        }
        for (b, c) in class.0.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.hol(side, i, b).scale(c));
            }
        }
        out
    }

    fn sides(&self) -> Vec<Option<Side>> {
        if self.flavor.is_pair() {
            vec![Some(Side::V), Some(Side::F)]
        } else {
            vec![None]
        }
    }

    fn alpha_for(&self, side: Option<Side>) -> Option<&CohClass> {
        match (&self.flavor, side) {
            (Flavor::AtAlpha(a), None) => Some(a),
            (Flavor::PairAtAlpha(a), Some(Side::V)) => Some(&a[0]),
            (Flavor::PairAtAlpha(a), Some(Side::F)) => Some(&a[1]),
            _ => None,
        }
    }

    /// Scalar realization ∫ gamma_b · ch(alpha) of a degree-zero symbol.
    fn scalar_realization(&self, side: Option<Side>, b: usize) -> Rat {
        let alpha = self
            .alpha_for(side)
            .expect("scalar realization requires a realized flavor");
        let gamma = CohClass::basis(self.geometry.rank(), b);
        self.geometry.cup_and_integrate(&[gamma, alpha.clone()])
    }

    /// The realization homomorphism p_alpha from the full flavor onto the
    /// algebra at alpha: positive-degree symbols reindex, degree-zero symbols
    /// become scalars, negative-degree symbols die.
    pub fn project_alpha(&self, target: &DescAlgebra, d: &SuperPoly) -> SuperPoly {
        d.apply_hom(&mut |g| {
            let (side, i, b) = match g.family {
                Family::DescHol { i, basis } => (None, i as i64, basis as usize),
                Family::DescPairHol { side, i, basis } => (Some(side), i as i64, basis as usize),
                _ => return SuperPoly::generator(g),
            };
            let degree = target.hol_degree(i, b);
            if degree > 0 {
                let top_index = i - target.hodge_shift(b);
                SuperPoly::generator(target.top_gen(side, top_index as u32, b))
            } else if degree == 0 {
                SuperPoly::scalar(target.scalar_realization(side, b))
            } else {
                SuperPoly::zero()
            }
        })
    }

    /// The raising derivation applied to one generator.
    fn r_act(&self, k: i32, g: GeneratorId) -> SuperPoly {
        let k = k as i64;
        match g.family {
            Family::DescHol { i, basis } | Family::DescPairHol { i, basis, .. } => {
                let side = match g.family {
                    Family::DescPairHol { side, .. } => Some(side),
                    _ => None,
                };
                let i = i as i64;
                if i + k < 0 {
                    return SuperPoly::zero();
                }
                let coeff = raising_coefficient(i, k);
                self.hol(side, i + k, basis as usize).scale(&coeff)
            }
            Family::DescTop { i, basis } | Family::DescPairTop { i, basis, .. } => {
                let side = match g.family {
                    Family::DescPairTop { side, .. } => Some(side),
                    _ => None,
                };
                let (i, b) = (i as i64, basis as usize);
                let h = i + self.hodge_shift(b);
                if h + k < 0 {
                    return SuperPoly::zero();
                }
                let coeff = raising_coefficient(h, k);
                if coeff.is_zero() {
                    return SuperPoly::zero();
                }
                let target_degree = self.top_degree(i + k, b);
                if target_degree > 0 {
                    SuperPoly::generator(self.top_gen(side, (i + k) as u32, b)).scale(&coeff)
                } else if target_degree == 0 {
                    SuperPoly::scalar(self.scalar_realization(side, b) * coeff)
                } else {
                    SuperPoly::zero()
                }
            }
            _ => SuperPoly::zero(),
        }
    }

    pub fn raising(&self, k: i32, d: &SuperPoly) -> SuperPoly {
        d.apply_derivation(Parity::Even, &mut |g| self.r_act(k, g))
    }

    /// The derivation twisting by a class: ch^H_i(gamma') -> ch^H_{i-1}
    /// (gamma·gamma'), with parity that of gamma. Full/pair flavors only.
    pub fn lowering_twisted(&self, gamma: &CohClass, d: &SuperPoly) -> SuperPoly {
        let parity = self
            .geometry
            .class_parity(gamma)
            .expect("twisting class must be parity-homogeneous");
        d.apply_derivation(parity, &mut |g| {
            let (side, i, b) = match g.family {
                Family::DescHol { i, basis } => (None, i as i64, basis as usize),
                Family::DescPairHol { side, i, basis } => (Some(side), i as i64, basis as usize),
                _ => return SuperPoly::zero(),
            };
            if i == 0 {
                return SuperPoly::zero();
            }
            let product = self
                .geometry
                .cup(gamma, &CohClass::basis(self.geometry.rank(), b));
            self.hol_of_class(side, i - 1, &product)
        })
    }

    /// The multiplication element of T(k), TV(k, V), or TPair(k), in the
    /// algebra's own flavor (realized flavors project the element).
    pub fn t_element(&self, op: &DescOperator) -> Result<SuperPoly, DescError> {
        let raw = match op {
            DescOperator::T(k) => self.t_element_raw(*k, false),
            DescOperator::TV(k, v) => {
                if self.flavor.is_pair() {
                    return Err(DescError::FlavorMismatch("TV needs a sheaf flavor".into()));
                }
                let correction = self
                    .geometry
                    .cup(&self.geometry.ch_dual(v), &self.geometry.todd);
                self.t_element_raw(*k, false).sub(
                    &self
                        .hol_of_class(None, *k as i64, &correction)
                        .scale(&factorial(u64::try_from(*k).unwrap_or(0))),
                )
            }
            DescOperator::TPair(k) => {
                if !self.flavor.is_pair() {
                    return Err(DescError::FlavorMismatch(
                        "TPair needs a pair flavor".into(),
                    ));
                }
                self.t_element_raw(*k, true)
            }
            DescOperator::SFixed(k) => {
                // the sum of the multiplication elements of the
                // fixed-determinant correction (holomorphic column 0 only)
                let mut acc = SuperPoly::zero();
                for p in &self.unit_pairs {
                    if self.geometry.basis[p.left].p == 0 {
                        acc = acc.add(&self.hol_of_class(None, *k as i64 + 1, &p.right));
                    }
                }
                acc.scale(&factorial((*k + 1) as u64))
            }
            _ => {
                return Err(DescError::FlavorMismatch(
                    "not a multiplication operator".into(),
                ))
            }
        };
        Ok(self.realize_if_needed(raw))
    }

    fn realize_if_needed(&self, d: SuperPoly) -> SuperPoly {
        match &self.flavor {
            Flavor::Full | Flavor::Pair => d,
            Flavor::AtAlpha(_) | Flavor::PairAtAlpha(_) => self.project_alpha(self, &d),
        }
    }

    /// sum_{i+j=k} (-1)^{dim - p^L} i! j! ch^H_i(left) ch^H_j(right) over the
    /// Künneth pairs of the Todd diagonal; in the pair version the left
    /// factor is the F-V combination and the right factor lives on F.
    fn t_element_raw(&self, k: i32, pair: bool) -> SuperPoly {
        let mut acc = SuperPoly::zero();
        if k < 0 {
            return acc;
        }
        let dim = self.geometry.dimension as i64;
        for i in 0..=k {
            let j = k - i;
            let weight = factorial(i as u64) * factorial(j as u64);
            for p in &self.todd_pairs {
                let sign = if (dim - self.geometry.basis[p.left].p as i64).rem_euclid(2) == 0 {
                    Rat::one()
                } else {
                    -Rat::one()
                };
                let left = if pair {
                    self.hol(Some(Side::F), i as i64, p.left).sub(&self.hol(
                        Some(Side::V),
                        i as i64,
                        p.left,
                    ))
                } else {
                    self.hol(None, i as i64, p.left)
                };
                let right_side = if pair { Some(Side::F) } else { None };
                let right = self.hol_of_class(right_side, j as i64, &p.right);
                acc = acc.add(&left.mul(&right).scale(&(sign * &weight)));
            }
        }
        acc
    }

    /// ∫ delta·ch(alpha) for the algebra's realized class (sheaf side; the F
    /// side for pairs).
    fn delta_scalar(&self, delta: &CohClass) -> Result<Rat, DescError> {
        let alpha = match &self.flavor {
            Flavor::AtAlpha(a) => a,
            Flavor::PairAtAlpha(a) => &a[1],
            _ => {
                return Err(DescError::FlavorMismatch(
                    "normalized operators need a realized flavor".into(),
                ))
            }
        };
        let r = self
            .geometry
            .cup_and_integrate(&[delta.clone(), alpha.clone()]);
        if r.is_zero() {
            return Err(DescError::DeltaNormalizationUndefined);
        }
        Ok(r)
    }

    /// ch^H_i(delta) expressed in the algebra's own flavor.
    fn hol_realized(&self, i: i64, delta: &CohClass) -> SuperPoly {
        let side = if self.flavor.is_pair() {
            Some(Side::F)
        } else {
            None
        };
        self.realize_if_needed(self.hol_of_class(side, i, delta))
    }

    /// Largest total raising index present, bounding how many lowerings kill
    /// the element.
    fn lowering_depth(&self, d: &SuperPoly) -> i64 {
        d.terms()
            .map(|(m, _)| {
                m.factors()
                    .iter()
                    .map(|&(g, e)| {
                        let i = match g.family {
                            Family::DescHol { i, .. }
                            | Family::DescTop { i, .. }
                            | Family::DescPairHol { i, .. }
                            | Family::DescPairTop { i, .. } => i as i64,
                            _ => 0,
                        };
                        i * e as i64
                    })
                    .sum::<i64>()
            })
            .max()
            .unwrap_or(0)
    }

    pub fn apply(&self, op: &DescOperator, d: &SuperPoly) -> Result<SuperPoly, DescError> {
        match op {
            DescOperator::R(k) => Ok(self.raising(*k, d)),
            DescOperator::T(_) | DescOperator::TV(..) | DescOperator::TPair(_) => {
                Ok(self.t_element(op)?.mul(d))
            }
            DescOperator::SDelta(k, delta) => {
                let r = self.delta_scalar(delta)?;
                let element = self.hol_realized(*k as i64 + 1, delta);
                let coeff = -factorial((*k + 1) as u64) / r;
                Ok(self.raising(-1, &element.mul(d)).scale(&coeff))
            }
            DescOperator::SFixed(k) => {
                if self.flavor.is_realized() || self.flavor.is_pair() {
                    return Err(DescError::FlavorMismatch(
                        "SFixed acts on the full sheaf flavor".into(),
                    ));
                }
                let mut acc = SuperPoly::zero();
                for p in &self.unit_pairs {
                    if self.geometry.basis[p.left].p != 0 {
                        continue;
                    }
                    let gamma = CohClass::basis(self.geometry.rank(), p.left);
                    let element = self.hol_of_class(None, *k as i64 + 1, &p.right);
                    acc = acc.add(&self.lowering_twisted(&gamma, &element.mul(d)));
                }
                Ok(acc.scale(&factorial((*k + 1) as u64)))
            }
            DescOperator::L(k) => Ok(self
                .raising(*k, d)
                .add(&self.apply(&DescOperator::T(*k), d)?)),
            DescOperator::LV(k, v) => Ok(self
                .raising(*k, d)
                .add(&self.apply(&DescOperator::TV(*k, v.clone()), d)?)),
            DescOperator::LPair(k) => Ok(self
                .raising(*k, d)
                .add(&self.apply(&DescOperator::TPair(*k), d)?)),
            DescOperator::LDelta(k, delta) => Ok(self
                .apply(&DescOperator::L(*k), d)?
                .add(&self.apply(&DescOperator::SDelta(*k, delta.clone()), d)?)),
            DescOperator::LFixed(k, r) => {
                let base = self.apply(&DescOperator::L(*k), d)?;
                let corr = self.apply(&DescOperator::SFixed(*k), d)?;
                Ok(base.sub(&corr.scale(&(Rat::one() / r))))
            }
            DescOperator::LWt0 => {
                let mut acc = SuperPoly::zero();
                let mut lowered = d.clone();
                // j = -1 term: -L_{-1} with one extra lowering already folded
                // in by the loop structure below (R_{-1}^{j+1} with j = -1 is
                // the identity).
                let depth = self.lowering_depth(d);
                for j in -1..=depth as i32 {
                    if j >= 0 {
                        lowered = self.raising(-1, &lowered);
                        if lowered.is_zero() {
                            break;
                        }
                    }
                    let term = self.apply(&DescOperator::L(j), &lowered)?;
                    let sign = if j.rem_euclid(2) == 0 {
                        Rat::one()
                    } else {
                        -Rat::one()
                    };
                    let coeff = sign / factorial((j + 1) as u64);
                    acc = acc.add(&term.scale(&coeff));
                }
                Ok(acc)
            }
            DescOperator::FTwist(h) => {
                let exp_h = self.geometry.exp_class(h);
                Ok(d.apply_hom(&mut |g| {
                    let (side, i, b) = match g.family {
                        Family::DescHol { i, basis } => (None, i as i64, basis as usize),
                        Family::DescPairHol { side, i, basis } => {
                            (Some(side), i as i64, basis as usize)
                        }
                        _ => return SuperPoly::generator(g),
                    };
                    let twisted = self
                        .geometry
                        .cup(&exp_h, &CohClass::basis(self.geometry.rank(), b));
                    self.hol_of_class(side, i, &twisted)
                }))
            }
            DescOperator::ETwist(c) => {
                let mut acc = d.clone();
                let mut lowered = d.clone();
                let mut coeff = Rat::one();
                let depth = self.lowering_depth(d);
                for j in 1..=depth + 1 {
                    lowered = self.raising(-1, &lowered);
                    if lowered.is_zero() {
                        break;
                    }
                    coeff *= c.clone() / rint(j);
                    acc = acc.add(&lowered.scale(&coeff));
                }
                Ok(acc)
            }
            DescOperator::EtaNorm(delta) => {
                let r = self.delta_scalar(delta)?;
                let f = self.hol_realized(1, delta);
                let mut acc = d.clone();
                let mut lowered = d.clone();
                let mut f_power = SuperPoly::one();
                let mut coeff = Rat::one();
                let depth = self.lowering_depth(d);
                for j in 1..=depth + 1 {
                    lowered = self.raising(-1, &lowered);
                    if lowered.is_zero() {
                        break;
                    }
                    f_power = f_power.mul(&f);
                    coeff *= -(Rat::one() / &r) / rint(j);
                    acc = acc.add(&f_power.mul(&lowered).scale(&coeff));
                }
                Ok(acc)
            }
        }
    }

    /// True iff the lowering derivation kills the element exactly.
    pub fn is_weight0(&self, d: &SuperPoly) -> bool {
        self.raising(-1, d).is_zero()
    }

    /// All generators of degree <= degmax (plus the unit), the probe set for
    /// operator identities: operators here are derivations plus
    /// multiplications, so identities checked on generators and the unit
    /// extend to the whole algebra.
    pub fn probe_generators(&self, degmax: i64) -> Vec<SuperPoly> {
        let mut probes = vec![SuperPoly::one()];
        for side in self.sides() {
            for b in 0..self.geometry.rank() {
                let mut i = 0i64;
                loop {
                    let (deg, gen) = if self.flavor.is_realized() {
                        if i == 0 {
                            i = 1;
                            continue;
                        }
                        (self.top_degree(i, b), self.top_gen(side, i as u32, b))
                    } else {
                        (self.hol_degree(i, b), self.hol_gen(side, i as u32, b))
                    };
                    if deg > degmax {
                        break;
                    }
                    probes.push(SuperPoly::generator(gen));
                    i += 1;
                }
            }
        }
        probes
    }

    /// Human-readable generator names for rendering.
    pub fn gen_name(&self, g: GeneratorId) -> String {
        let class = |b: u16| self.geometry.basis[b as usize].name.clone();
        match g.family {
            Family::DescHol { i, basis } => format!("chH[{i}]({})", class(basis)),
            Family::DescTop { i, basis } => format!("ch[{i}]({})", class(basis)),
            Family::DescPairHol { side, i, basis } => format!(
                "chH[{i}]({}{})",
                crate::geometry::side_tag(side),
                class(basis)
            ),
            Family::DescPairTop { side, i, basis } => format!(
                "ch[{i}]({}{})",
                crate::geometry::side_tag(side),
                class(basis)
            ),
            _ => format!("{:?}", g.family),
        }
    }

    pub fn render(&self, d: &SuperPoly) -> String {
        d.render(&|g| self.gen_name(g))
    }
}

/// prod_{j=0}^{k} (i+j), with the empty product 1 for k = -1.
fn raising_coefficient(i: i64, k: i64) -> Rat {
    let mut acc = Rat::one();
    for j in 0..=k {
        acc *= rint(i + j);
    }
    acc
}

/// Evaluates [op1, op2] - expected on every probe and reports the first
/// nonzero defect. All operators here are even, so the bracket is the plain
/// commutator.
pub fn bracket_defect(
    alg: &DescAlgebra,
    op1: &DescOperator,
    op2: &DescOperator,
    expected: Option<(Rat, DescOperator)>,
    probes: &[SuperPoly],
) -> Result<Option<(usize, SuperPoly)>, DescError> {
    for (idx, probe) in probes.iter().enumerate() {
        let a = alg.apply(op1, &alg.apply(op2, probe)?)?;
        let b = alg.apply(op2, &alg.apply(op1, probe)?)?;
        let mut defect = a.sub(&b);
        if let Some((coeff, op)) = &expected {
            defect = defect.sub(&alg.apply(op, probe)?.scale(coeff));
        }
        if !defect.is_zero() {
            return Ok(Some((idx, defect)));
        }
    }
    Ok(None)
}
