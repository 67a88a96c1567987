//! Finite cohomology models of the target variety: Hodge-bigraded basis, cup
//! table, integration, Todd class, and the K-theory pairings and lattices
//! built from them. Everything downstream (descendent operators, vertex
//! algebras, dualities) is a function of this data.

use crate::linalg::QMatrix;
use crate::rat::{is_integer, parse_rat, rint, Rat};
use crate::superalgebra::{Parity, Side};
use num_traits::{One, Zero};
use serde::Deserialize;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisClass {
    pub name: String,
    pub p: u8,
    pub q: u8,
}

impl BasisClass {
    pub fn degree(&self) -> i64 {
        self.p as i64 + self.q as i64
    }

    pub fn parity(&self) -> Parity {
        Parity::of_degree(self.degree())
    }
}

/// A cohomology class in basis coordinates (always relative to one
/// `TargetGeometry`). Also used for K-theory classes via the Chern character
/// identification.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CohClass(pub Vec<Rat>);

impl CohClass {
    pub fn zero(n: usize) -> Self {
        CohClass(vec![Rat::zero(); n])
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.0[i] = Rat::one();
        v
    }

    pub fn add(&self, o: &CohClass) -> CohClass {
        CohClass(
            self.0
                .iter()
                .zip(&o.0)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        )
    }

    pub fn sub(&self, o: &CohClass) -> CohClass {
        CohClass(
            self.0
                .iter()
                .zip(&o.0)
                .map(|(a, b)| a.clone() - b)
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rat) -> CohClass {
        CohClass(self.0.iter().map(|a| a.clone() * c).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("unknown basis class `{0}`")]
    UnknownClass(String),
    #[error("class must be {0}-parity homogeneous")]
    MixedParity(String),
    #[error("odd twist rejected: diagonal twists must be even")]
    OddTwist,
}

#[derive(Clone, Debug)]
pub struct TargetGeometry {
    pub dimension: u8,
    pub basis: Vec<BasisClass>,
    /// cup[i][j] = coordinates of basis_i · basis_j
    cup: Vec<Vec<Vec<Rat>>>,
    /// integral of each basis class (nonzero only in top degree)
    integral: Vec<Rat>,
    pub todd: CohClass,
    pub label: String,
    /// the holomorphic Euler characteristic the preset supplies; `validate`
    /// checks it against the integral of the Todd class
    pub holomorphic_euler: Rat,
}

/// One Künneth component of a diagonal pushforward: the left factor is a
/// single basis class (hence bidegree-homogeneous, as the sign rules
/// require); the right factor is a general class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KunnethPair {
    pub left: usize,
    pub right: CohClass,
}

impl TargetGeometry {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn class_index(&self, name: &str) -> Result<usize, GeometryError> {
        self.basis
            .iter()
            .position(|b| b.name == name)
            .ok_or_else(|| GeometryError::UnknownClass(name.to_string()))
    }

    pub fn class_by_name(&self, name: &str) -> Result<CohClass, GeometryError> {
        Ok(CohClass::basis(self.rank(), self.class_index(name)?))
    }

    pub fn unit(&self) -> CohClass {
        CohClass::basis(self.rank(), 0)
    }

    pub fn cup_basis(&self, i: usize, j: usize) -> CohClass {
        CohClass(self.cup[i][j].clone())
    }

    pub fn cup(&self, a: &CohClass, b: &CohClass) -> CohClass {
        let mut out = CohClass::zero(self.rank());
        for (i, ca) in a.0.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.0.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let prod = ca.clone() * cb;
                for (t, cc) in self.cup[i][j].iter().enumerate() {
                    if !cc.is_zero() {
                        out.0[t] += prod.clone() * cc;
                    }
                }
            }
        }
        out
    }

    pub fn integrate(&self, a: &CohClass) -> Rat {
        a.0.iter()
            .zip(&self.integral)
            .map(|(c, w)| c.clone() * w)
            .sum()
    }

    /// Integral of the cup product of the classes in the given order.
    pub fn cup_and_integrate(&self, classes: &[CohClass]) -> Rat {
        let mut acc = self.unit();
        for c in classes {
            acc = self.cup(&acc, c);
        }
        self.integrate(&acc)
    }

    /// e^c for an even class c (finite: nilpotent in top degree).
    pub fn exp_class(&self, c: &CohClass) -> CohClass {
        let mut acc = self.unit();
        let mut power = self.unit();
        let mut fact = Rat::one();
        for n in 1..=(2 * self.dimension as usize) {
            power = self.cup(&power, c);
            fact *= rint(n as i64);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power.scale(&fact.clone().recip()));
        }
        acc
    }

    /// The component of `a` in Hodge column p (i.e. the part lying in
    /// H^{p,*}).
    pub fn hodge_column(&self, a: &CohClass, p: u8) -> CohClass {
        CohClass(
            a.0.iter()
                .enumerate()
                .map(|(i, c)| {
                    if self.basis[i].p == p {
                        c.clone()
                    } else {
                        Rat::zero()
                    }
                })
                .collect(),
        )
    }

    pub fn parity_component(&self, a: &CohClass, parity: Parity) -> CohClass {
        CohClass(
            a.0.iter()
                .enumerate()
                .map(|(i, c)| {
                    if self.basis[i].parity() == parity {
                        c.clone()
                    } else {
                        Rat::zero()
                    }
                })
                .collect(),
        )
    }

    pub fn class_parity(&self, a: &CohClass) -> Result<Parity, GeometryError> {
        let even = self.parity_component(a, Parity::Even);
        let odd = self.parity_component(a, Parity::Odd);
        match (even.is_zero(), odd.is_zero()) {
            (_, true) => Ok(Parity::Even),
            (true, false) => Ok(Parity::Odd),
            _ => Err(GeometryError::MixedParity("single".into())),
        }
    }

    /// K-theory dual through the Chern character: each degree-d component is
    /// scaled by (-1)^{floor(d/2)}.
    pub fn ch_dual(&self, a: &CohClass) -> CohClass {
        CohClass(
            a.0.iter()
                .enumerate()
                .map(|(i, c)| {
                    let d = self.basis[i].degree();
                    if d.div_euclid(2) % 2 == 0 {
                        c.clone()
                    } else {
                        -c.clone()
                    }
                })
                .collect(),
        )
    }

    /// Euler pairing chi(v, w) = ∫ ch(v^dual)·ch(w)·td.
    pub fn chi(&self, v: &CohClass, w: &CohClass) -> Rat {
        self.cup_and_integrate(&[self.ch_dual(v), w.clone(), self.todd.clone()])
    }

    pub fn chi_sym(&self, v: &CohClass, w: &CohClass) -> Rat {
        self.chi(v, w) + self.chi(w, v)
    }

    /// chi^H(v, w) = sum over Hodge columns p of (-1)^p ∫ ch(v)_p·ch(w)·td.
    pub fn chi_h(&self, v: &CohClass, w: &CohClass) -> Rat {
        let mut acc = Rat::zero();
        for p in 0..=self.dimension {
            let vp = self.hodge_column(v, p);
            if vp.is_zero() {
                continue;
            }
            let val = self.cup_and_integrate(&[vp, w.clone(), self.todd.clone()]);
            if p % 2 == 0 {
                acc += val;
            } else {
                acc -= val;
            }
        }
        acc
    }

    pub fn chi_pa(&self, v: &[CohClass; 2], w: &[CohClass; 2]) -> Rat {
        self.chi(&v[1].sub(&v[0]), &w[1])
    }

    pub fn chi_pa_sym(&self, v: &[CohClass; 2], w: &[CohClass; 2]) -> Rat {
        self.chi_pa(v, w) + self.chi_pa(w, v)
    }

    /// The supersymmetric Hodge-shifted pair pairing; inputs must be
    /// parity-homogeneous (they are paired through their parities).
    pub fn chi_h_pa_ssym(
        &self,
        v: &[CohClass; 2],
        w: &[CohClass; 2],
    ) -> Result<Rat, GeometryError> {
        let pv = self.pair_parity(v)?;
        let pw = self.pair_parity(w)?;
        let first = self.chi_h(&v[1].sub(&v[0]), &w[1]);
        let second = self.chi_h(&w[1].sub(&w[0]), &v[1]);
        let sign = if pv == Parity::Odd && pw == Parity::Odd {
            -Rat::one()
        } else {
            Rat::one()
        };
        Ok(first + sign * second)
    }

    pub fn pair_parity(&self, v: &[CohClass; 2]) -> Result<Parity, GeometryError> {
        let p0 = self.class_parity(&v[0]);
        let p1 = self.class_parity(&v[1]);
        match (v[0].is_zero(), v[1].is_zero()) {
            (true, true) => Ok(Parity::Even),
            (true, false) => p1,
            (false, true) => p0,
            (false, false) => {
                let (a, b) = (p0?, p1?);
                if a == b {
                    Ok(a)
                } else {
                    Err(GeometryError::MixedParity("pair".into()))
                }
            }
        }
    }

    /// Splits an odd class into its isotropic components (I, Ihat) where I is
    /// the q > p part and Ihat the p > q part.
    pub fn isotropic_split(&self, a: &CohClass) -> (CohClass, CohClass) {
        let mut i_part = CohClass::zero(self.rank());
        let mut hat_part = CohClass::zero(self.rank());
        for (idx, c) in a.0.iter().enumerate() {
            let b = &self.basis[idx];
            if b.parity() == Parity::Odd {
                if b.q > b.p {
                    i_part.0[idx] = c.clone();
                } else {
                    hat_part.0[idx] = c.clone();
                }
            }
        }
        (i_part, hat_part)
    }

    /// The conformal pairing on the pair lattice: chi_pa_sym on even inputs,
    /// Q(v_I, w_Ihat) - Q(v_Ihat, w_I) on odd inputs, zero on mixed.
    pub fn q_omega_pa(&self, v: &[CohClass; 2], w: &[CohClass; 2]) -> Result<Rat, GeometryError> {
        let pv = self.pair_parity(v)?;
        let pw = self.pair_parity(w)?;
        if pv != pw {
            return Ok(Rat::zero());
        }
        match pv {
            Parity::Even => Ok(self.chi_pa_sym(v, w)),
            Parity::Odd => {
                let vi = [self.isotropic_split(&v[0]).0, self.isotropic_split(&v[1]).0];
                let vh = [self.isotropic_split(&v[0]).1, self.isotropic_split(&v[1]).1];
                let wi = [self.isotropic_split(&w[0]).0, self.isotropic_split(&w[1]).0];
                let wh = [self.isotropic_split(&w[0]).1, self.isotropic_split(&w[1]).1];
                Ok(self.chi_pa_sym(&vi, &wh) - self.chi_pa_sym(&vh, &wi))
            }
        }
    }

    /// One entry point for every Euler-type pairing. Single-lattice variants
    /// read the sheaf-side classes of the pair arguments; pair variants use
    /// both sides.
    pub fn euler_pairing(
        &self,
        variant: EulerVariant,
        v: &[CohClass; 2],
        w: &[CohClass; 2],
    ) -> Result<Rat, GeometryError> {
        Ok(match variant {
            EulerVariant::Chi => self.chi(&v[1], &w[1]),
            EulerVariant::ChiSym => self.chi_sym(&v[1], &w[1]),
            EulerVariant::ChiH => self.chi_h(&v[1], &w[1]),
            EulerVariant::ChiPa => self.chi_pa(v, w),
            EulerVariant::ChiPaSym => self.chi_pa_sym(v, w),
            EulerVariant::ChiHPaSsym => self.chi_h_pa_ssym(v, w)?,
            EulerVariant::QOmega => self.q_omega_pa(v, w)?,
        })
    }

    /// Gram matrix of the Poincaré pairing ∫ basis_i · basis_j.
    pub fn poincare_gram(&self) -> QMatrix {
        let n = self.rank();
        let mut g = QMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                *g.at_mut(i, j) = self.integrate(&self.cup_basis(i, j));
            }
        }
        g
    }

    /// The integration-dual basis: dual[j] satisfies ∫ basis_i · dual[j] =
    /// delta_{ij}.
    pub fn dual_basis(&self) -> Result<Vec<CohClass>, GeometryError> {
        let g = self.poincare_gram();
        let n = self.rank();
        let mut duals = Vec::with_capacity(n);
        for j in 0..n {
            let mut rhs = vec![Rat::zero(); n];
            rhs[j] = Rat::one();
            let x = g
                .solve(&rhs)
                .ok_or_else(|| GeometryError::Invariant("Poincaré pairing is degenerate".into()))?;
            duals.push(CohClass(x));
        }
        Ok(duals)
    }

    /// Künneth components of the diagonal pushforward of `twist`: pairs
    /// (basis class, right factor) with
    /// Delta_*(twist) = sum_t left_t (x) right_t, computed as
    /// (1 (x) twist)·Delta_*(1) from the dual basis. The sign/order
    /// convention is pinned by the contraction identity
    /// sum_t (∫ delta·left_t)·right_t = delta·twist, which `validate` and the
    /// unit tests assert.
    pub fn diagonal_kunneth(&self, twist: &CohClass) -> Result<Vec<KunnethPair>, GeometryError> {
        if !self.parity_component(twist, Parity::Odd).is_zero() {
            return Err(GeometryError::OddTwist);
        }
        let duals = self.dual_basis()?;
        // Delta_*1 = sum_gamma dual(gamma) (x) gamma; group by the left basis
        // element: left basis index a picks up sum_gamma dual(gamma)_a gamma.
        let n = self.rank();
        let mut pairs = Vec::new();
        for a in 0..n {
            let mut right = CohClass::zero(n);
            for (gidx, d) in duals.iter().enumerate() {
                if d.0[a].is_zero() {
                    continue;
                }
                let gamma = CohClass::basis(n, gidx);
                right = right.add(&self.cup(&gamma, twist).scale(&d.0[a]));
            }
            if !right.is_zero() {
                pairs.push(KunnethPair { left: a, right });
            }
        }
        Ok(pairs)
    }

    /// Verifies sum_t (∫ delta·left_t)·right_t = delta·twist for every basis
    /// delta.
    pub fn contraction_identity_holds(&self, twist: &CohClass, pairs: &[KunnethPair]) -> bool {
        for d in 0..self.rank() {
            let delta = CohClass::basis(self.rank(), d);
            let mut lhs = CohClass::zero(self.rank());
            for p in pairs {
                let weight =
                    self.integrate(&self.cup(&delta, &CohClass::basis(self.rank(), p.left)));
                if !weight.is_zero() {
                    lhs = lhs.add(&p.right.scale(&weight));
                }
            }
            if lhs != self.cup(&delta, twist) {
                return false;
            }
        }
        true
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let n = self.rank();
        if self.basis.is_empty() || self.basis[0].p != 0 || self.basis[0].q != 0 {
            return Err(GeometryError::Invariant(
                "basis must start with the unit class in bidegree (0,0)".into(),
            ));
        }
        for b in &self.basis {
            if (b.p as i64 - b.q as i64).abs() > 1 {
                return Err(GeometryError::Invariant(format!(
                    "|p-q| <= 1 violated by {} in bidegree ({},{})",
                    b.name, b.p, b.q
                )));
            }
        }
        // cup is bigraded
        for i in 0..n {
            for j in 0..n {
                let (p, q) = (
                    self.basis[i].p as i64 + self.basis[j].p as i64,
                    self.basis[i].q as i64 + self.basis[j].q as i64,
                );
                for (t, c) in self.cup[i][j].iter().enumerate() {
                    if !c.is_zero() && (self.basis[t].p as i64 != p || self.basis[t].q as i64 != q)
                    {
                        return Err(GeometryError::Invariant(format!(
                            "cup({},{}) not bigraded",
                            self.basis[i].name, self.basis[j].name
                        )));
                    }
                }
            }
        }
        // supercommutativity
        for i in 0..n {
            for j in 0..n {
                let ij = self.cup_basis(i, j);
                let ji = self.cup_basis(j, i);
                let sign = if self.basis[i].parity() == Parity::Odd
                    && self.basis[j].parity() == Parity::Odd
                {
                    -Rat::one()
                } else {
                    Rat::one()
                };
                if ij != ji.scale(&sign) {
                    return Err(GeometryError::Invariant(format!(
                        "cup not supercommutative at ({},{})",
                        self.basis[i].name, self.basis[j].name
                    )));
                }
            }
        }
        // associativity on all basis triples
        for i in 0..n {
            for j in 0..n {
                let ij = self.cup_basis(i, j);
                for t in 0..n {
                    let left = self.cup(&ij, &CohClass::basis(n, t));
                    let right = self.cup(&CohClass::basis(n, i), &self.cup_basis(j, t));
                    if left != right {
                        return Err(GeometryError::Invariant(format!(
                            "cup not associative at ({},{},{})",
                            self.basis[i].name, self.basis[j].name, self.basis[t].name
                        )));
                    }
                }
            }
        }
        // integral supported in top degree
        for (i, c) in self.integral.iter().enumerate() {
            if !c.is_zero() && self.basis[i].degree() != 2 * self.dimension as i64 {
                return Err(GeometryError::Invariant(format!(
                    "integral supported off the top degree at {}",
                    self.basis[i].name
                )));
            }
        }
        // Poincaré duality
        if !self.poincare_gram().is_invertible() {
            return Err(GeometryError::Invariant(
                "Poincaré pairing is degenerate".into(),
            ));
        }
        // ∫ todd = holomorphic Euler characteristic
        if self.integrate(&self.todd) != self.holomorphic_euler {
            return Err(GeometryError::Invariant(
                "∫ todd does not equal the declared holomorphic Euler characteristic".into(),
            ));
        }
        if !self.parity_component(&self.todd, Parity::Odd).is_zero() {
            return Err(GeometryError::Invariant("todd must be even".into()));
        }
        Ok(())
    }

    // ----- presets -----

    /// Genus-g curve: basis {1, e_1..e_g, f_1..f_g, pt} with bidegrees
    /// (0,0), (0,1), (1,0), (1,1), cup rule f_j·e_i = delta_{ij}·pt =
    /// -e_i·f_j, todd = 1 + (1-g)·pt.
    pub fn curve(g: u32) -> TargetGeometry {
        let mut basis = vec![BasisClass {
            name: "1".into(),
            p: 0,
            q: 0,
        }];
        for j in 1..=g {
            basis.push(BasisClass {
                name: format!("e{j}"),
                p: 0,
                q: 1,
            });
        }
        for j in 1..=g {
            basis.push(BasisClass {
                name: format!("f{j}"),
                p: 1,
                q: 0,
            });
        }
        basis.push(BasisClass {
            name: "pt".into(),
            p: 1,
            q: 1,
        });
        let n = basis.len();
        let pt = n - 1;
        let e = |j: usize| j; // 1..=g
        let f = |j: usize| g as usize + j;
        let mut cup = vec![vec![vec![Rat::zero(); n]; n]; n];
        for i in 0..n {
            cup[0][i][i] = Rat::one();
            cup[i][0][i] = Rat::one();
        }
        for j in 1..=g as usize {
            cup[f(j)][e(j)][pt] = Rat::one();
            cup[e(j)][f(j)][pt] = -Rat::one();
        }
        let mut integral = vec![Rat::zero(); n];
        integral[pt] = Rat::one();
        let mut todd = CohClass::zero(n);
        todd.0[0] = Rat::one();
        todd.0[pt] = rint(1 - g as i64);
        let geom = TargetGeometry {
            dimension: 1,
            basis,
            cup,
            integral,
            todd,
            label: format!("curve:{g}"),
            holomorphic_euler: rint(1 - g as i64),
        };
        geom.validate().expect("curve preset must validate");
        geom
    }

    /// The projective plane: basis {1, H, pt}, H·H = pt,
    /// todd = 1 + (3/2)H + pt.
    pub fn p2() -> TargetGeometry {
        let basis = vec![
            BasisClass {
                name: "1".into(),
                p: 0,
                q: 0,
            },
            BasisClass {
                name: "H".into(),
                p: 1,
                q: 1,
            },
            BasisClass {
                name: "pt".into(),
                p: 2,
                q: 2,
            },
        ];
        let n = 3;
        let mut cup = vec![vec![vec![Rat::zero(); n]; n]; n];
        for i in 0..n {
            cup[0][i][i] = Rat::one();
            cup[i][0][i] = Rat::one();
        }
        cup[1][1][2] = Rat::one();
        let mut integral = vec![Rat::zero(); n];
        integral[2] = Rat::one();
        let todd = CohClass(vec![Rat::one(), crate::rat::rfrac(3, 2), Rat::one()]);
        let geom = TargetGeometry {
            dimension: 2,
            basis,
            cup,
            integral,
            todd,
            label: "p2".into(),
            holomorphic_euler: Rat::one(),
        };
        geom.validate().expect("p2 preset must validate");
        geom
    }

    /// The quadric surface P1 x P1: basis {1, A, B, pt}, A·B = pt, A² = B² =
    /// 0, todd = 1 + A + B + pt.
    pub fn p1xp1() -> TargetGeometry {
        let basis = vec![
            BasisClass {
                name: "1".into(),
                p: 0,
                q: 0,
            },
            BasisClass {
                name: "A".into(),
                p: 1,
                q: 1,
            },
            BasisClass {
                name: "B".into(),
                p: 1,
                q: 1,
            },
            BasisClass {
                name: "pt".into(),
                p: 2,
                q: 2,
            },
        ];
        let n = 4;
        let mut cup = vec![vec![vec![Rat::zero(); n]; n]; n];
        for i in 0..n {
            cup[0][i][i] = Rat::one();
            cup[i][0][i] = Rat::one();
        }
        cup[1][2][3] = Rat::one();
        cup[2][1][3] = Rat::one();
        let mut integral = vec![Rat::zero(); n];
        integral[3] = Rat::one();
        let todd = CohClass(vec![Rat::one(), Rat::one(), Rat::one(), Rat::one()]);
        let geom = TargetGeometry {
            dimension: 2,
            basis,
            cup,
            integral,
            todd,
            label: "p1xp1".into(),
            holomorphic_euler: Rat::one(),
        };
        geom.validate().expect("p1xp1 preset must validate");
        geom
    }

    /// Loads a geometry from the JSON schema documented in the README:
    /// { "dimension", "basis": [{"name","p","q"}], "cup": [{"i","j","value":
    /// [{"b","c"}]}], "integral": [{"b","c"}], "todd": [{"b","c"}] } with
    /// rationals as "num/den" strings. Missing cup entries default to zero
    /// (the unit row/column is filled in automatically).
    pub fn from_json(text: &str) -> Result<TargetGeometry, GeometryError> {
        #[derive(Deserialize)]
        struct JCoef {
            b: String,
            c: String,
        }
        #[derive(Deserialize)]
        struct JCup {
            i: String,
            j: String,
            value: Vec<JCoef>,
        }
        #[derive(Deserialize)]
        struct JBasis {
            name: String,
            p: u8,
            q: u8,
        }
        #[derive(Deserialize)]
        struct JGeom {
            dimension: u8,
            basis: Vec<JBasis>,
            cup: Vec<JCup>,
            integral: Vec<JCoef>,
            todd: Vec<JCoef>,
            #[serde(default)]
            holomorphic_euler: Option<String>,
            #[serde(default)]
            label: Option<String>,
        }
        let j: JGeom =
            serde_json::from_str(text).map_err(|e| GeometryError::Schema(e.to_string()))?;
        let basis: Vec<BasisClass> = j
            .basis
            .into_iter()
            .map(|b| BasisClass {
                name: b.name,
                p: b.p,
                q: b.q,
            })
            .collect();
        let n = basis.len();
        let index = |name: &str| -> Result<usize, GeometryError> {
            basis
                .iter()
                .position(|b| b.name == name)
                .ok_or_else(|| GeometryError::UnknownClass(name.to_string()))
        };
        let parse_class = |coefs: &[JCoef]| -> Result<CohClass, GeometryError> {
            let mut v = CohClass::zero(n);
            for c in coefs {
                let r = parse_rat(&c.c)
                    .ok_or_else(|| GeometryError::Schema(format!("bad rational `{}`", c.c)))?;
                v.0[index(&c.b)?] += r;
            }
            Ok(v)
        };
        let mut cup = vec![vec![vec![Rat::zero(); n]; n]; n];
        for i in 0..n {
            cup[0][i][i] = Rat::one();
            cup[i][0][i] = Rat::one();
        }
        for entry in &j.cup {
            let (i, jj) = (index(&entry.i)?, index(&entry.j)?);
            cup[i][jj] = parse_class(&entry.value)?.0;
        }
        let mut integral = vec![Rat::zero(); n];
        for c in &j.integral {
            integral[index(&c.b)?] = parse_rat(&c.c)
                .ok_or_else(|| GeometryError::Schema(format!("bad rational `{}`", c.c)))?;
        }
        let todd = parse_class(&j.todd)?;
        let default_euler: Rat = todd
            .0
            .iter()
            .zip(&integral)
            .map(|(c, w)| c.clone() * w)
            .sum();
        let geom = TargetGeometry {
            dimension: j.dimension,
            basis,
            cup,
            integral,
            todd: todd.clone(),
            label: j.label.unwrap_or_else(|| "custom".into()),
            holomorphic_euler: match j.holomorphic_euler {
                Some(s) => parse_rat(&s)
                    .ok_or_else(|| GeometryError::Schema(format!("bad rational `{s}`")))?,
                // default: trust the Todd class
                None => default_euler,
            },
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn preset(spec: &GeometrySpec) -> Result<TargetGeometry, GeometryError> {
        match spec {
            GeometrySpec::Curve(g) => Ok(TargetGeometry::curve(*g)),
            GeometrySpec::P2 => Ok(TargetGeometry::p2()),
            GeometrySpec::P1xP1 => Ok(TargetGeometry::p1xp1()),
            GeometrySpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| GeometryError::Schema(format!("{path}: {e}")))?;
                TargetGeometry::from_json(&text)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeometrySpec {
    Curve(u32),
    P2,
    P1xP1,
    File(String),
}

impl GeometrySpec {
    /// Parses "curve:2", "p2", "p1xp1", or "file:path.json".
    pub fn parse(s: &str) -> Option<GeometrySpec> {
        if let Some(g) = s.strip_prefix("curve:") {
            return g.parse().ok().map(GeometrySpec::Curve);
        }
        match s {
            "p2" => Some(GeometrySpec::P2),
            "p1xp1" => Some(GeometrySpec::P1xP1),
            _ => s
                .strip_prefix("file:")
                .map(|p| GeometrySpec::File(p.into())),
        }
    }
}

impl fmt::Display for GeometrySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometrySpec::Curve(g) => write!(f, "curve:{g}"),
            GeometrySpec::P2 => write!(f, "p2"),
            GeometrySpec::P1xP1 => write!(f, "p1xp1"),
            GeometrySpec::File(p) => write!(f, "file:{p}"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EulerVariant {
    Chi,
    ChiSym,
    ChiH,
    ChiPa,
    ChiPaSym,
    ChiHPaSsym,
    QOmega,
}

/// Which isotropic half an odd lattice vector lives in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IsoClass {
    Even,
    IsoI,
    IsoHat,
}

/// One basis vector of the K-theory lattice: a cohomology basis class on one
/// side of the (possibly trivial) pair decomposition.
#[derive(Clone, Debug)]
pub struct LatticeSlot {
    pub side: Side,
    pub basis: usize,
    pub parity: Parity,
    pub iso: IsoClass,
}

/// A semi-topological generator: an integer-spanning K-class given by its
/// Chern character.
#[derive(Clone, Debug)]
pub struct SstGen {
    pub name: String,
    pub side: Side,
    pub ch: CohClass,
}

/// The K-theory lattice of a geometry (single or pair), with the even/odd
/// splitting, the semi-topological sublattice, and the Hodge isotropic
/// splitting of the odd part.
#[derive(Clone, Debug)]
pub struct KTheoryLattice {
    pub geometry: TargetGeometry,
    pub pair: bool,
    pub slots: Vec<LatticeSlot>,
    pub sst: Vec<SstGen>,
    /// q(gen_i, gen_j) on the semi-topological generators; integer-valued.
    pub q_sst: Vec<Vec<Rat>>,
}

impl KTheoryLattice {
    pub fn new(geometry: TargetGeometry, pair: bool) -> Result<KTheoryLattice, GeometryError> {
        let sides: &[Side] = if pair {
            &[Side::V, Side::F]
        } else {
            &[Side::F]
        };
        let mut slots = Vec::new();
        for &side in sides {
            for (b, cls) in geometry.basis.iter().enumerate() {
                let parity = cls.parity();
                let iso = match parity {
                    Parity::Even => IsoClass::Even,
                    Parity::Odd => {
                        if cls.q > cls.p {
                            IsoClass::IsoI
                        } else {
                            IsoClass::IsoHat
                        }
                    }
                };
                slots.push(LatticeSlot {
                    side,
                    basis: b,
                    parity,
                    iso,
                });
            }
        }
        let mut sst = Vec::new();
        for &side in sides {
            for g in Self::sst_single(&geometry) {
                sst.push(SstGen {
                    name: if pair {
                        format!("{}{}", side_tag(side), g.0)
                    } else {
                        g.0.clone()
                    },
                    side,
                    ch: g.1,
                });
            }
        }
        let lattice = KTheoryLattice {
            geometry,
            pair,
            slots,
            sst,
            q_sst: Vec::new(),
        };
        let mut lattice = lattice;
        let m = lattice.sst.len();
        let mut q = vec![vec![Rat::zero(); m]; m];
        for i in 0..m {
            for j in 0..m {
                let v = lattice.sst_pair_class(i);
                let w = lattice.sst_pair_class(j);
                let val = if lattice.pair {
                    lattice.geometry.chi_pa(&v, &w)
                } else {
                    lattice.geometry.chi(&v[1], &w[1])
                };
                if !is_integer(&val) {
                    return Err(GeometryError::Invariant(format!(
                        "q({}, {}) = {} is not an integer on the semi-topological lattice",
                        lattice.sst[i].name,
                        lattice.sst[j].name,
                        crate::rat::render_rat(&val),
                    )));
                }
                q[i][j] = val;
            }
        }
        lattice.q_sst = q;
        Ok(lattice)
    }

    /// Preset semi-topological generators for a single copy: integer spans
    /// whose Euler pairings are integral. For curves: O and O_pt; for the
    /// surface presets: O, line classes, and O_pt.
    fn sst_single(geom: &TargetGeometry) -> Vec<(String, CohClass)> {
        let n = geom.rank();
        let mut gens = vec![("O".to_string(), geom.unit())];
        if geom.dimension == 2 {
            // ch(O_D) = D - D²/2 for a divisor class D
            for (i, b) in geom.basis.iter().enumerate() {
                if b.p == 1 && b.q == 1 {
                    let d = CohClass::basis(n, i);
                    let d2 = geom.cup(&d, &d);
                    gens.push((
                        format!("O_{}", b.name),
                        d.sub(&d2.scale(&crate::rat::rfrac(1, 2))),
                    ));
                }
            }
        }
        let pt_idx = geom
            .basis
            .iter()
            .position(|b| b.degree() == 2 * geom.dimension as i64)
            .expect("top class");
        gens.push(("O_pt".to_string(), CohClass::basis(n, pt_idx)));
        gens
    }

    /// The pair of Chern characters of an sst generator ([V-part, F-part];
    /// the V part is zero for single lattices and F-side generators).
    pub fn sst_pair_class(&self, i: usize) -> [CohClass; 2] {
        let n = self.geometry.rank();
        let g = &self.sst[i];
        match g.side {
            Side::V => [g.ch.clone(), CohClass::zero(n)],
            Side::F => [CohClass::zero(n), g.ch.clone()],
        }
    }

    pub fn slot_pair_class(&self, s: usize) -> [CohClass; 2] {
        let n = self.geometry.rank();
        let slot = &self.slots[s];
        let ch = CohClass::basis(n, slot.basis);
        match slot.side {
            Side::V => [ch, CohClass::zero(n)],
            Side::F => [CohClass::zero(n), ch],
        }
    }

    /// Q = the symmetrized pairing between two slots.
    pub fn q_slots(&self, a: usize, b: usize) -> Rat {
        let v = self.slot_pair_class(a);
        let w = self.slot_pair_class(b);
        if self.pair {
            self.geometry.chi_pa_sym(&v, &w)
        } else {
            self.geometry.chi_sym(&v[1], &w[1])
        }
    }

    /// Gram matrix of Q on the slot basis.
    pub fn gram_q(&self) -> QMatrix {
        let n = self.slots.len();
        let mut g = QMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                *g.at_mut(i, j) = self.q_slots(i, j);
            }
        }
        g
    }

    /// q(alpha, beta) on integer sector coordinates; exact integer.
    pub fn q_sectors(&self, alpha: &[i64], beta: &[i64]) -> Rat {
        let mut acc = Rat::zero();
        for (i, &a) in alpha.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in beta.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                acc += self.q_sst[i][j].clone() * rint(a) * rint(b);
            }
        }
        acc
    }

    pub fn q_sym_sectors(&self, alpha: &[i64], beta: &[i64]) -> Rat {
        self.q_sectors(alpha, beta) + self.q_sectors(beta, alpha)
    }

    /// The Chern character pair of a sector vector.
    pub fn sector_class(&self, alpha: &[i64]) -> [CohClass; 2] {
        let n = self.geometry.rank();
        let mut out = [CohClass::zero(n), CohClass::zero(n)];
        for (i, &a) in alpha.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let cls = self.sst_pair_class(i);
            out[0] = out[0].add(&cls[0].scale(&rint(a)));
            out[1] = out[1].add(&cls[1].scale(&rint(a)));
        }
        out
    }

    /// Q(slot, sector).
    pub fn q_slot_sector(&self, s: usize, alpha: &[i64]) -> Rat {
        let v = self.slot_pair_class(s);
        let w = self.sector_class(alpha);
        if self.pair {
            self.geometry.chi_pa_sym(&v, &w)
        } else {
            self.geometry.chi_sym(&v[1], &w[1])
        }
    }
}

pub fn side_tag(side: Side) -> &'static str {
    match side {
        Side::V => "V.",
        Side::F => "F.",
    }
}
