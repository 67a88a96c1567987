//! Closed-form geometric oracles: the symmetric-power-of-curves descendent
//! model with its reduced Virasoro operators, and the rank-2 fixed
//! determinant intersection table expressed through Bernoulli numbers.

use crate::descendent::DescAlgebra;
use crate::rat::{binomial, factorial, pow2, rint, Rat};
use crate::superalgebra::{Family, GeneratorId, Monomial, Parity, SuperPoly};
use num_traits::{One, Zero};

const TAG_ETA: u16 = 1;
const TAG_E: u16 = 2;
const TAG_F: u16 = 3;

/// The reduced descendent ring of the n-th symmetric power of a genus-g
/// curve: generated by eta (even, degree 2) and the odd degree-1 symbols
/// attached to the curve's odd cohomology basis.
#[derive(Clone, Debug)]
pub struct SymPowerRing {
    pub g: u32,
    pub n: u32,
}

impl SymPowerRing {
    pub fn new(g: u32, n: u32) -> Self {
        assert!(n >= 1, "symmetric power requires n >= 1");
        SymPowerRing { g, n }
    }

    pub fn eta(&self) -> GeneratorId {
        GeneratorId::new(
            Family::Formal {
                tag: TAG_ETA,
                index: 0,
            },
            2,
        )
    }

    /// The odd symbol coming from ch^H_0(e_j); j is 1-based.
    pub fn e(&self, j: u16) -> GeneratorId {
        GeneratorId::new(
            Family::Formal {
                tag: TAG_E,
                index: j,
            },
            1,
        )
    }

    /// The odd symbol coming from ch^H_1(f_j); j is 1-based.
    pub fn f(&self, j: u16) -> GeneratorId {
        GeneratorId::new(
            Family::Formal {
                tag: TAG_F,
                index: j,
            },
            1,
        )
    }

    pub fn eta_pow(&self, k: i64) -> SuperPoly {
        if k < 0 {
            return SuperPoly::zero();
        }
        let mut acc = SuperPoly::one();
        let eta = SuperPoly::generator(self.eta());
        for _ in 0..k {
            acc = acc.mul(&eta);
        }
        acc
    }

    /// theta = sum_j f_j·e_j (in that order).
    pub fn theta(&self) -> SuperPoly {
        let mut acc = SuperPoly::zero();
        for j in 1..=self.g as u16 {
            acc = acc.add(&SuperPoly::generator(self.f(j)).mul(&SuperPoly::generator(self.e(j))));
        }
        acc
    }

    /// The realization homomorphism from the full curve descendent algebra:
    /// ch^H_k(pt) -> eta^k/k!, ch^H_k(1) -> n·eta^k/k! - theta·eta^{k-1}/(k-1)!,
    /// ch^H_k(e_j) -> e_j·eta^k/k!, ch^H_k(f_j) -> f_j·eta^{k-1}/(k-1)!.
    pub fn realize(&self, curve_alg: &DescAlgebra, d: &SuperPoly) -> SuperPoly {
        assert_eq!(
            curve_alg.geometry.dimension, 1,
            "symmetric powers of curves"
        );
        let names: Vec<String> = curve_alg
            .geometry
            .basis
            .iter()
            .map(|b| b.name.clone())
            .collect();
        d.apply_hom(&mut |gen| {
            let (k, b) = match gen.family {
                Family::DescHol { i, basis } => (i as i64, basis as usize),
                _ => return SuperPoly::generator(gen),
            };
            let name = &names[b];
            if name == "pt" {
                self.eta_pow(k).scale(&factorial(k as u64).recip())
            } else if name == "1" {
                let first = self
                    .eta_pow(k)
                    .scale(&(rint(self.n as i64) / factorial(k as u64)));
                if k == 0 {
                    first
                } else {
                    first.sub(
                        &self
                            .theta()
                            .mul(&self.eta_pow(k - 1))
                            .scale(&factorial((k - 1) as u64).recip()),
                    )
                }
            } else if let Some(j) = name.strip_prefix('e') {
                let j: u16 = j.parse().expect("e-index");
                SuperPoly::generator(self.e(j))
                    .mul(&self.eta_pow(k))
                    .scale(&factorial(k as u64).recip())
            } else if let Some(j) = name.strip_prefix('f') {
                let j: u16 = j.parse().expect("f-index");
                if k == 0 {
                    SuperPoly::zero()
                } else {
                    SuperPoly::generator(self.f(j))
                        .mul(&self.eta_pow(k - 1))
                        .scale(&factorial((k - 1) as u64).recip())
                }
            } else {
                panic!("unknown curve basis class {name}");
            }
        })
    }

    /// The integral: a monomial integrates to zero unless its odd part is a
    /// union of matched pairs f_j·e_j (each at most once) and the eta power
    /// plus the number of pairs equals n; the matched monomial in the
    /// interleaved order f_{j1} e_{j1} f_{j2} e_{j2} ... integrates to n!,
    /// other orderings pick up the Koszul resorting sign.
    pub fn integrate(&self, x: &SuperPoly) -> Rat {
        let mut acc = Rat::zero();
        for (m, c) in x.terms() {
            if let Some(v) = self.integrate_monomial(m) {
                acc += v * c;
            }
        }
        acc
    }

    fn integrate_monomial(&self, m: &Monomial) -> Option<Rat> {
        let mut eta_pow = 0i64;
        let mut es: Vec<u16> = Vec::new();
        let mut fs: Vec<u16> = Vec::new();
        for &(g, e) in m.factors() {
            match g.family {
                Family::Formal { tag: TAG_ETA, .. } => eta_pow += e as i64,
                Family::Formal { tag: TAG_E, index } => es.push(index),
                Family::Formal { tag: TAG_F, index } => fs.push(index),
                _ => return None,
            }
        }
        if es != fs {
            return None; // unmatched pair indices (both lists are sorted)
        }
        let pairs = es.len() as i64;
        if eta_pow + pairs != self.n as i64 {
            return None;
        }
        // Koszul sign from the canonical order (all e's, then all f's) to the
        // interleaved order f1 e1 f2 e2 ...; both are permutations of the
        // same 2s odd letters.
        let s = es.len();
        // canonical positions: e_{j_t} at t, f_{j_t} at s + t (0-based)
        // target sequence: f_{j_0}, e_{j_0}, f_{j_1}, e_{j_1}, ...
        let mut perm: Vec<usize> = Vec::with_capacity(2 * s);
        for t in 0..s {
            perm.push(s + t); // f_{j_t}
            perm.push(t); // e_{j_t}
        }
        let mut inversions = 0u64;
        for a in 0..perm.len() {
            for b in a + 1..perm.len() {
                if perm[a] > perm[b] {
                    inversions += 1;
                }
            }
        }
        let sign = if inversions % 2 == 0 {
            Rat::one()
        } else {
            -Rat::one()
        };
        Some(sign * factorial(self.n as u64))
    }

    /// The reduced raising derivation: eta -> eta^{k+1}, e_j -> 0,
    /// f_j -> (k+1)·eta^k·f_j.
    pub fn reduced_raising(&self, k: i64, d: &SuperPoly) -> SuperPoly {
        d.apply_derivation(Parity::Even, &mut |g| match g.family {
            Family::Formal { tag: TAG_ETA, .. } => self.eta_pow(k + 1),
            Family::Formal { tag: TAG_F, index } => self
                .eta_pow(k)
                .mul(&SuperPoly::generator(self.f(index)))
                .scale(&rint(k + 1)),
            _ => SuperPoly::zero(),
        })
    }

    /// The reduced framing term: multiplication by
    /// (1-g)k·eta^k - n·eta^k + k·theta·eta^{k-1}.
    pub fn reduced_t_element(&self, k: i64) -> SuperPoly {
        let mut acc = self
            .eta_pow(k)
            .scale(&(rint((1 - self.g as i64) * k) - rint(self.n as i64)));
        if k >= 1 {
            acc = acc.add(&self.theta().mul(&self.eta_pow(k - 1)).scale(&rint(k)));
        }
        acc
    }

    pub fn reduced_virasoro(&self, k: i64, d: &SuperPoly) -> SuperPoly {
        self.reduced_raising(k, d)
            .add(&self.reduced_t_element(k).mul(d))
    }

    /// All monomials eta^l · prod f_j^{a_j} e_j^{b_j} with l <= lmax and
    /// a_j, b_j in {0,1} independently.
    pub fn monomials(&self, lmax: i64) -> Vec<SuperPoly> {
        let mut odd_parts: Vec<SuperPoly> = vec![SuperPoly::one()];
        for j in 1..=self.g as u16 {
            let mut next = Vec::new();
            for base in &odd_parts {
                next.push(base.clone());
                next.push(base.mul(&SuperPoly::generator(self.f(j))));
                next.push(base.mul(&SuperPoly::generator(self.e(j))));
                next.push(
                    base.mul(&SuperPoly::generator(self.f(j)))
                        .mul(&SuperPoly::generator(self.e(j))),
                );
            }
            odd_parts = next;
        }
        let mut out = Vec::new();
        for l in 0..=lmax {
            for odd in &odd_parts {
                out.push(self.eta_pow(l).mul(odd));
            }
        }
        out
    }
}

/// Exact Bernoulli numbers via the convolution recurrence
/// sum_{i=0}^{q} C(q+1, i)·B_i = 0 with B_0 = 1 (so B_1 = -1/2).
pub fn bernoulli(q: u32) -> Rat {
    let mut b: Vec<Rat> = Vec::with_capacity(q as usize + 1);
    for m in 0..=q as u64 {
        if m == 0 {
            b.push(Rat::one());
            continue;
        }
        let mut acc = Rat::zero();
        for (i, bi) in b.iter().enumerate() {
            acc += binomial(m as i64 + 1, i as u64) * bi;
        }
        b.push(-acc / rint(m as i64 + 1));
    }
    b[q as usize].clone()
}

/// The closed-form top intersection number of eta^m·theta^k·zeta^p on the
/// rank-2 fixed-determinant moduli of a genus-g curve:
/// (-1)^{g-1-p}·(m! g! / (q! (g-p)!))·2^{2g-2-p}·(2^q - 2)·B_q with
/// q = m+p-g+1; zero off the dimension locus m+2k+3p = 3g-3 and at the
/// factorial poles (q < 0 or p > g).
pub fn thaddeus_integral(g: u32, m: i64, k: i64, p: i64) -> Rat {
    if m < 0 || k < 0 || p < 0 {
        return Rat::zero();
    }
    let g = g as i64;
    if m + 2 * k + 3 * p != 3 * g - 3 {
        return Rat::zero();
    }
    let q = m + p - g + 1;
    if q < 0 || p > g {
        return Rat::zero();
    }
    let sign = if (g - 1 - p).rem_euclid(2) == 0 {
        Rat::one()
    } else {
        -Rat::one()
    };
    sign * factorial(m as u64) * factorial(g as u64)
        / (factorial(q as u64) * factorial((g - p) as u64))
        * pow2(2 * g - 2 - p)
        * (pow2(q) - rint(2))
        * bernoulli(q as u32)
}

/// All triples (m, k, p) with m+2k+3p = 3g-3 and m, k, p >= 0.
pub fn thaddeus_triples(g: u32) -> Vec<(i64, i64, i64)> {
    let total = 3 * g as i64 - 3;
    let mut out = Vec::new();
    for p in 0..=total / 3 {
        for k in 0..=(total - 3 * p) / 2 {
            let m = total - 3 * p - 2 * k;
            out.push((m, k, p));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TargetGeometry;
    use crate::rat::rfrac;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), rint(1));
        assert_eq!(bernoulli(1), rfrac(-1, 2));
        assert_eq!(bernoulli(2), rfrac(1, 6));
        assert_eq!(bernoulli(3), rint(0));
        assert_eq!(bernoulli(4), rfrac(-1, 30));
        assert_eq!(bernoulli(12), rfrac(-691, 2730));
    }

    /// Independent oracle: the Akiyama-Tanigawa algorithm, which produces
    /// B_q in the B_1 = +1/2 convention (so it agrees with the recurrence
    /// except for a sign at q = 1).
    fn bernoulli_at(q: u32) -> Rat {
        let q = q as usize;
        let mut a: Vec<Rat> = vec![Rat::zero(); q + 1];
        for m in 0..=q {
            a[m] = rint(1) / rint(m as i64 + 1);
            for j in (1..=m).rev() {
                let diff = a[j - 1].clone() - &a[j];
                a[j - 1] = rint(j as i64) * diff;
            }
        }
        a[0].clone()
    }

    #[test]
    fn bernoulli_cross_check() {
        for q in 0..=14u32 {
            let expected = if q == 1 {
                -bernoulli_at(1)
            } else {
                bernoulli_at(q)
            };
            assert_eq!(bernoulli(q), expected, "B_{q}");
        }
    }

    #[test]
    fn thaddeus_spot_values_g2() {
        assert_eq!(thaddeus_integral(2, 3, 0, 0), rint(-4));
        assert_eq!(thaddeus_integral(2, 1, 1, 0), rint(4));
        assert_eq!(thaddeus_integral(2, 0, 0, 1), rint(-4));
        // off the dimension locus
        assert_eq!(thaddeus_integral(2, 1, 1, 1), rint(0));
        assert_eq!(thaddeus_integral(5, 1, 1, 1), rint(0));
    }

    #[test]
    fn thaddeus_relation_sweep() {
        for g in 2..=6u32 {
            for (m, k, p) in thaddeus_triples(g) {
                let q = m + p - g as i64 + 1;
                assert_eq!(q, 2 * (g as i64 - 1 - k - p), "q parity identity");
                if m >= 1 && k >= 1 {
                    let lhs = rint(g as i64 - p) * thaddeus_integral(g, m, k, p);
                    let rhs = rint(-2 * m) * thaddeus_integral(g, m - 1, k - 1, p + 1);
                    assert_eq!(lhs, rhs, "relation at g={g} ({m},{k},{p})");
                }
            }
        }
    }

    #[test]
    fn thaddeus_mutation_control() {
        // dropping the (2^q - 2) factor must break the g=2 spot values
        let mutated = |g: u32, m: i64, k: i64, p: i64| -> Rat {
            let gi = g as i64;
            if m + 2 * k + 3 * p != 3 * gi - 3 {
                return Rat::zero();
            }
            let q = m + p - gi + 1;
            if q < 0 || p > gi {
                return Rat::zero();
            }
            let sign = if (gi - 1 - p).rem_euclid(2) == 0 {
                Rat::one()
            } else {
                -Rat::one()
            };
            sign * factorial(m as u64) * factorial(g as u64)
                / (factorial(q as u64) * factorial((gi - p) as u64))
                * pow2(2 * gi - 2 - p)
                * bernoulli(q as u32)
        };
        assert_ne!(mutated(2, 1, 1, 0), rint(4));
    }

    #[test]
    fn sym_integral_examples() {
        // ∫ eta^n = n!
        for n in 1..=4u32 {
            let ring = SymPowerRing::new(2, n);
            assert_eq!(ring.integrate(&ring.eta_pow(n as i64)), factorial(n as u64));
        }
        // g=2, n=2: ∫ eta·f1·e1 = 2 (interleaved order)
        let ring = SymPowerRing::new(2, 2);
        let m = ring
            .eta_pow(1)
            .mul(&SuperPoly::generator(ring.f(1)))
            .mul(&SuperPoly::generator(ring.e(1)));
        assert_eq!(ring.integrate(&m), rint(2));
        // odd square dies before it reaches the integral
        let sq = SuperPoly::generator(ring.e(1)).mul(&SuperPoly::generator(ring.e(1)));
        assert!(sq.is_zero());
        // theta integrates to g·n! at eta-power n-1
        let ring = SymPowerRing::new(3, 1);
        assert_eq!(ring.integrate(&ring.theta()), rint(3));
    }

    #[test]
    fn sym_realize_examples() {
        let geom = TargetGeometry::curve(2);
        let alg = DescAlgebra::full(geom.clone());
        let ring = SymPowerRing::new(2, 3);
        let pt = geom.class_index("pt").unwrap();
        let one = geom.class_index("1").unwrap();
        let f1 = geom.class_index("f1").unwrap();
        // ch^H_2(pt) -> eta²/2
        assert_eq!(
            ring.realize(&alg, &alg.hol(None, 2, pt)),
            ring.eta_pow(2).scale(&rfrac(1, 2))
        );
        // ch^H_1(1) -> n·eta - theta
        assert_eq!(
            ring.realize(&alg, &alg.hol(None, 1, one)),
            ring.eta_pow(1).scale(&rint(3)).sub(&ring.theta())
        );
        // ch^H_0(f_j) -> 0
        assert!(ring.realize(&alg, &alg.hol(None, 0, f1)).is_zero());
    }

    #[test]
    fn sym_realize_is_homomorphism() {
        let geom = TargetGeometry::curve(2);
        let alg = DescAlgebra::full(geom.clone());
        let ring = SymPowerRing::new(2, 3);
        let e1 = geom.class_index("e1").unwrap();
        let f2 = geom.class_index("f2").unwrap();
        let pt = geom.class_index("pt").unwrap();
        let x = alg.hol(None, 1, e1).mul(&alg.hol(None, 2, f2));
        let y = alg.hol(None, 1, pt);
        let lhs = ring.realize(&alg, &x.mul(&y));
        let rhs = ring.realize(&alg, &x).mul(&ring.realize(&alg, &y));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduced_virasoro_hand_case() {
        // n=1, k=1, D=1: ∫ L~_1(1) = (1-g-1)·∫eta + ∫theta = -g + g = 0
        for g in 0..4u32 {
            let ring = SymPowerRing::new(g, 1);
            let out = ring.reduced_virasoro(1, &SuperPoly::one());
            assert_eq!(ring.integrate(&out), rint(0));
        }
    }

    #[test]
    fn reduced_virasoro_small_sweep() {
        for g in 0..=2u32 {
            for n in 1..=3u32 {
                let ring = SymPowerRing::new(g, n);
                for k in 0..=3i64 {
                    for d in ring.monomials(n as i64) {
                        let out = ring.reduced_virasoro(k, &d);
                        assert_eq!(ring.integrate(&out), rint(0), "g={g} n={n} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn degree_filter() {
        // ∫ L~_k(D) contributions vanish off the stratum k + a + l = n
        let ring = SymPowerRing::new(2, 3);
        // D = eta with l=1, a=0: only k=2 can integrate nonzero pieces, and
        // even there the total is 0; check k=1 pieces vanish term by term.
        let d = ring.eta_pow(1);
        let k = 1i64;
        let raising = ring.reduced_raising(k, &d);
        assert_eq!(ring.integrate(&raising), rint(0));
        let mult = ring.reduced_t_element(k).mul(&d);
        assert_eq!(ring.integrate(&mult), rint(0));
    }

    #[test]
    fn stratified_identity() {
        // (g - a)·∫ eta^k·D = ∫ eta^{k-1}·theta·D on the stratum
        // k + a + l = n.
        for g in 1..=3u32 {
            for n in 2..=4u32 {
                let ring = SymPowerRing::new(g, n);
                for d in ring.monomials(n as i64) {
                    // a = number of f-factors, l = eta power
                    let (mut a, mut l) = (0i64, 0i64);
                    if let Some((m, _)) = d.terms().next() {
                        for &(gen, e) in m.factors() {
                            match gen.family {
                                Family::Formal { tag: TAG_F, .. } => a += e as i64,
                                Family::Formal { tag: TAG_ETA, .. } => l += e as i64,
                                _ => {}
                            }
                        }
                    }
                    let k = n as i64 - a - l;
                    if k < 1 {
                        continue;
                    }
                    let lhs = ring.integrate(&ring.eta_pow(k).mul(&d)) * rint(g as i64 - a);
                    let rhs = ring.integrate(&ring.eta_pow(k - 1).mul(&ring.theta()).mul(&d));
                    assert_eq!(lhs, rhs, "g={g} n={n} k={k}");
                }
            }
        }
    }
}
