//! Property tests for the supercommutative kernel: associativity,
//! supercommutativity, the graded Leibniz rule, canonicalization, and the
//! graded solver round-trip.

use proptest::prelude::*;
use vircheck_core::rat::{rint, Rat};
use vircheck_core::superalgebra::{
    graded_solve, Family, GeneratorId, Monomial, Parity, SuperDerivation, SuperPoly,
};

/// A small fixed pool of generators with mixed parities and degrees.
fn pool() -> Vec<GeneratorId> {
    let mut out = Vec::new();
    for idx in 0..4u16 {
        out.push(GeneratorId::new(
            Family::Formal { tag: 7, index: idx },
            2 + 2 * idx as i64, // even
        ));
        out.push(GeneratorId::new(
            Family::Formal { tag: 8, index: idx },
            1 + 2 * idx as i64, // odd
        ));
    }
    out
}

fn arb_monomial() -> impl Strategy<Value = Monomial> {
    proptest::collection::vec((0usize..8, 1u32..3), 0..4).prop_map(|picks| {
        let gens = pool();
        let mut acc = Monomial::unit();
        for (i, e) in picks {
            let g = gens[i];
            let e = if g.parity() == Parity::Odd { 1 } else { e };
            for _ in 0..e {
                match acc.mul(&Monomial::generator(g)) {
                    Some((m, _)) => acc = m,
                    None => {} // odd square: skip the factor
                }
            }
        }
        acc
    })
}

fn arb_poly() -> impl Strategy<Value = SuperPoly> {
    proptest::collection::vec((arb_monomial(), -4i64..5), 1..4).prop_map(|terms| {
        let mut p = SuperPoly::zero();
        for (m, c) in terms {
            if c != 0 {
                p.add_term(m, rint(c));
            }
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1200))]

    #[test]
    fn multiplication_associative(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn multiplication_supercommutative(ma in arb_monomial(), mb in arb_monomial()) {
        let a = SuperPoly::from_mono(ma.clone());
        let b = SuperPoly::from_mono(mb.clone());
        let sign = if ma.parity() == Parity::Odd && mb.parity() == Parity::Odd {
            -Rat::from_integer(1.into())
        } else {
            Rat::from_integer(1.into())
        };
        prop_assert_eq!(a.mul(&b), b.mul(&a).scale(&sign));
    }

    #[test]
    fn leibniz_rule(a in arb_poly(), b in arb_poly(), odd in any::<bool>()) {
        // derivation acting on the first two generators of the pool
        let gens = pool();
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let degree = if odd { 1 } else { 2 };
        let mut d = SuperDerivation::new(degree, parity);
        // a superderivation of parity r must flip each generator's parity by
        // r, otherwise the Leibniz rule is inconsistent with reordering
        let even_target = GeneratorId::new(Family::Formal { tag: 7, index: 0 }, 2);
        let odd_target = GeneratorId::new(Family::Formal { tag: 8, index: 0 }, 1);
        if odd {
            d = d
                .with_rule(gens[0], SuperPoly::generator(odd_target))
                .with_rule(gens[1], SuperPoly::generator(even_target));
        } else {
            d = d
                .with_rule(gens[0], SuperPoly::generator(even_target))
                .with_rule(
                    gens[1],
                    SuperPoly::generator(odd_target).mul(&SuperPoly::generator(even_target)),
                );
        }
        let lhs = d.apply(&a.mul(&b));
        // d(ab) = d(a)b + (-1)^{r|a|} a d(b), term by term over the
        // parity-homogeneous pieces of a
        let mut rhs = d.apply(&a).mul(&b);
        for (m, c) in a.terms() {
            let sign = if parity == Parity::Odd && m.parity() == Parity::Odd {
                -Rat::from_integer(1.into())
            } else {
                Rat::from_integer(1.into())
            };
            let piece = SuperPoly::from_mono(m.clone()).scale(&(c.clone() * sign));
            rhs = rhs.add(&piece.mul(&d.apply(&b)));
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn canonicalization_idempotent(m in arb_monomial()) {
        // re-multiplying the factors of a canonical monomial in order
        // reproduces it with sign +1
        let rebuilt = Monomial::from_factors(m.factors());
        prop_assert_eq!(rebuilt, Some((m, 1)));
    }

    #[test]
    fn graded_solve_round_trip(coeffs in proptest::collection::vec(-5i64..6, 1..4)) {
        // independent monomials x_j^j of one degree cannot collide; solving
        // for a known combination returns the coefficients
        let gens = pool();
        let degree = 12i64;
        let mut basis: Vec<SuperPoly> = Vec::new();
        for j in 0..coeffs.len() {
            // x_j^{e} with distinct even generators padded to equal degree
            let g = gens[2 * (j % 4)]; // even gens have degrees 2,4,6,8
            let e = degree / g.degree as i64;
            if g.degree as i64 * e != degree {
                continue;
            }
            let mut m = Monomial::unit();
            for _ in 0..e {
                m = m.mul(&Monomial::generator(g)).unwrap().0;
            }
            let p = SuperPoly::from_mono(m);
            if !basis.contains(&p) {
                basis.push(p);
            }
        }
        prop_assume!(!basis.is_empty());
        let mut target = SuperPoly::zero();
        for (j, b) in basis.iter().enumerate() {
            target = target.add(&b.scale(&rint(coeffs[j % coeffs.len()])));
        }
        let solved = graded_solve(&basis, &target).unwrap().unwrap();
        let mut recon = SuperPoly::zero();
        for (j, b) in basis.iter().enumerate() {
            recon = recon.add(&b.scale(&solved[j]));
        }
        prop_assert_eq!(recon, target);
    }
}
