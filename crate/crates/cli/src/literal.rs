//! Text literals for descendent elements, states, and operators.
//!
//! Descendents: `3/2*chH[1](pt)*chH[2](1)`, realized `ch[2](e1)`, pair sides
//! `chH[1](V.pt)`. States: `e[0,1]*v[F.pt,-2]*v[F.1,-1]`, with `e[...]`
//! giving integer coordinates over the semi-topological generators. Terms
//! may be summed with `+`; each factor list may start with a rational.

use anyhow::{anyhow, bail, Context, Result};
use num_traits::One;
use vircheck_core::descendent::{DescAlgebra, DescOperator};
use vircheck_core::geometry::CohClass;
use vircheck_core::rat::{parse_rat, rint, Rat};
use vircheck_core::superalgebra::{Side, SuperPoly};
use vircheck_core::voa::{LatticeVA, Sector, VAState};

fn split_terms(s: &str) -> Vec<String> {
    s.split('+').map(|t| t.trim().to_string()).collect()
}

fn split_factors(term: &str) -> Vec<String> {
    term.split(['*', '·'])
        .map(|f| f.trim().to_string())
        .filter(|f| !f.is_empty())
        .collect()
}

/// `chH[i](name)`, `ch[i](name)`, with an optional `V.`/`F.` side prefix on
/// the class name.
fn parse_desc_factor(alg: &DescAlgebra, factor: &str) -> Result<SuperPoly> {
    let (hol, rest) = if let Some(r) = factor.strip_prefix("chH[") {
        (true, r)
    } else if let Some(r) = factor.strip_prefix("ch[") {
        (false, r)
    } else {
        bail!("unrecognized descendent factor `{factor}`");
    };
    let (idx, rest) = rest
        .split_once("](")
        .ok_or_else(|| anyhow!("malformed factor `{factor}`"))?;
    let i: u32 = idx.parse().context("descendent index")?;
    let name = rest
        .strip_suffix(')')
        .ok_or_else(|| anyhow!("missing `)` in `{factor}`"))?;
    let (side, class_name) = if let Some(n) = name.strip_prefix("V.") {
        (Some(Side::V), n)
    } else if let Some(n) = name.strip_prefix("F.") {
        (Some(Side::F), n)
    } else {
        (None, name)
    };
    let side = if alg.flavor.is_pair() {
        Some(side.unwrap_or(Side::F))
    } else {
        None
    };
    let b = alg.geometry.class_index(class_name)?;
    let gen = if hol {
        alg.hol_gen(side, i, b)
    } else {
        alg.top_gen(side, i, b)
    };
    Ok(SuperPoly::generator(gen))
}

pub fn parse_desc(alg: &DescAlgebra, literal: &str) -> Result<SuperPoly> {
    let mut out = SuperPoly::zero();
    for term in split_terms(literal) {
        let mut acc = SuperPoly::one();
        for factor in split_factors(&term) {
            if let Some(c) = parse_rat(&factor) {
                acc = acc.scale(&c);
            } else {
                acc = acc.mul(&parse_desc_factor(alg, &factor)?);
            }
        }
        out = out.add(&acc);
    }
    Ok(out)
}

/// `e[a0,a1,...]` and `v[name,-k]` factors with an optional rational prefix.
pub fn parse_state(va: &LatticeVA, literal: &str) -> Result<VAState> {
    let mut out = VAState::zero();
    for term in split_terms(literal) {
        let mut sector = Sector::zero(va.sector_dim());
        let mut poly = SuperPoly::one();
        for factor in split_factors(&term) {
            if let Some(c) = parse_rat(&factor) {
                poly = poly.scale(&c);
            } else if let Some(rest) = factor.strip_prefix("e[") {
                let coords = rest
                    .strip_suffix(']')
                    .ok_or_else(|| anyhow!("missing `]` in `{factor}`"))?;
                let values: Vec<i64> = if coords.trim().is_empty() {
                    Vec::new()
                } else {
                    coords
                        .split(',')
                        .map(|x| x.trim().parse::<i64>().context("sector coordinate"))
                        .collect::<Result<_>>()?
                };
                if values.len() > va.sector_dim() {
                    bail!(
                        "sector has {} coordinates but the lattice has {} generators",
                        values.len(),
                        va.sector_dim()
                    );
                }
                for (i, v) in values.into_iter().enumerate() {
                    sector.0[i] = v;
                }
            } else if let Some(rest) = factor.strip_prefix("v[") {
                let body = rest
                    .strip_suffix(']')
                    .ok_or_else(|| anyhow!("missing `]` in `{factor}`"))?;
                let (name, depth) = body
                    .rsplit_once(',')
                    .ok_or_else(|| anyhow!("expected `v[name,-k]` in `{factor}`"))?;
                let k: i64 = depth.trim().parse().context("generator depth")?;
                if k >= 0 {
                    bail!("generator depth must be negative, got {k}");
                }
                let slot = (0..va.lattice.slots.len())
                    .find(|&s| va.slot_name(s) == name.trim())
                    .ok_or_else(|| anyhow!("unknown lattice slot `{}`", name.trim()))?;
                poly = poly.mul(&SuperPoly::generator(va.gen(slot, -k)));
            } else {
                bail!("unrecognized state factor `{factor}`");
            }
        }
        out = out.add(&VAState::from_parts(sector, poly));
    }
    Ok(out)
}

/// Operator strings: `R:k`, `T:k`, `L:k`, `TV:k:<class>`, `LV:k:<class>`,
/// `Tpa:k`, `Lpa:k`, `S:k:<class>`, `Ldelta:k:<class>`, `Sfix:k`,
/// `Lfix:k:r=<rational>`, `Lwt0`, `F:<class>`, `E:<rational>`,
/// `eta:<class>`. Classes are basis names or `O` for the unit.
pub fn parse_operator(alg: &DescAlgebra, s: &str) -> Result<DescOperator> {
    let class_of = |name: &str| -> Result<CohClass> {
        if name == "O" || name == "1" {
            Ok(alg.geometry.unit())
        } else {
            Ok(alg.geometry.class_by_name(name)?)
        }
    };
    let parts: Vec<&str> = s.split(':').collect();
    let k = |idx: usize| -> Result<i32> {
        parts
            .get(idx)
            .ok_or_else(|| anyhow!("operator `{s}` needs an index"))?
            .parse()
            .context("operator index")
    };
    Ok(match parts[0] {
        "R" => DescOperator::R(k(1)?),
        "T" => DescOperator::T(k(1)?),
        "L" => DescOperator::L(k(1)?),
        "Tpa" => DescOperator::TPair(k(1)?),
        "Lpa" => DescOperator::LPair(k(1)?),
        "TV" => DescOperator::TV(k(1)?, class_of(parts.get(2).copied().unwrap_or("O"))?),
        "LV" => DescOperator::LV(k(1)?, class_of(parts.get(2).copied().unwrap_or("O"))?),
        "S" => DescOperator::SDelta(k(1)?, class_of(parts.get(2).copied().unwrap_or("pt"))?),
        "Ldelta" => DescOperator::LDelta(k(1)?, class_of(parts.get(2).copied().unwrap_or("pt"))?),
        "Sfix" => DescOperator::SFixed(k(1)?),
        "Lfix" => {
            let r = parts
                .get(2)
                .and_then(|p| p.strip_prefix("r="))
                .and_then(parse_rat)
                .unwrap_or_else(|| rint(1));
            DescOperator::LFixed(k(1)?, r)
        }
        "Lwt0" => DescOperator::LWt0,
        "F" => DescOperator::FTwist(class_of(parts.get(1).copied().unwrap_or("pt"))?),
        "E" => {
            let c: Rat = parts
                .get(1)
                .and_then(|p| parse_rat(p))
                .unwrap_or_else(Rat::one);
            DescOperator::ETwist(c)
        }
        "eta" => DescOperator::EtaNorm(class_of(parts.get(1).copied().unwrap_or("pt"))?),
        other => bail!("unknown operator `{other}`"),
    })
}
