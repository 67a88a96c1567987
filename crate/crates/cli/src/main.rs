//! Batch verification harness: named check suites over exact-arithmetic
//! models, machine-readable reports, and canonical-form evaluation of
//! descendent and state literals.

mod literal;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use vircheck_core::descendent::DescAlgebra;
use vircheck_core::geometry::{GeometrySpec, TargetGeometry};
use vircheck_core::rat::{render_rat, rint};
use vircheck_core::report::{CheckReport, CheckStatus};
use vircheck_core::suites::{run_all, run_suite, thaddeus_table, SuiteOptions, ALL_SUITES};
use vircheck_core::voa::LatticeVA;

#[derive(Parser)]
#[command(
    name = "vircheck",
    about = "Exact verification of descendent-algebra and lattice vertex-algebra identities",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite (or `all`) and report pass/fail.
    Verify {
        /// suite name, one of the known suites or `all`
        suite: String,
        /// geometry spec: curve:<g>, p2, p1xp1, or file:<path> (repeatable;
        /// defaults to the suite's preset list)
        #[arg(long)]
        geometry: Vec<String>,
        #[arg(long)]
        kmax: Option<i64>,
        #[arg(long)]
        nmax: Option<i64>,
        #[arg(long)]
        degmax: Option<i64>,
        /// genus range `a..b` for the model suites
        #[arg(long)]
        g: Option<String>,
        /// index range `a..b` (duality n-range, symmetric-power n-range),
        /// e.g. --n -1..3
        #[arg(long, allow_hyphen_values = true)]
        n: Option<String>,
        #[arg(long)]
        samples: Option<u64>,
        /// write the JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
        /// re-run the failing case recorded in a saved report
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Emit a closed-form table (currently: thaddeus).
    Table {
        what: String,
        /// genus (single value or range a..b)
        #[arg(long, default_value = "2")]
        g: String,
        /// json or tsv
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse a literal, optionally apply operators, and print the canonical
    /// form.
    Eval {
        #[command(subcommand)]
        what: EvalCmd,
    },
}

#[derive(Subcommand)]
enum EvalCmd {
    /// Descendent elements, e.g. "3/2*chH[1](pt)*chH[2](1)".
    Desc {
        literal: String,
        #[arg(long, default_value = "curve:1")]
        geometry: String,
        /// pair flavor (two-sided generators)
        #[arg(long)]
        pair: bool,
        /// realize at a K-class: integer coordinates over the
        /// semi-topological generators, e.g. "1,2" (sheaf side; with --pair
        /// use --alpha-v/--alpha-f)
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        alpha_v: Option<String>,
        #[arg(long)]
        alpha_f: Option<String>,
        /// operator strings applied left to right, e.g. "L:2", "Lwt0",
        /// "LV:1:O", "Lfix:1:r=2", "F:pt"
        #[arg(long)]
        apply: Vec<String>,
    },
    /// Vertex-algebra states, e.g. "e[0,1]*v[F.pt,-2]".
    State {
        literal: String,
        #[arg(long, default_value = "curve:1")]
        geometry: String,
        /// use the single (non-pair) lattice
        #[arg(long)]
        single: bool,
        /// apply Virasoro operators "L:n" or the translation "T"
        #[arg(long)]
        apply: Vec<String>,
    },
}

fn parse_range(s: &str) -> Result<(i64, i64)> {
    if let Some((a, b)) = s.split_once("..") {
        Ok((a.parse()?, b.parse()?))
    } else {
        let v: i64 = s.parse()?;
        Ok((v, v))
    }
}

fn parse_geoms(specs: &[String]) -> Result<Vec<GeometrySpec>> {
    specs
        .iter()
        .map(|s| GeometrySpec::parse(s).ok_or_else(|| anyhow!("bad geometry spec `{s}`")))
        .collect()
}

fn options_from_flags(
    geometry: &[String],
    kmax: Option<i64>,
    nmax: Option<i64>,
    degmax: Option<i64>,
    g: &Option<String>,
    n: &Option<String>,
    samples: Option<u64>,
) -> Result<SuiteOptions> {
    let g_range = match g {
        Some(s) => {
            let (a, b) = parse_range(s)?;
            Some((u32::try_from(a)?, u32::try_from(b)?))
        }
        None => None,
    };
    let n_range = match n {
        Some(s) => Some(parse_range(s)?),
        None => None,
    };
    Ok(SuiteOptions {
        geometries: parse_geoms(geometry)?,
        kmax,
        nmax,
        degmax,
        g_range,
        n_range,
        samples,
        only_case: None,
    })
}

/// Rebuild suite options from a saved report's parameter map.
fn options_from_report(report: &CheckReport) -> Result<SuiteOptions> {
    let p = &report.parameters;
    let get_i64 = |k: &str| p.get(k).and_then(|v| v.parse::<i64>().ok());
    let get_range = |k: &str| p.get(k).and_then(|v| parse_range(v).ok());
    let geometries = if report.geometry.is_empty() {
        Vec::new()
    } else {
        report
            .geometry
            .split(',')
            .filter_map(GeometrySpec::parse)
            .collect()
    };
    Ok(SuiteOptions {
        geometries,
        kmax: get_i64("kmax"),
        nmax: get_i64("nmax"),
        degmax: get_i64("degmax")
            .or_else(|| get_i64("weight_cap"))
            .or_else(|| get_i64("N")),
        g_range: get_range("g").map(|(a, b)| (a as u32, b as u32)),
        n_range: get_range("n"),
        samples: p.get("samples").and_then(|v| v.parse().ok()),
        only_case: None,
    })
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Verify {
            suite,
            geometry,
            kmax,
            nmax,
            degmax,
            g,
            n,
            samples,
            out,
            replay,
        } => {
            if let Some(path) = replay {
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let saved: CheckReport = serde_json::from_str(&text).context("parsing report")?;
                let mut opts = options_from_report(&saved)?;
                let Some(cex) = &saved.first_counterexample else {
                    bail!("report has no counterexample to replay");
                };
                opts.only_case = Some(cex.case.clone());
                let report = run_suite(&saved.suite, &opts)?;
                emit(&report, &out)?;
                return Ok(if report.passed() {
                    println!("replayed case `{}` now passes", cex.case);
                    ExitCode::SUCCESS
                } else {
                    let reproduced = report
                        .first_counterexample
                        .as_ref()
                        .map(|c| c.case == cex.case)
                        .unwrap_or(false);
                    if reproduced {
                        println!("replayed case `{}` reproduces the failure", cex.case);
                    } else {
                        println!("replay failed on a different case");
                    }
                    ExitCode::FAILURE
                });
            }
            let opts = options_from_flags(&geometry, kmax, nmax, degmax, &g, &n, samples)?;
            if suite == "all" {
                let reports = run_all(&opts)?;
                let mut all_pass = true;
                for r in &reports {
                    emit_line(r);
                    all_pass &= r.passed();
                }
                if let Some(path) = &out {
                    std::fs::write(path, serde_json::to_string_pretty(&reports)?)?;
                }
                println!("all: {}", if all_pass { "PASS" } else { "FAIL" });
                return Ok(if all_pass {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::FAILURE
                });
            }
            if !ALL_SUITES.contains(&suite.as_str()) {
                bail!(
                    "unknown suite `{suite}`; expected one of {} or all",
                    ALL_SUITES.join(", ")
                );
            }
            let report = run_suite(&suite, &opts)?;
            emit_line(&report);
            emit(&report, &out)?;
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Cmd::Table {
            what,
            g,
            format,
            out,
        } => {
            if what != "thaddeus" {
                bail!("unknown table `{what}`");
            }
            let (g_lo, g_hi) = parse_range(&g)?;
            let mut rows = Vec::new();
            for genus in g_lo..=g_hi {
                for ((m, k, p), value) in thaddeus_table(u32::try_from(genus)?) {
                    rows.push((genus, m, k, p, value));
                }
            }
            let text = match format.as_str() {
                "tsv" => {
                    let mut s = String::from("g\tm\tk\tp\tvalue\n");
                    for (g, m, k, p, v) in &rows {
                        s.push_str(&format!("{g}\t{m}\t{k}\t{p}\t{}\n", render_rat(v)));
                    }
                    s
                }
                "json" => {
                    let json: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|(g, m, k, p, v)| {
                            serde_json::json!({
                                "g": g, "m": m, "k": k, "p": p,
                                "value": render_rat(v),
                            })
                        })
                        .collect();
                    serde_json::to_string_pretty(&json)?
                }
                other => bail!("unknown format `{other}`"),
            };
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Eval { what } => {
            match what {
                EvalCmd::Desc {
                    literal,
                    geometry,
                    pair,
                    alpha,
                    alpha_v,
                    alpha_f,
                    apply,
                } => {
                    let spec = GeometrySpec::parse(&geometry)
                        .ok_or_else(|| anyhow!("bad geometry spec `{geometry}`"))?;
                    let geom = TargetGeometry::preset(&spec)?;
                    let alg = build_desc_algebra(geom, pair, alpha, alpha_v, alpha_f)?;
                    let mut element = literal::parse_desc(&alg, &literal)?;
                    for op_str in &apply {
                        let op = literal::parse_operator(&alg, op_str)?;
                        element = alg.apply(&op, &element)?;
                    }
                    println!("{}", alg.render(&element));
                    let report = serde_json::json!({
                        "canonical": alg.render(&element),
                        "terms": element.num_terms(),
                        "degrees": element.homogeneous_degree(),
                    });
                    println!("{}", serde_json::to_string_pretty(&report)?);
                }
                EvalCmd::State {
                    literal,
                    geometry,
                    single,
                    apply,
                } => {
                    let spec = GeometrySpec::parse(&geometry)
                        .ok_or_else(|| anyhow!("bad geometry spec `{geometry}`"))?;
                    let geom = TargetGeometry::preset(&spec)?;
                    let va = LatticeVA::new(geom, !single)?;
                    let mut state = literal::parse_state(&va, &literal)?;
                    for op_str in &apply {
                        state = if op_str == "T" {
                            va.translate(&state)
                        } else if let Some(nstr) = op_str.strip_prefix("L:") {
                            let n: i64 = nstr.parse().context("Virasoro index")?;
                            va.virasoro(n, &state)?
                        } else {
                            bail!("state operators are `T` or `L:<n>`");
                        };
                    }
                    println!("{}", va.render(&state));
                    let mut terms = Vec::new();
                    for (sector, poly) in state.sectors() {
                        for (m, c) in poly.terms() {
                            terms.push(serde_json::json!({
                                "sector": sector.0,
                                "coefficient": render_rat(c),
                                "degree": va.degree_of(sector, m),
                                "conformal_weight": render_rat(&va.conformal_weight_of(sector, m)),
                            }));
                        }
                    }
                    let report = serde_json::json!({
                        "canonical": va.render(&state),
                        "terms": terms,
                    });
                    println!("{}", serde_json::to_string_pretty(&report)?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn build_desc_algebra(
    geom: TargetGeometry,
    pair: bool,
    alpha: Option<String>,
    alpha_v: Option<String>,
    alpha_f: Option<String>,
) -> Result<DescAlgebra> {
    use vircheck_core::geometry::KTheoryLattice;
    let parse_alpha = |geom: &TargetGeometry, coords: &str| -> Result<_> {
        let lattice = KTheoryLattice::new(geom.clone(), false)?;
        let values: Vec<i64> = coords
            .split(',')
            .map(|x| x.trim().parse::<i64>().context("alpha coordinate"))
            .collect::<Result<_>>()?;
        let mut class = vircheck_core::geometry::CohClass::zero(geom.rank());
        for (i, v) in values.into_iter().enumerate() {
            if i >= lattice.sst.len() {
                bail!("alpha has more coordinates than generators");
            }
            class = class.add(&lattice.sst[i].ch.scale(&rint(v)));
        }
        Ok(class)
    };
    Ok(match (pair, alpha, alpha_v, alpha_f) {
        (false, None, None, None) => DescAlgebra::full(geom),
        (false, Some(a), None, None) => {
            let class = parse_alpha(&geom, &a)?;
            DescAlgebra::at_alpha(geom, class)
        }
        (true, None, None, None) => DescAlgebra::pair(geom),
        (true, None, v, f) => {
            let av = match v {
                Some(s) => parse_alpha(&geom, &s)?,
                None => vircheck_core::geometry::CohClass::zero(geom.rank()),
            };
            let af = match f {
                Some(s) => parse_alpha(&geom, &s)?,
                None => vircheck_core::geometry::CohClass::zero(geom.rank()),
            };
            DescAlgebra::pair_at_alpha(geom, [av, af])
        }
        _ => bail!("use --alpha for sheaf flavors and --alpha-v/--alpha-f with --pair"),
    })
}

fn emit_line(report: &CheckReport) {
    let status = match report.status {
        CheckStatus::Pass => "PASS",
        CheckStatus::Fail => "FAIL",
        CheckStatus::Skipped => "SKIP",
    };
    println!(
        "{status} suite={} geometry=[{}] cases={} time={}ms fingerprint={}",
        report.suite, report.geometry, report.cases_run, report.wall_time_ms, report.fingerprint
    );
    if let Some(cex) = &report.first_counterexample {
        println!(
            "  counterexample case={} inputs={} expected={} got={}",
            cex.case, cex.inputs, cex.expected, cex.got
        );
        println!(
            "  replay with: vircheck verify {} --replay <saved-report.json>",
            report.suite
        );
    }
}

fn emit(report: &CheckReport, out: &Option<PathBuf>) -> Result<()> {
    if let Some(path) = out {
        std::fs::write(path, serde_json::to_string_pretty(report)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
