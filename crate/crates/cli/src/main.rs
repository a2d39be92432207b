//! `brieskorn`: command-line front end for the Brieskorn sphere toolkit.

mod cache;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use brieskorn::equivariant::{census, fixed_sphere_class, g_signature_solve};
use brieskorn::exact::{signature, IntegerMatrix};
use brieskorn::invariants::bounding_report_with;
use brieskorn::json::matrix_to_value;
use brieskorn::knots::{fox_milnor_test, slice_obstruction_report, IntPolynomial};
use brieskorn::lattice::{entry_profile, EnumerationStatus, SearchOptions, DEFAULT_NODE_LIMIT};
use brieskorn::obstruct::{theorem_a_pipeline_with, PipelineOptions, QuotientRoute};
use brieskorn::plumbing::{canonical_graph, intersection_matrix, wu_class, PlumbingGraph};
use brieskorn::seifert::{is_prime, normalize, quotient, BrieskornTriple};
use brieskorn::Error;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cache::Cache;
use output::Format;
use sweep::{FamilyName, IntRange, Sign, SweepParams};

/// Exact computations for Brieskorn homology spheres: plumbing resolutions,
/// μ̄ and R invariants, diagonal lattice embeddings, equivariant fixed-point
/// data and the equivariant non-extension certificate.
///
/// Exit status: 0 on success, 2 when the input is rejected, 1 when an
/// internal consistency check fails or a search limit is hit.
#[derive(Parser, Debug)]
#[command(name = "brieskorn", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format. Defaults to tsv for `sweep` and json otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Directory for cached embedding searches
    /// [default: $XDG_CACHE_HOME/brieskorn or ~/.cache/brieskorn]
    #[arg(long, global = true, env = "BRIESKORN_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Disable the embedding cache.
    #[arg(long, global = true)]
    no_cache: bool,

    /// Node-expansion limit for each embedding search.
    #[arg(long, global = true, env = "BRIESKORN_SEARCH_LIMIT", default_value_t = DEFAULT_NODE_LIMIT)]
    search_limit: u64,
}

#[derive(Args, Debug, Clone, Copy)]
struct TripleArgs {
    a: i64,
    b: i64,
    c: i64,
}

impl TripleArgs {
    fn triple(self) -> brieskorn::Result<BrieskornTriple> {
        BrieskornTriple::new(self.a, self.b, self.c)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Seifert invariants, canonical plumbing graph and intersection form of Σ(a,b,c).
    Resolve(TripleArgs),
    /// μ, μ̄, δ, R and the Donaldson embedding test for Σ(a,b,c).
    Invariants(TripleArgs),
    /// Search for embeddings of the intersection form into the diagonal lattice.
    Embed {
        #[command(flatten)]
        triple: TripleArgs,
        /// Enumerate embeddings up to signed permutation of the diagonal basis.
        #[arg(long)]
        all: bool,
        /// Maximum number of classes reported by --all.
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
    /// Fixed-point census of the standard ℤ/p action on the canonical plumbing.
    Equivariant {
        #[command(flatten)]
        triple: TripleArgs,
        #[arg(long)]
        p: i64,
    },
    /// Non-extension pipeline for the ℤ/p action on Σ(pa,b,c).
    Obstruct {
        p: i64,
        a: i64,
        b: i64,
        c: i64,
        /// Arms carrying F2 and F3, as `i,j` (arm indices in graph order).
        #[arg(long, value_parser = parse_arms)]
        arms: Option<(usize, usize)>,
    },
    /// Quotient of Σ(a,b,c) by ℤ/p and the bounding obstructions for it.
    Quotient {
        #[command(flatten)]
        triple: TripleArgs,
        #[arg(long)]
        p: i64,
    },
    /// Bounding reports across a family of Brieskorn spheres.
    ///
    /// TSV columns: family, params, a, b, c, mu, mu_bar, delta, R,
    /// donaldson_embeddable (true/false/unknown), obstructed, reasons
    /// (comma-separated codes, `-` when none). Parameter values outside the
    /// family's domain are skipped.
    Sweep {
        #[arg(value_enum)]
        family: FamilyName,
        /// m range for sigma-m and sigma-m-quotient, e.g. `2..6`.
        m: Option<IntRange>,
        #[arg(long)]
        p: Option<IntRange>,
        #[arg(long)]
        s: Option<IntRange>,
        #[arg(long)]
        r: Option<IntRange>,
        /// Sign choice for casson-harer-odd and stern [default: both].
        #[arg(long, value_enum)]
        sign: Option<Sign>,
    },
    /// Fox–Milnor factorization test for an Alexander polynomial.
    FoxMilnor {
        /// Coefficients from the constant term up, e.g. `2,-5,2` or `[2,-5,2]`.
        #[arg(allow_hyphen_values = true)]
        coeffs: String,
        /// Largest |coefficient| tried for the factor f.
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Signature of the (p,q) torus knot and the slice obstruction it gives.
    TorusSignature {
        #[arg(allow_hyphen_values = true)]
        p: i64,
        #[arg(allow_hyphen_values = true)]
        q: i64,
    },
}

fn parse_arms(s: &str) -> Result<(usize, usize), String> {
    let (i, j) = s.split_once(',').ok_or("expected i,j")?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad arm index {t:?}: {e}"));
    Ok((num(i)?, num(j)?))
}

fn default_cache_dir() -> Option<PathBuf> {
    dirs::cache_dir().map(|d| d.join("brieskorn"))
}

fn graph_value(g: &PlumbingGraph) -> Value {
    let arms: Vec<Value> = g
        .arms()
        .iter()
        .map(|arm| {
            json!({
                "nodes": arm.nodes.iter().map(|&i| g.nodes()[i].id).collect::<Vec<_>>(),
                "weights": arm.nodes.iter().map(|&i| g.weight(i)).collect::<Vec<_>>(),
                "pair": arm.pair.map(|p| [p.alpha, p.beta]),
            })
        })
        .collect();
    json!({
        "graph": g.to_json_value(),
        "central_weight": g.central_weight(),
        "arms": arms,
        "q": matrix_to_value(&intersection_matrix(g)),
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn run(cli: Cli) -> anyhow::Result<String> {
    let g = &cli.global;
    let cache = if g.no_cache {
        Cache::disabled()
    } else {
        Cache::new(g.cache_dir.clone().or_else(default_cache_dir))
    };
    let opts = SearchOptions {
        node_limit: g.search_limit,
        ..SearchOptions::default()
    };
    let format = g.format.unwrap_or(match cli.command {
        Command::Sweep { .. } => Format::Tsv,
        _ => Format::Json,
    });
    let mut embed = |q: &IntegerMatrix| cache.find(q, &opts);

    let value = match cli.command {
        Command::Resolve(t) => {
            let triple = t.triple()?;
            let seifert = normalize(&triple)?;
            let graph = canonical_graph(&seifert)?;
            merge(json!({ "triple": triple.as_given(), "seifert": seifert }), graph_value(&graph))
        }
        Command::Invariants(t) => {
            let triple = t.triple()?;
            let graph = canonical_graph(&normalize(&triple)?)?;
            let report = bounding_report_with(&triple, &mut embed)?;
            let inertia = signature(&intersection_matrix(&graph))?;
            let wu = wu_class(&graph)?;
            merge(
                serde_json::to_value(&report)?,
                json!({ "signature": inertia.signature(), "rank": inertia.rank(), "wu_class": wu }),
            )
        }
        Command::Embed { triple: t, all, limit } => {
            let triple = t.triple()?;
            let q = intersection_matrix(&canonical_graph(&normalize(&triple)?)?);
            let head = json!({ "triple": triple.as_given(), "q": matrix_to_value(&q) });
            if all {
                let en = cache.enumerate(&q, limit, &opts)?;
                let classes: Vec<Value> = en
                    .embeddings
                    .iter()
                    .map(|e| json!({ "matrix": matrix_to_value(e.matrix()), "profile": entry_profile(e) }))
                    .collect();
                let has_non_unit = en.embeddings.iter().any(|e| entry_profile(e).has_non_unit);
                let complete = en.status == EnumerationStatus::Exhaustive;
                merge(
                    head,
                    json!({
                        "status": en.status,
                        "nodes": en.nodes,
                        "count": classes.len(),
                        "has_non_unit": has_non_unit,
                        "complete": complete,
                        "embeddings": classes,
                    }),
                )
            } else {
                let (status, emb) = match cache.find(&q, &opts) {
                    Ok(Some(e)) => ("found", Some(e)),
                    Ok(None) => ("none", None),
                    Err(Error::SearchLimit(_)) => ("node_limit_reached", None),
                    Err(e) => return Err(e.into()),
                };
                merge(
                    head,
                    json!({
                        "status": status,
                        "embedding": emb.as_ref().map(|e| matrix_to_value(e.matrix())),
                        "profile": emb.as_ref().map(entry_profile),
                    }),
                )
            }
        }
        Command::Equivariant { triple: t, p } => {
            let triple = t.triple()?;
            if !is_prime(p) {
                return Err(Error::Invalid(format!("{p} is not prime")).into());
            }
            let graph = canonical_graph(&normalize(&triple)?)?;
            let cen = census(&graph, p)?;
            let sphere = if cen.fixed_disks.len() == 1 {
                Some(fixed_sphere_class(&graph, &cen)?)
            } else {
                None
            };
            let g_sig = if p == 2 && cen.fixed_disks.len() == 1 {
                Some(g_signature_solve(&cen, graph.len())?)
            } else {
                None
            };
            json!({
                "triple": triple.as_given(),
                "p": p,
                "lefschetz_count": cen.lefschetz_count(),
                "closed_euler_count": cen.closed_euler_count(),
                "census": cen,
                "fixed_sphere_class": sphere,
                "g_signature_square": g_sig,
            })
        }
        Command::Obstruct { p, a, b, c, arms } => {
            let report = theorem_a_pipeline_with(p, a, b, c, &PipelineOptions { arms }, &mut embed)?;
            serde_json::to_value(&report)?
        }
        Command::Quotient { triple: t, p } => {
            let triple = t.triple()?;
            let quot = quotient(&triple, p)?;
            let route = if quot.is_sphere() {
                let [_, b, c] = quot.components();
                QuotientRoute::TorusKnot {
                    report: slice_obstruction_report(b, c)?,
                }
            } else {
                QuotientRoute::Bounding {
                    quotient: quot.as_given(),
                    report: bounding_report_with(&quot, &mut embed)?,
                }
            };
            json!({
                "triple": triple.as_given(),
                "p": p,
                "quotient": quot.as_given(),
                "obstructed": route.obstructs(),
                "route": route,
            })
        }
        Command::Sweep { family, m, p, s, r, sign } => {
            let params = SweepParams { m, p, s, r, sign };
            let rows = sweep::run(family, &params, &cache, &opts)?;
            if format == Format::Tsv {
                return tsv_table(&rows);
            }
            serde_json::to_value(&rows)?
        }
        Command::FoxMilnor { coeffs, bound } => {
            let trimmed = coeffs.trim();
            let text = if trimmed.starts_with('[') { trimmed.to_string() } else { format!("[{trimmed}]") };
            let delta = IntPolynomial::from_json(&text)?;
            serde_json::to_value(fox_milnor_test(&delta, bound)?)?
        }
        Command::TorusSignature { p, q } => serde_json::to_value(slice_obstruction_report(p, q)?)?,
    };
    Ok(output::render(&value, format))
}

fn tsv_table(rows: &[sweep::Row]) -> anyhow::Result<String> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .quote_style(csv::QuoteStyle::Never)
        .from_writer(Vec::new());
    w.write_record(sweep::TSV_COLUMNS)?;
    for row in rows {
        w.write_record(sweep::tsv_record(row))?;
    }
    let bytes = w.into_inner().context("flushing TSV output")?;
    Ok(String::from_utf8(bytes)?)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_internal() => 1,
        Some(Error::SearchLimit(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
