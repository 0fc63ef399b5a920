//! `polykit` command-line front end.
//!
//! Every command prints a JSON report on stdout (except `dot`, which prints
//! Graphviz). Exit codes: 0 success, 1 the queried predicate is false,
//! 2 error, 3 usage error.

use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polykit::autos::verify_steinberg_over;
use polykit::divisibility::{col_divisibility, embed_in_simplex};
use polykit::doubling::{double, spectrum, DEFAULT_DIM_CEILING};
use polykit::io::{parse_vector, parse_vector_list, resolve_polytope, resolve_word, Report};
use polykit::linalg::IVec;
use polykit::par::Execution;
use polykit::polygon::{classify, classify_sweep, normal_fan, sample_polygons};
use polykit::rigid::{check_rigid, embed_system, y_resolve};
use polykit::ring::Ring;
use polykit::steinberg::k2_screen;
use polykit::triangular::{canonicalize, evaluate_form, layer_partition, random_word};
use polykit::{ColSet, Error, LatticePolytope};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CEILING_VAR: &str = "POLYKIT_DIM_CEILING";

#[derive(Parser)]
#[command(name = "polykit", version, about = "Column vectors, doublings and elementary automorphisms of lattice polytopes")]
struct Cli {
    /// Seed for randomized sweeps and random words.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Column vectors, base facets and products.
    Cols { polytope: String },
    /// Whether ⟨P_u, v⟩ ≤ 1 for all column vectors u, v.
    Balanced { polytope: String },
    /// The two divisibility axioms.
    Divisible { polytope: String },
    /// Class of a balanced polygon.
    Classify { polytope: String },
    /// Doubles along one facet.
    Double {
        polytope: String,
        #[arg(long)]
        facet: usize,
    },
    /// Materializes a doubling spectrum up to a stage.
    Spectrum {
        polytope: String,
        #[arg(long)]
        horizon: usize,
    },
    /// Decides rigidity of a vector set, e.g. `--vectors "0,0,-1;1,0,0"`.
    Rigid {
        polytope: String,
        #[arg(long, allow_hyphen_values = true)]
        vectors: String,
    },
    /// Embeds a rigid system into a Y-rigid one.
    Yresolve {
        polytope: String,
        #[arg(long, allow_hyphen_values = true)]
        vectors: String,
    },
    /// Checks the commutator relation of two elementary automorphisms.
    Steinberg {
        polytope: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, default_value = "poly")]
        ring: String,
    },
    /// Canonical form of a word in the group of a rigid system.
    Canon {
        polytope: String,
        #[arg(long, allow_hyphen_values = true)]
        system: String,
        /// Word as inline JSON or a file path.
        #[arg(long, conflicts_with = "random")]
        word: Option<String>,
        /// Canonicalize this many random words instead (uses `--seed`).
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value = "int")]
        ring: String,
    },
    /// Embeds the column vectors into those of a unimodular simplex.
    Embed {
        polytope: String,
        /// Also map this rigid system.
        #[arg(long, allow_hyphen_values = true)]
        system: Option<String>,
    },
    /// Evaluates a word on the first stages of a doubling spectrum.
    K2screen {
        polytope: String,
        #[arg(long)]
        word: String,
        #[arg(long)]
        stages: usize,
    },
    /// Graphviz output.
    Dot {
        polytope: String,
        #[arg(long, value_enum)]
        what: DotWhat,
        #[arg(long, allow_hyphen_values = true)]
        vectors: Option<String>,
    },
    /// Classifies every lattice polygon with vertices in [0, side]².
    Sweep {
        #[arg(long, default_value_t = 3)]
        side: i64,
        /// Classify only this many randomly chosen polygons.
        #[arg(long)]
        sample: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DotWhat {
    /// Product graph of the column vectors.
    Products,
    /// Supporting graph of a rigid system.
    System,
    /// Supporting graph with split terminal vertices.
    Ysystem,
    /// Normal fan (rays and cones).
    Fan,
}

enum Output {
    Report(Report, bool),
    Text(String),
}

fn ceiling() -> Result<usize, Error> {
    match std::env::var(CEILING_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{CEILING_VAR} must be a positive integer, got `{s}`"))),
        Err(_) => Ok(DEFAULT_DIM_CEILING),
    }
}

fn vectors_json(vs: &[IVec]) -> Value {
    json!(vs)
}

fn cols_of(p: LatticePolytope) -> Arc<ColSet> {
    Arc::new(ColSet::new(Arc::new(p)))
}

fn run(cli: Cli) -> Result<Output, Error> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let out = match cli.command {
        Command::Cols { polytope } => {
            let p = resolve_polytope(&polytope)?;
            let c = cols_of(p);
            let p = c.polytope();
            let vectors: Vec<Value> = c
                .vectors()
                .iter()
                .map(|cv| json!({"v": cv.v, "base": cv.base, "base_facet": p.facet(cv.base)}))
                .collect();
            let products: Vec<Value> = c
                .product_triples()
                .into_iter()
                .map(|(i, j, k)| json!({"u": c.coords(i), "v": c.coords(j), "uv": c.coords(k)}))
                .collect();
            let result = json!({
                "dim": p.dim(),
                "vertices": p.vertices(),
                "facets": p.facets(),
                "lattice_points": p.lattice_points().len(),
                "column_vectors": vectors,
                "pairing_table": c.pairing_table(),
                "products": products,
                "balanced": c.is_balanced(),
            });
            Output::Report(Report::new("cols", result).input("polytope", &polytope), true)
        }
        Command::Balanced { polytope } => {
            let c = cols_of(resolve_polytope(&polytope)?);
            let witness = c.balance_witness().map(|(i, j)| {
                json!({"u": c.coords(i), "v": c.coords(j), "pairing": c.pairing(i, j)})
            });
            let ok = witness.is_none();
            let result = json!({"balanced": ok, "witness": witness});
            Output::Report(Report::new("balanced", result).input("polytope", &polytope), ok)
        }
        Command::Divisible { polytope } => {
            let c = cols_of(resolve_polytope(&polytope)?);
            let r = col_divisibility(&c)?;
            let ok = r.is_divisible();
            let result = json!({"divisible": ok, "report": r});
            Output::Report(Report::new("divisible", result).input("polytope", &polytope), ok)
        }
        Command::Classify { polytope } => {
            let p = resolve_polytope(&polytope)?;
            if p.dim() != 2 {
                return Err(Error::DegenerateInput(format!("not 2-dimensional (dimension {})", p.dim())));
            }
            let c = classify(&p)?;
            let result = json!({
                "class": c.class,
                "params": c.params,
                "col_summary": c.col_summary,
                "group_shape": {"label": c.group_shape.label, "blocks": c.group_shape.describe()},
            });
            Output::Report(Report::new("classify", result).input("polytope", &polytope), true)
        }
        Command::Double { polytope, facet } => {
            let p = Arc::new(resolve_polytope(&polytope)?);
            if facet >= p.facets().len() {
                return Err(Error::DegenerateInput(format!(
                    "facet index {facet} out of range (the polytope has {} facets)",
                    p.facets().len()
                )));
            }
            if p.dim() + 1 > ceiling()? {
                return Err(Error::ResourceBound(format!("dimension {} exceeds the ceiling", p.dim() + 1)));
            }
            let d = double(&p, facet)?;
            d.verify_identities()?;
            let q_cols = ColSet::new(d.q.clone());
            let result = json!({
                "facet": p.facet(facet),
                "vertices": d.q.vertices(),
                "lattice_points": d.q.lattice_points().len(),
                "column_vectors": q_cols.len(),
                "rotation_vector": d.g,
                "delta_plus": d.delta_plus,
                "delta_minus": d.delta_minus(),
                "identities_verified": true,
            });
            Output::Report(
                Report::new("double", result).input("polytope", &polytope).input("facet", facet),
                true,
            )
        }
        Command::Spectrum { polytope, horizon } => {
            let p = resolve_polytope(&polytope)?;
            let s = spectrum(&p, horizon, ceiling()?)?;
            let report = s.report();
            let pending = s.undecomposed_base_vectors();
            let result = json!({"spectrum": report, "undecomposed_base_vectors": pending});
            Output::Report(
                Report::new("spectrum", result).input("polytope", &polytope).input("horizon", horizon),
                true,
            )
        }
        Command::Rigid { polytope, vectors } => {
            let c = cols_of(resolve_polytope(&polytope)?);
            let vs = parse_vector_list(&vectors)?;
            let (ok, result) = match check_rigid(&c, &vs)? {
                Ok(s) => (true, json!({"rigid": true, "system": s.report()})),
                Err(nr) => (false, json!({"rigid": false, "reason": nr.reason(), "detail": nr.to_string()})),
            };
            Output::Report(
                Report::new("rigid", result).input("polytope", &polytope).input("vectors", vectors_json(&vs)),
                ok,
            )
        }
        Command::Yresolve { polytope, vectors } => {
            let c = cols_of(resolve_polytope(&polytope)?);
            let vs = parse_vector_list(&vectors)?;
            let r = y_resolve(&c, &vs)?;
            let result = json!({
                "system": r.system.report(),
                "steps": r.steps,
                "strictly_decreasing": r.strictly_decreasing(),
            });
            Output::Report(
                Report::new("yresolve", result).input("polytope", &polytope).input("vectors", vectors_json(&vs)),
                true,
            )
        }
        Command::Steinberg { polytope, u, v, ring } => {
            let c = cols_of(resolve_polytope(&polytope)?);
            let r = Ring::from_name(&ring)?;
            let (u, v) = (parse_vector(&u)?, parse_vector(&v)?);
            let check = verify_steinberg_over(&c, &u, &v, &r)?;
            let ok = check.passed;
            Output::Report(
                Report::new("steinberg", check)
                    .input("polytope", &polytope)
                    .input("u", &u)
                    .input("v", &v)
                    .input("ring", r.to_string()),
                ok,
            )
        }
        Command::Canon {
            polytope,
            system,
            word,
            random,
            ring,
        } => {
            let c = cols_of(resolve_polytope(&polytope)?);
            let vs = parse_vector_list(&system)?;
            let s = check_rigid(&c, &vs)?.map_err(|nr| Error::RigidityFailure(nr.to_string()))?;
            let ls = layer_partition(&s);
            let words = match (word, random) {
                (Some(w), _) => {
                    let w = resolve_word(&w)?;
                    vec![(w.ring, w.letters)]
                }
                (None, Some(n)) => {
                    let r = Ring::from_name(&ring)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    let pool = s.closure_coords();
                    (0..n).map(|_| (r.clone(), random_word(&mut rng, &pool, 6, &r))).collect()
                }
                (None, None) => return Err(Error::Parse("give --word or --random".into())),
            };
            let mut forms = Vec::new();
            for (r, letters) in &words {
                let form = canonicalize(&ls, letters, r, 1)?;
                let value = evaluate_form(&ls, &form, r)?;
                forms.push(json!({
                    "ring": r.to_string(),
                    "word": letters.iter().map(|l| json!({"v": l.v, "coef": r.format(&l.coef)})).collect::<Vec<_>>(),
                    "canonical_form": form.to_view(r),
                    "trivial": form.is_trivial() && value.is_identity(),
                }));
            }
            let result = json!({"layers": ls.upper, "forms": forms});
            Output::Report(
                Report::new("canon", result)
                    .input("polytope", &polytope)
                    .input("system", vectors_json(&vs))
                    .input("seed", cli.seed),
                true,
            )
        }
        Command::Embed { polytope, system } => {
            let c = cols_of(resolve_polytope(&polytope)?);
            let e = embed_in_simplex(&c)?;
            let images: Vec<Value> = (0..c.len())
                .map(|i| json!({"v": c.coords(i), "image": e.image(i)}))
                .collect();
            let cliques: Vec<Vec<IVec>> = e
                .cliques
                .iter()
                .map(|g| g.iter().map(|&i| c.coords(i).clone()).collect())
                .collect();
            let mut result = json!({
                "simplex_dim": e.dim(),
                "labels": e.labels,
                "terminal_cliques": cliques,
                "images": images,
                "validated": true,
            });
            if let Some(sys) = system {
                let vs = parse_vector_list(&sys)?;
                let s = check_rigid(&c, &vs)?.map_err(|nr| Error::RigidityFailure(nr.to_string()))?;
                let image = embed_system(&e, &s)?;
                result["system_image"] = match image {
                    Ok(t) => json!({"rigid": true, "system": t.report()}),
                    Err(nr) => json!({"rigid": false, "detail": nr.to_string()}),
                };
            }
            Output::Report(Report::new("embed", result).input("polytope", &polytope), true)
        }
        Command::K2screen { polytope, word, stages } => {
            let p = resolve_polytope(&polytope)?;
            let w = resolve_word(&word)?;
            let s = spectrum(&p, stages, ceiling()?)?;
            let list: Vec<(usize, Arc<LatticePolytope>)> = s
                .stages()
                .iter()
                .enumerate()
                .map(|(j, st)| (j, st.polytope.clone()))
                .collect();
            let r = k2_screen(&w.letters, &w.ring, &s.stages()[0].cols, &list)?;
            let ok = r.evaluates_to_identity_on_stages;
            Output::Report(
                Report::new("k2screen", r)
                    .input("polytope", &polytope)
                    .input("word", w.to_json())
                    .input("stages", stages),
                ok,
            )
        }
        Command::Dot { polytope, what, vectors } => {
            let p = resolve_polytope(&polytope)?;
            let name = p.name().unwrap_or("P").to_string();
            let c = cols_of(p);
            let system = || -> Result<_, Error> {
                let vs = parse_vector_list(vectors.as_deref().unwrap_or(""))?;
                check_rigid(&c, &vs)?.map_err(|nr| Error::RigidityFailure(nr.to_string()))
            };
            Output::Text(match what {
                DotWhat::Products => products_dot(&c, &name),
                DotWhat::System => system()?.to_dot(&name),
                DotWhat::Ysystem => {
                    let s = system()?;
                    let g = s
                        .y_graph
                        .clone()
                        .ok_or_else(|| Error::RigidityFailure("system is not Y-rigid".into()))?;
                    g.to_dot(&name)
                }
                DotWhat::Fan => fan_dot(c.polytope(), &name),
            })
        }
        Command::Sweep { side, sample } => {
            let result = match sample {
                None => serde_json::to_value(classify_sweep(side, exec)?).expect("summary JSON"),
                Some(n) => {
                    let polys = sample_polygons(side, n, cli.seed, exec)?;
                    let rows: Vec<Value> = polys
                        .iter()
                        .map(|vs| {
                            let verdict = LatticePolytope::from_full_dimensional(vs).and_then(|p| classify(&p));
                            match verdict {
                                Ok(c) => json!({"vertices": vs, "class": c.class}),
                                Err(e) => json!({"vertices": vs, "class": null, "reason": e.to_string()}),
                            }
                        })
                        .collect();
                    json!({"side": side, "sampled": rows})
                }
            };
            Output::Report(
                Report::new("sweep", result).input("side", side).input("seed", cli.seed),
                true,
            )
        }
    };
    Ok(out)
}

fn dot_id(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string().replace('-', "m")).collect();
    format!("v_{}", parts.join("_"))
}

fn products_dot(c: &ColSet, name: &str) -> String {
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&a, &b| c.coords(a).cmp(c.coords(b)));
    let mut s = format!("digraph \"{name}\" {{\n");
    for &i in &order {
        s += &format!("  {} [label=\"{:?}\"];\n", dot_id(c.coords(i)), c.coords(i));
    }
    let mut edges: Vec<(IVec, IVec, IVec)> = c
        .product_triples()
        .into_iter()
        .map(|(i, j, k)| (c.coords(i).clone(), c.coords(j).clone(), c.coords(k).clone()))
        .collect();
    edges.sort();
    for (u, v, w) in edges {
        s += &format!("  {} -> {} [label=\"·{:?}\"];\n", dot_id(&u), dot_id(&w), v);
    }
    s + "}\n"
}

fn fan_dot(p: &LatticePolytope, name: &str) -> String {
    let fan = normal_fan(p);
    let mut s = format!("graph \"{name} fan\" {{\n");
    for r in fan.rays() {
        s += &format!("  {} [label=\"{:?}\"];\n", dot_id(&r), r);
    }
    for cone in fan.cone_multiset() {
        for (i, a) in cone.iter().enumerate() {
            for b in &cone[i + 1..] {
                s += &format!("  {} -- {};\n", dot_id(a), dot_id(b));
            }
        }
    }
    s + "}\n"
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Output::Text(t)) => {
            emit(&t);
            ExitCode::SUCCESS
        }
        Ok(Output::Report(r, ok)) => {
            emit(&(r.to_pretty() + "\n"));
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
