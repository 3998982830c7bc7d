//! `convexhyper` command-line interface.
//!
//! Bodies are read from and written to the JSON document format of the
//! library. Results go to stdout as JSON with 17 significant digits.
//! Exit codes: 0 success, 2 invalid input, 3 infeasible request, 4 I/O.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use convexhyper::congruence::{congruence_distance, SearchParams};
use convexhyper::geometry::hausdorff::hausdorff;
use convexhyper::geometry::steiner::{recenter, steiner, steiner_quadrature};
use convexhyper::geometry::{minkowski_sum, sample_support, scale, vertex_sum_polytope, BodyRep};
use convexhyper::io::json::{document_to_value, parse_body, BodyDocument};
use convexhyper::io::{plot_svg_2d, write_atomic, Corpus};
use convexhyper::quadrature::{make_grid_2d, make_grid_3d, SphericalGrid, UnitVector, DEFAULT_GRID_2D, DEFAULT_GRID_3D};
use convexhyper::regularization::{regularize, RegularizationParams};
use convexhyper::truncation::{default_candidates, desymmetrize, isotropy_estimate, truncate_with_face, TruncationSpec};
use convexhyper::Error;

const GRID_ENV: &str = "CONVEXHYPER_GRID";

#[derive(Parser)]
#[command(name = "convexhyper", version, about = "Convex bodies through their support functions")]
struct Cli {
    #[command(flatten)]
    grid: GridArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct GridArgs {
    /// Nodes of the planar grid (default 2048).
    #[arg(long = "grid-2d", global = true, value_name = "M")]
    grid_2d: Option<usize>,
    /// Latitudes x longitudes of the spatial grid (default 64x128).
    #[arg(long = "grid-3d", global = true, value_name = "LATxLON")]
    grid_3d: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Support value h(x) of a body.
    Support {
        #[arg(long = "in")]
        input: PathBuf,
        /// Direction, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Sample the support function on the grid and write a sampled body.
    Sample {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hausdorff distance of two bodies.
    Hausdorff { a: PathBuf, b: PathBuf },
    /// Steiner point of a body.
    Steiner {
        #[arg(long = "in")]
        input: PathBuf,
        /// Evaluate the defining integral on the grid instead of the exact rules.
        #[arg(long)]
        quadrature: bool,
    },
    /// Translate a body so that its Steiner point is the origin.
    Recenter {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Minkowski combination a·A + b·B.
    Minkowski {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "scale-a", default_value_t = 1.0)]
        scale_a: f64,
        #[arg(long = "scale-b", default_value_t = 1.0)]
        scale_b: f64,
        /// For two polytopes, write the explicit vertex-sum polytope.
        #[arg(long)]
        explicit: bool,
    },
    /// Schneider regularization recenter(T(D) + t·B).
    Regularize {
        #[arg(long)]
        t: f64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = RegularizationParams::DEFAULT_RADIAL_NODES)]
        radial_nodes: usize,
        #[arg(long, default_value_t = RegularizationParams::DEFAULT_ANGULAR_NODES)]
        angular_nodes: usize,
    },
    /// (eps, u)-truncation of a polytope.
    Truncate {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long)]
        eps: f64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Destroy the symmetries of a body within a Hausdorff budget.
    Desymmetrize {
        #[arg(long)]
        budget: f64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Candidate symmetries g with hausdorff(gD, D) < tol.
    Symmetries {
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Distance between congruence classes.
    Congruence {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        /// Restrict the search to proper rotations.
        #[arg(long = "so-n")]
        so_n: bool,
        /// Angles of the planar coarse scan.
        #[arg(long)]
        coarse: Option<usize>,
    },
    /// SVG outlines of planar bodies.
    Plot {
        bodies: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded random polytope corpus.
    Corpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// e.g. "n=2,vertices=12,bodies=20;n=3,vertices=30,bodies=10"
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

/// JSON text with every float printed to 17 significant digits.
fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent + 1);
    match v {
        Value::Number(n) if n.is_f64() => out.push_str(&fmt_num(n.as_f64().unwrap())),
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                render(x, indent, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad);
                render(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                render(x, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

fn to_text(v: &Value) -> String {
    let mut s = String::new();
    render(v, 0, &mut s);
    s.push('\n');
    s
}

fn read_body(path: &Path) -> Result<BodyDocument, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_body(&text)
}

fn write_body(path: &Path, doc: &BodyDocument) -> Result<(), Error> {
    write_atomic(path, to_text(&document_to_value(doc)).as_bytes())
}

fn parse_vector(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad number {p:?} in {s:?}")))
        })
        .collect()
}

fn parse_latlon(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::InvalidArgument(format!("expected LATxLON, got {s:?}"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

struct GridChoice {
    m: usize,
    latlon: (usize, usize),
}

impl GridChoice {
    // flags override the environment, which overrides the defaults
    fn resolve(args: &GridArgs) -> Result<Self, Error> {
        let mut choice = GridChoice {
            m: DEFAULT_GRID_2D,
            latlon: DEFAULT_GRID_3D,
        };
        if let Ok(env) = std::env::var(GRID_ENV) {
            for token in env.split([',', ';', ' ']).map(str::trim).filter(|t| !t.is_empty()) {
                if token.contains(['x', 'X']) {
                    choice.latlon = parse_latlon(token)?;
                } else {
                    choice.m = token
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("bad {GRID_ENV} token {token:?}")))?;
                }
            }
        }
        if let Some(m) = args.grid_2d {
            choice.m = m;
        }
        if let Some(s) = &args.grid_3d {
            choice.latlon = parse_latlon(s)?;
        }
        Ok(choice)
    }

    fn grid(&self, dim: usize) -> Result<SphericalGrid, Error> {
        match dim {
            2 => make_grid_2d(self.m),
            3 => make_grid_3d(self.latlon.0, self.latlon.1),
            n => convexhyper::quadrature::default_grid(n),
        }
    }
}

fn rotation_json(g: &convexhyper::Rotation) -> Value {
    json!(g.rows())
}

fn run(cli: Cli) -> Result<(), Error> {
    let grids = GridChoice::resolve(&cli.grid)?;
    let print = |v: Value| print!("{}", to_text(&v));
    match cli.command {
        Command::Support { input, x } => {
            let doc = read_body(&input)?;
            let x = parse_vector(&x)?;
            let h = convexhyper::eval_support(&doc.body, &x)?;
            print(json!({ "support": h }));
        }
        Command::Sample { input, out } => {
            let doc = read_body(&input)?;
            let grid = Arc::new(grids.grid(doc.body.dim())?);
            let samples = sample_support(&doc.body, &grid)?;
            let sampled = BodyDocument {
                body: BodyRep::Sampled(samples),
                ..doc
            };
            write_body(&out, &sampled)?;
        }
        Command::Hausdorff { a, b } => {
            let (a, b) = (read_body(&a)?, read_body(&b)?);
            let grid = grids.grid(a.body.dim())?;
            print(json!({ "hausdorff": hausdorff(&a.body, &b.body, &grid)? }));
        }
        Command::Steiner { input, quadrature } => {
            let doc = read_body(&input)?;
            let grid = grids.grid(doc.body.dim())?;
            let s = if quadrature {
                steiner_quadrature(&doc.body, &grid)?
            } else {
                steiner(&doc.body, &grid)?
            };
            print(json!({ "steiner": s.coords }));
        }
        Command::Recenter { input, out } => {
            let doc = read_body(&input)?;
            let grid = grids.grid(doc.body.dim())?;
            let body = recenter(&doc.body, &grid)?;
            write_body(&out, &BodyDocument { body, ..doc })?;
        }
        Command::Minkowski {
            a,
            b,
            out,
            scale_a,
            scale_b,
            explicit,
        } => {
            let (a, b) = (read_body(&a)?, read_body(&b)?);
            let (sa, sb) = (scale(scale_a, &a.body)?, scale(scale_b, &b.body)?);
            let body = if explicit {
                vertex_sum_polytope(&sa, &sb)?
            } else {
                minkowski_sum(&sa, &sb)?
            };
            write_body(&out, &BodyDocument::new(body))?;
        }
        Command::Regularize {
            t,
            input,
            out,
            radial_nodes,
            angular_nodes,
        } => {
            let doc = read_body(&input)?;
            let grid = grids.grid(doc.body.dim())?;
            let params = RegularizationParams::with_resolution(t, radial_nodes, angular_nodes)?;
            let body = regularize(&doc.body, &params, &grid)?;
            write_body(&out, &BodyDocument { body, ..doc }.with_metadata("regularized_t", t.to_string()))?;
        }
        Command::Truncate { u, eps, input, out } => {
            let doc = read_body(&input)?;
            let grid = grids.grid(doc.body.dim())?;
            let u = UnitVector::normalize(&parse_vector(&u)?)?;
            let (body, face) = truncate_with_face(&doc.body, &TruncationSpec::new(u, eps)?, &grid)?;
            write_body(&out, &BodyDocument { body, ..doc })?;
            print(json!({ "face_diameter": face.diameter, "face_vertices": face.vertex_set }));
        }
        Command::Desymmetrize { budget, input, out } => {
            let doc = read_body(&input)?;
            let grid = grids.grid(doc.body.dim())?;
            let (body, faces) = desymmetrize(&doc.body, budget, &grid)?;
            let reference = recenter(&doc.body, &grid)?;
            let displacement = hausdorff(&body, &reference, &grid)?;
            write_body(&out, &BodyDocument { body, ..doc })?;
            let faces: Vec<Value> = faces
                .iter()
                .map(|f| json!({ "normal": f.normal.coords(), "diameter": f.diameter, "vertices": f.vertex_set }))
                .collect();
            print(json!({ "displacement": displacement, "faces": faces }));
        }
        Command::Symmetries { tol, input } => {
            let doc = read_body(&input)?;
            let grid = grids.grid(doc.body.dim())?;
            let centered = recenter(&doc.body, &grid)?;
            let candidates = default_candidates(centered.dim())?;
            let found = isotropy_estimate(&centered, &candidates, tol, &grid)?;
            print(json!({
                "candidates": candidates.len(),
                "count": found.len(),
                "symmetries": found.iter().map(rotation_json).collect::<Vec<_>>(),
            }));
        }
        Command::Congruence {
            a,
            b,
            tol,
            so_n,
            coarse,
        } => {
            let (a, b) = (read_body(&a)?, read_body(&b)?);
            let grid = grids.grid(a.body.dim())?;
            let mut search = SearchParams {
                proper_only: so_n,
                ..Default::default()
            };
            if let Some(c) = coarse {
                search.coarse_2d = c;
            }
            let r = congruence_distance(&a.body, &b.body, &grid, &search)?;
            let mut v = json!({
                "distance": r.distance,
                "rotation_matrix": rotation_json(&r.optimizer),
                "certificate_size": r.certificate.len(),
            });
            if let Some(t) = tol {
                v["congruent"] = json!(r.distance < t);
            }
            print(v);
        }
        Command::Plot { bodies, out } => {
            let docs: Vec<BodyRep> = bodies.iter().map(|p| read_body(p).map(|d| d.body)).collect::<Result<_, _>>()?;
            plot_svg_2d(&docs, &out)?;
        }
        Command::Corpus { seed, spec, out } => {
            let corpus = Corpus::generate(seed, &spec)?;
            write_atomic(&out, corpus.to_json().as_bytes())?;
            print(json!({ "bodies": corpus.bodies.len() }));
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 4,
        Error::EmptyResult { .. } | Error::InfeasibleBudget { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("convexhyper: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
