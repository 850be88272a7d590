//! `transportlab` command-line front end.
//!
//! Every subcommand writes one JSON document to standard output (or CSV /
//! DOT where a tabular or graph form exists). Exit codes: 0 success,
//! 1 infeasible or false predicate, 2 size guard exceeded, 3 input error.

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use transportlab::io::{
    ehrhart_to_json, encoding_to_json, parse_instance, planar_problem_to_json, scalar_to_json,
    table2_from_json, table2_to_json, table3_to_json, Instance,
};
use transportlab::lattice::{
    count_tables, ehrhart_interpolate, graver_moves, integer_range, moves_connect, sample_table,
    semi_magic_count, EhrhartSamples, IntMargins2, IntTable2, SEMI_MAGIC_T_LIMIT, VOLUME_P_LIMIT,
};
use transportlab::linalg::affine_dimension;
use transportlab::polytope2::{
    birkhoff_degree, birkhoff_margins, diameter, dimension2, enumerate_vertices, facet_count,
    facet_indicator, hurkens_walk, is_feasible, northwest_corner, polytope_graph, PolytopeGraph,
};
use transportlab::polytope3::{
    axial_feasible, axial_nw_corner, graph_3way, junginger_reduce, universality_encode,
    verify_encoding, Margins3,
};
use transportlab::survey::{survey_2way, survey_axial, survey_planar, SurveyReport};
use transportlab::{Error, Margins2, Rational};

#[derive(Parser)]
#[command(
    name = "transportlab",
    version,
    about = "Exact experiments on transportation polytopes"
)]
struct Cli {
    /// Output format; `csv` applies to tabular results, `dot` to `graph`.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(clap::Args)]
struct Input {
    /// Instance file; standard input when omitted or `-`.
    instance: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SurveyArgs {
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Table shape such as `2x3` or `2x2x3`.
    #[arg(long)]
    shape: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Whether the polytope is non-empty.
    Feasible(Input),
    /// Affine dimension of the polytope.
    Dimension(Input),
    /// The northwest-corner vertex (2-way and axial).
    NwVertex(Input),
    /// All vertices in lexicographic order.
    Vertices(Input),
    /// Vertices and edges of the polytope graph.
    Graph(Input),
    /// Diameter of the polytope graph and the 2-way bounds.
    Diameter(Input),
    /// Facet-defining cells of a 2-way polytope.
    Facets(Input),
    /// Pivot walk between two vertices (`from`, `to` fields, or the first and last vertex).
    Hurkens(Input),
    /// Vertex count, degree and diameter of the Birkhoff polytope.
    Birkhoff {
        #[arg(long)]
        p: usize,
    },
    /// Number of integer tables with the given margins.
    Count(Input),
    /// Smallest and largest integer value of one cell, `i,j` counted from 1.
    Range {
        #[arg(long)]
        cell: String,
        #[command(flatten)]
        input: Input,
    },
    /// The basic 2x2 moves for the instance shape.
    Moves(Input),
    /// Whether the basic moves connect all integer tables.
    Connect(Input),
    /// Integer table after a seeded random walk from the northwest corner.
    Sample {
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        input: Input,
    },
    /// Semi-magic square counts for magic numbers 0..=t.
    Magic {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        t: u64,
    },
    /// Normalized volume of the Birkhoff polytope.
    Volume {
        #[arg(long)]
        p: usize,
    },
    /// Planar problem equivalent to an axial one.
    ReduceJunginger {
        /// Penalty; defaults to `1 + sum|c| * total`.
        #[arg(long)]
        big_m: Option<String>,
        #[command(flatten)]
        input: Input,
    },
    /// Slim axial encoding of `{y >= 0 : A y = b}`.
    EncodeUniversality(Input),
    /// Check that an encoding (or a system, encoded first) represents its source.
    VerifyEncoding(Input),
    /// Vertex counts of random generic 2-way polytopes.
    SurveyTable1(SurveyArgs),
    /// Vertex counts of random non-degenerate axial polytopes.
    SurveyTable2(SurveyArgs),
    /// Vertex counts of random non-degenerate planar polytopes.
    SurveyTable3(SurveyArgs),
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Input(String),
    #[error("cannot read instance: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Infeasible(_)) => 1,
            CliError::Core(
                Error::TooLarge { .. }
                | Error::TooMany { .. }
                | Error::TooLargeForExactCheck { .. }
                | Error::BudgetExceeded { .. },
            ) => 2,
            _ => 3,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn input_error(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// What a subcommand produced.
struct Output {
    json: Value,
    /// Header and rows for `--format csv`.
    csv: Option<(Vec<String>, Vec<Vec<String>>)>,
    dot: Option<String>,
    /// False predicate: exit code 1.
    negative: bool,
}

impl Output {
    fn new(json: Value) -> Self {
        Output {
            json,
            csv: None,
            dot: None,
            negative: false,
        }
    }

    fn csv(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.csv = Some((header.iter().map(|h| h.to_string()).collect(), rows));
        self
    }

    fn negative_if(mut self, flag: bool) -> Self {
        self.negative = flag;
        self
    }
}

fn read_instance(input: &Input) -> CliResult<Instance<Rational>> {
    let text = read_text(input)?;
    Ok(parse_instance(&text)?)
}

fn read_text(input: &Input) -> CliResult<String> {
    match &input.instance {
        Some(path) if path.as_os_str() != "-" => Ok(std::fs::read_to_string(path)?),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn two_way(inst: Instance<Rational>) -> CliResult<Margins2> {
    match inst {
        Instance::TwoWay(m) => Ok(m),
        _ => Err(input_error("this subcommand needs a 2way instance")),
    }
}

fn int_margins(input: &Input) -> CliResult<IntMargins2> {
    Ok(IntMargins2::from_margins(&two_way(read_instance(input)?)?)?)
}

fn margins3(inst: Instance<Rational>) -> CliResult<Margins3<Rational>> {
    match inst {
        Instance::Axial(p) => Ok(Margins3::Axial(p.margins)),
        Instance::Planar(m) => Ok(Margins3::Planar(m)),
        _ => Err(input_error("expected a 2way, axial or planar instance")),
    }
}

fn kind_name(m: &Margins3<Rational>) -> &'static str {
    match m {
        Margins3::Axial(_) => "axial",
        Margins3::Planar(_) => "planar",
    }
}

fn shape3(m: &Margins3<Rational>) -> Vec<usize> {
    let (p, q, s) = m.shape();
    vec![p, q, s]
}

fn cell_names2(p: usize, q: usize) -> Vec<String> {
    (1..=p)
        .flat_map(|i| (1..=q).map(move |j| format!("x_{i}_{j}")))
        .collect()
}

fn cell_names3(shape: (usize, usize, usize)) -> Vec<String> {
    let (p, q, s) = shape;
    let mut out = Vec::with_capacity(p * q * s);
    for i in 1..=p {
        for j in 1..=q {
            for k in 1..=s {
                out.push(format!("x_{i}_{j}_{k}"));
            }
        }
    }
    out
}

fn cell_strings(cells: &[Rational]) -> Vec<String> {
    cells.iter().map(transportlab::format_scalar).collect()
}

fn int_table_json(x: &IntTable2) -> Value {
    json!(x.rows())
}

fn edges_json(g: &PolytopeGraph) -> Value {
    json!(g.edges())
}

fn edge_rows(g: &PolytopeGraph) -> Vec<Vec<String>> {
    g.edges()
        .into_iter()
        .map(|(a, b)| vec![a.to_string(), b.to_string()])
        .collect()
}

/// Rows of one object as `key,value` pairs; values other than strings are JSON-encoded.
fn key_value_rows(v: &Value) -> Vec<Vec<String>> {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| {
                let text = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                vec![k.clone(), text]
            })
            .collect(),
        other => vec![vec!["value".into(), other.to_string()]],
    }
}

fn feasible(input: &Input) -> CliResult<Output> {
    let ok = match read_instance(input)? {
        Instance::TwoWay(m) => is_feasible(&m)?,
        Instance::Axial(p) => axial_feasible(&p.margins)?,
        Instance::Planar(m) => {
            m.is_consistent()
                && !Margins3::Planar(m)
                    .system()
                    .polytope()
                    .vertices()?
                    .is_empty()
        }
        Instance::System { system, .. } => !system.polytope::<Rational>().vertices()?.is_empty(),
        Instance::Encoding(e) => !e.face_polytope().vertices()?.is_empty(),
    };
    Ok(Output::new(json!({ "feasible": ok })).negative_if(!ok))
}

fn dimension(input: &Input) -> CliResult<Output> {
    let inst = read_instance(input)?;
    let json = match inst {
        Instance::TwoWay(m) => {
            if !is_feasible(&m)? {
                return Err(Error::Infeasible("row and column totals differ".into()).into());
            }
            let (p, q) = (m.p(), m.q());
            let dim = if m.all_positive() {
                dimension2(p, q) as isize
            } else {
                let vs = enumerate_vertices(&m)?;
                let pts: Vec<Vec<Rational>> =
                    vs.vertices.iter().map(|x| x.cells().to_vec()).collect();
                affine_dimension(&pts)
            };
            json!({"kind": "2way", "shape": [p, q], "dimension": dim})
        }
        other => {
            let m = margins3(other)?;
            let poly = m.system().polytope();
            let vs = poly.vertices()?;
            if vs.is_empty() {
                return Err(Error::Infeasible("no table satisfies the margins".into()).into());
            }
            json!({
                "kind": kind_name(&m),
                "shape": shape3(&m),
                "dimension": affine_dimension(&vs),
            })
        }
    };
    let rows = key_value_rows(&json);
    Ok(Output::new(json).csv(&["key", "value"], rows))
}

fn nw_vertex(input: &Input) -> CliResult<Output> {
    match read_instance(input)? {
        Instance::TwoWay(m) => {
            let x = northwest_corner(&m)?;
            let (p, q) = x.shape();
            Ok(
                Output::new(json!({"kind": "2way", "table": table2_to_json(&x)}))
                    .csv(&as_refs(&cell_names2(p, q)), vec![cell_strings(x.cells())]),
            )
        }
        Instance::Axial(pr) => {
            let x = axial_nw_corner(&pr.margins)?;
            Ok(
                Output::new(json!({"kind": "axial", "table": table3_to_json(&x)})).csv(
                    &as_refs(&cell_names3(x.shape())),
                    vec![cell_strings(x.cells())],
                ),
            )
        }
        _ => Err(input_error("nw-vertex needs a 2way or axial instance")),
    }
}

fn as_refs(names: &[String]) -> Vec<&str> {
    names.iter().map(String::as_str).collect()
}

fn vertices(input: &Input) -> CliResult<Output> {
    match read_instance(input)? {
        Instance::TwoWay(m) => {
            let vs = enumerate_vertices(&m)?;
            let rows = vs
                .vertices
                .iter()
                .map(|x| cell_strings(x.cells()))
                .collect();
            let json = json!({
                "kind": "2way",
                "shape": [m.p(), m.q()],
                "count": vs.len(),
                "degenerate": vs.degenerate,
                "vertices": vs.vertices.iter().map(table2_to_json).collect::<Vec<_>>(),
            });
            Ok(Output::new(json).csv(&as_refs(&cell_names2(m.p(), m.q())), rows))
        }
        other => {
            let m = margins3(other)?;
            let vs = transportlab::polytope3::enumerate_vertices_3way(&m)?;
            let rows = vs.iter().map(|x| cell_strings(x.cells())).collect();
            let json = json!({
                "kind": kind_name(&m),
                "shape": shape3(&m),
                "count": vs.len(),
                "degenerate": !transportlab::polytope3::is_nondegenerate_3way(&m, &vs),
                "vertices": vs.iter().map(table3_to_json).collect::<Vec<_>>(),
            });
            Ok(Output::new(json).csv(&as_refs(&cell_names3(m.shape())), rows))
        }
    }
}

fn graph(input: &Input) -> CliResult<Output> {
    let (kind, shape, tables, g) = match read_instance(input)? {
        Instance::TwoWay(m) => {
            let (vs, g) = polytope_graph(&m)?;
            let tables: Vec<Value> = vs.vertices.iter().map(table2_to_json).collect();
            ("2way", vec![m.p(), m.q()], tables, g)
        }
        other => {
            let m = margins3(other)?;
            let (vs, g) = graph_3way(&m)?;
            let tables: Vec<Value> = vs.iter().map(table3_to_json).collect();
            (kind_name(&m), shape3(&m), tables, g)
        }
    };
    let degrees: Vec<usize> = (0..g.vertex_count()).map(|v| g.degree(v)).collect();
    let json = json!({
        "kind": kind,
        "shape": shape,
        "vertices": tables,
        "edges": edges_json(&g),
        "degrees": degrees,
    });
    let mut out = Output::new(json).csv(&["from", "to"], edge_rows(&g));
    out.dot = Some(g.to_dot("transportation_polytope"));
    Ok(out)
}

fn diameter_cmd(input: &Input) -> CliResult<Output> {
    let json = match read_instance(input)? {
        Instance::TwoWay(m) => {
            let (vs, g) = polytope_graph(&m)?;
            let (p, q) = (m.p(), m.q());
            let d = diameter(&g);
            let facets = if m.all_positive() && p * q > 4 {
                Some(facet_count(&m)?)
            } else {
                None
            };
            json!({
                "kind": "2way",
                "shape": [p, q],
                "vertices": vs.len(),
                "diameter": d,
                "facets": facets,
                "hirsch_bound": facets.map(|f| f - dimension2(p, q)),
                "pivot_bound": 4 * (p + q - 2),
            })
        }
        other => {
            let m = margins3(other)?;
            let (vs, g) = graph_3way(&m)?;
            if vs.is_empty() {
                return Err(Error::Infeasible("no table satisfies the margins".into()).into());
            }
            json!({
                "kind": kind_name(&m),
                "shape": shape3(&m),
                "vertices": vs.len(),
                "diameter": diameter(&g),
            })
        }
    };
    let rows = key_value_rows(&json);
    Ok(Output::new(json).csv(&["key", "value"], rows))
}

fn facets(input: &Input) -> CliResult<Output> {
    let m = two_way(read_instance(input)?)?;
    let mut cells = Vec::new();
    let mut rows = Vec::new();
    for i in 0..m.p() {
        for j in 0..m.q() {
            let f = facet_indicator(&m, i, j)?;
            if f {
                cells.push(json!([i + 1, j + 1]));
            }
            rows.push(vec![
                (i + 1).to_string(),
                (j + 1).to_string(),
                f.to_string(),
            ]);
        }
    }
    let json = json!({"count": facet_count(&m)?, "facet_cells": cells});
    Ok(Output::new(json).csv(&["i", "j", "facet"], rows))
}

fn hurkens(input: &Input) -> CliResult<Output> {
    let text = read_text(input)?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let m = two_way(parse_instance(&text)?)?;
    let (from, to) = match (raw.get("from"), raw.get("to")) {
        (Some(a), Some(b)) => (table2_from_json(a)?, table2_from_json(b)?),
        (None, None) => {
            let vs = enumerate_vertices(&m)?;
            match (vs.vertices.first(), vs.vertices.last()) {
                (Some(a), Some(b)) => (a.clone(), b.clone()),
                _ => return Err(Error::Infeasible("polytope is empty".into()).into()),
            }
        }
        _ => return Err(input_error("give both `from` and `to`, or neither")),
    };
    let path = hurkens_walk(&m, &from, &to)?;
    let (p, q) = (m.p(), m.q());
    let rows = path
        .vertices
        .iter()
        .map(|x| cell_strings(x.cells()))
        .collect();
    let json = json!({
        "pivots": path.len(),
        "budget": 4 * (p + q - 2),
        "path": path.vertices.iter().map(table2_to_json).collect::<Vec<_>>(),
    });
    Ok(Output::new(json).csv(&as_refs(&cell_names2(p, q)), rows))
}

fn birkhoff(p: usize) -> CliResult<Output> {
    if p == 0 {
        return Err(input_error("p must be at least 1"));
    }
    let m = birkhoff_margins::<Rational>(p);
    let (vs, g) = polytope_graph(&m)?;
    let degrees: std::collections::BTreeSet<usize> =
        (0..g.vertex_count()).map(|v| g.degree(v)).collect();
    let json = json!({
        "p": p,
        "vertices": vs.len(),
        "degrees": degrees,
        "expected_degree": birkhoff_degree(p).to_string(),
        "diameter": diameter(&g),
    });
    let rows = key_value_rows(&json);
    Ok(Output::new(json).csv(&["key", "value"], rows))
}

fn count(input: &Input) -> CliResult<Output> {
    let m = int_margins(input)?;
    let n = count_tables(&m)?.to_string();
    Ok(Output::new(json!({ "count": n.clone() })).csv(&["count"], vec![vec![n]]))
}

fn parse_cell(text: &str) -> CliResult<(usize, usize)> {
    let bad = || input_error(format!("--cell expects i,j counted from 1, got {text:?}"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let i: usize = a.trim().parse().map_err(|_| bad())?;
    let j: usize = b.trim().parse().map_err(|_| bad())?;
    if i == 0 || j == 0 {
        return Err(bad());
    }
    Ok((i - 1, j - 1))
}

fn range(cell: &str, input: &Input) -> CliResult<Output> {
    let (i, j) = parse_cell(cell)?;
    let m = int_margins(input)?;
    let (lo, hi) = integer_range(&m, (i, j))?;
    let json = json!({"cell": [i + 1, j + 1], "min": lo, "max": hi});
    Ok(Output::new(json).csv(
        &["i", "j", "min", "max"],
        vec![vec![
            (i + 1).to_string(),
            (j + 1).to_string(),
            lo.to_string(),
            hi.to_string(),
        ]],
    ))
}

fn moves(input: &Input) -> CliResult<Output> {
    let m = two_way(read_instance(input)?)?;
    let basis = graver_moves(m.p(), m.q());
    let list: Vec<Value> = basis
        .moves
        .iter()
        .map(|mv| {
            json!({
                "rows": [mv.rows.0 + 1, mv.rows.1 + 1],
                "cols": [mv.cols.0 + 1, mv.cols.1 + 1],
                "matrix": mv.to_matrix(m.p(), m.q()),
            })
        })
        .collect();
    let rows = basis
        .moves
        .iter()
        .map(|mv| {
            [mv.rows.0, mv.rows.1, mv.cols.0, mv.cols.1]
                .iter()
                .map(|x| (x + 1).to_string())
                .collect()
        })
        .collect();
    let json = json!({"shape": [m.p(), m.q()], "count": basis.moves.len(), "moves": list});
    Ok(Output::new(json).csv(&["i1", "i2", "j1", "j2"], rows))
}

fn connect(input: &Input) -> CliResult<Output> {
    let ok = moves_connect(&int_margins(input)?)?;
    Ok(Output::new(json!({ "connected": ok })).negative_if(!ok))
}

fn sample(steps: u64, seed: u64, input: &Input) -> CliResult<Output> {
    let m = int_margins(input)?;
    let x = sample_table(&m, steps, seed)?;
    let row: Vec<String> = x
        .rows()
        .into_iter()
        .flatten()
        .map(|v| v.to_string())
        .collect();
    let json = json!({"steps": steps, "seed": seed, "table": int_table_json(&x)});
    Ok(Output::new(json).csv(&as_refs(&cell_names2(m.p(), m.q())), vec![row]))
}

fn magic(p: usize, t: u64) -> CliResult<Output> {
    if t > SEMI_MAGIC_T_LIMIT {
        return Err(Error::TooLarge {
            what: format!("magic number {t}"),
            limit: format!("t <= {SEMI_MAGIC_T_LIMIT}"),
        }
        .into());
    }
    let samples = EhrhartSamples {
        id: format!("semi-magic-{p}x{p}"),
        samples: (0..=t)
            .map(|k| Ok((k, semi_magic_count(p, k)?)))
            .collect::<Result<_, Error>>()?,
    };
    let rows = samples
        .samples
        .iter()
        .map(|(k, c)| vec![k.to_string(), c.to_string()])
        .collect();
    Ok(Output::new(ehrhart_to_json(&samples)).csv(&["t", "count"], rows))
}

fn volume(p: usize) -> CliResult<Output> {
    if p == 0 {
        return Err(input_error("p must be at least 1"));
    }
    if p > VOLUME_P_LIMIT {
        return Err(Error::TooLarge {
            what: format!("B_{p} volume"),
            limit: format!("p <= {VOLUME_P_LIMIT}"),
        }
        .into());
    }
    let dim = (p - 1) * (p - 1);
    let samples = EhrhartSamples {
        id: format!("B_{p}"),
        samples: (0..=dim as u64)
            .map(|t| Ok((t, semi_magic_count(p, t)?)))
            .collect::<Result<_, Error>>()?,
    };
    let coeffs: Vec<Rational> = ehrhart_interpolate(&samples, dim)?;
    let vol = transportlab::lattice::birkhoff_normalized_volume(p)?.to_string();
    let json = json!({
        "p": p,
        "dimension": dim,
        "normalized_volume": vol.clone(),
        "ehrhart_coefficients": coeffs.iter().map(scalar_to_json).collect::<Vec<_>>(),
    });
    Ok(Output::new(json).csv(&["p", "normalized_volume"], vec![vec![p.to_string(), vol]]))
}

fn reduce_junginger(big_m: Option<&str>, input: &Input) -> CliResult<Output> {
    let problem = match read_instance(input)? {
        Instance::Axial(p) => p,
        _ => return Err(input_error("reduce-junginger needs an axial instance")),
    };
    let big_m = big_m
        .map(|s| {
            transportlab::parse_scalar::<Rational>(s)
                .ok_or_else(|| input_error(format!("bad --big-m {s:?}")))
        })
        .transpose()?;
    let red = junginger_reduce(&problem, big_m)?;
    let json = json!({
        "planar": planar_problem_to_json(&red.planar.margins, red.planar.cost.as_deref()),
        "beta": scalar_to_json(&red.beta),
        "big_m": scalar_to_json(&red.big_m),
        "offset": scalar_to_json(&red.offset()),
    });
    Ok(Output::new(json))
}

fn encode(input: &Input) -> CliResult<Output> {
    match read_instance(input)? {
        Instance::System { system, bound } => {
            let enc = universality_encode::<Rational>(&system, bound)?;
            Ok(Output::new(encoding_to_json(&enc)))
        }
        _ => Err(input_error("encode-universality needs a system instance")),
    }
}

fn verify(input: &Input) -> CliResult<Output> {
    let enc = match read_instance(input)? {
        Instance::Encoding(e) => e,
        Instance::System { system, bound } => universality_encode::<Rational>(&system, bound)?,
        _ => {
            return Err(input_error(
                "verify-encoding needs an encoding or system instance",
            ))
        }
    };
    let r = verify_encoding(&enc)?;
    let json = json!({
        "holds": r.holds(),
        "source_vertices": r.source_vertices,
        "face_vertices": r.face_vertices,
        "source_edges": r.source_edges,
        "face_edges": r.face_edges,
        "source_integer_points": r.source_integer_points,
        "face_integer_points": r.face_integer_points,
        "source_dimension": r.source_dimension,
        "face_dimension": r.face_dimension,
        "vertex_bijection": r.vertex_bijection,
        "integer_bijection": r.integer_bijection,
    });
    let rows = key_value_rows(&json);
    Ok(Output::new(json)
        .csv(&["key", "value"], rows)
        .negative_if(!r.holds()))
}

fn parse_shape(text: &str, len: usize) -> CliResult<Vec<usize>> {
    let dims: Option<Vec<usize>> = text.split('x').map(|d| d.trim().parse().ok()).collect();
    match dims {
        Some(d) if d.len() == len && d.iter().all(|&x| x >= 1) => Ok(d),
        _ => Err(input_error(format!(
            "--shape expects {len} positive sizes joined by 'x', got {text:?}"
        ))),
    }
}

fn survey(table: u8, args: &SurveyArgs) -> CliResult<Output> {
    let report: SurveyReport = match table {
        1 => {
            let d = parse_shape(args.shape.as_deref().unwrap_or("2x3"), 2)?;
            survey_2way(d[0], d[1], args.trials, args.seed)?
        }
        2 => {
            let d = parse_shape(args.shape.as_deref().unwrap_or("2x2x2"), 3)?;
            survey_axial((d[0], d[1], d[2]), args.trials, args.seed)?
        }
        _ => {
            let d = parse_shape(args.shape.as_deref().unwrap_or("2x2x3"), 3)?;
            survey_planar((d[0], d[1], d[2]), args.trials, args.seed)?
        }
    };
    let rows = report
        .observed
        .iter()
        .map(|n| {
            let known = report
                .reference
                .as_ref()
                .map(|r| r.contains(n).to_string())
                .unwrap_or_default();
            vec![n.to_string(), known]
        })
        .collect();
    let json = serde_json::to_value(&report).map_err(|e| input_error(e.to_string()))?;
    Ok(Output::new(json)
        .csv(&["vertices", "in_reference"], rows)
        .negative_if(report.subset == Some(false)))
}

fn run(cli: &Cli) -> CliResult<Output> {
    match &cli.command {
        Command::Feasible(i) => feasible(i),
        Command::Dimension(i) => dimension(i),
        Command::NwVertex(i) => nw_vertex(i),
        Command::Vertices(i) => vertices(i),
        Command::Graph(i) => graph(i),
        Command::Diameter(i) => diameter_cmd(i),
        Command::Facets(i) => facets(i),
        Command::Hurkens(i) => hurkens(i),
        Command::Birkhoff { p } => birkhoff(*p),
        Command::Count(i) => count(i),
        Command::Range { cell, input } => range(cell, input),
        Command::Moves(i) => moves(i),
        Command::Connect(i) => connect(i),
        Command::Sample { steps, seed, input } => sample(*steps, *seed, input),
        Command::Magic { p, t } => magic(*p, *t),
        Command::Volume { p } => volume(*p),
        Command::ReduceJunginger { big_m, input } => reduce_junginger(big_m.as_deref(), input),
        Command::EncodeUniversality(i) => encode(i),
        Command::VerifyEncoding(i) => verify(i),
        Command::SurveyTable1(a) => survey(1, a),
        Command::SurveyTable2(a) => survey(2, a),
        Command::SurveyTable3(a) => survey(3, a),
    }
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)
        .map_err(|e| input_error(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| input_error(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| input_error(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| input_error(e.to_string()))
}

fn render(out: &Output, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(format!("{}\n", out.json)),
        Format::Csv => match &out.csv {
            Some((h, rows)) => csv_text(h, rows),
            None => csv_text(&["key".into(), "value".into()], &key_value_rows(&out.json)),
        },
        Format::Dot => out
            .dot
            .clone()
            .ok_or_else(|| input_error("--format dot is only available for graph")),
    }
}

/// `TRANSPORTLAB_THREADS` must be an integer >= 1 when set. Every library
/// routine runs on the calling thread, so any valid cap is already honored.
fn check_threads() -> CliResult<()> {
    match std::env::var("TRANSPORTLAB_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(input_error(format!(
                "TRANSPORTLAB_THREADS must be an integer >= 1, got {v:?}"
            ))),
        },
    }
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
    let result = check_threads().and_then(|_| run(&cli)).and_then(|out| {
        let text = render(&out, cli.format)?;
        Ok((text, out.negative))
    });
    match result {
        Ok((text, negative)) => {
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(3);
            }
            ExitCode::from(u8::from(negative))
        }
        Err(e) => {
            eprintln!("transportlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
