//! Command line front end. Instances, reduced graphs, and drawings all
//! travel as the line-oriented text documents `fmt` reads and writes, so
//! every subcommand can be piped into the next.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use crosscut::drawing::CombinatorialDrawing;
use crosscut::extract::{
    approx_cut_via_crossing, cut_from_cubic_drawing, cut_from_drawing, CrossingOracle,
    ExactOracle, PipelineParams, Ratio,
};
use crosscut::fmt::{parse_document, write_document, Document, MapLine};
use crosscut::graph::WeightedMultigraph;
use crosscut::harness::{verify_lemmas, CubicLeg, ExtractCheck, Verdict};
use crosscut::reduce::{attach_frame, reduce_chain, ReduceParams};
use crosscut::solver::cr::{
    cr_exact, cr_exact_rot, cr_exact_rot_seeded, cr_exact_seeded, SolverOptions,
};
use crosscut::solver::mwc::{mwc_exact, CutSolution, MultiwayInstance};
use crosscut::{Error, Result};

#[derive(Parser)]
#[command(
    name = "crosscut",
    version,
    about = "Three-terminal cuts by way of crossing numbers",
    long_about = "Three-terminal cuts by way of crossing numbers.\n\n\
        Graphs, instances, and drawings travel as line-oriented text \
        documents: `graph <nv> <ne>` first, then `v <name>` per vertex, \
        `e <u> <v> <w>` per edge, and optionally `terminals a b c`, \
        `rot <v> <edges...>` per vertex, and `cross ...` per crossing. \
        Solvers print `value <n>` before their witness; cut commands print \
        `value`, `cut`, `edge`, and `part` lines. Lines starting with `#` \
        are comments everywhere."
)]
struct Cli {
    /// Seed for anything randomized; when unset one is drawn and printed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Frame weight for the reduction. Defaults to n^5 for n vertices,
    /// which the cost bounds are stated at.
    #[arg(long, global = true)]
    weight: Option<u64>,

    /// Grid height for the cubic stage. The short default keeps the output
    /// readable; any drawing it is asked to absorb must cost less than
    /// (height - 2) / 2 crossings per patch, so raise it for tangled work.
    #[arg(long, global = true, default_value_t = 8)]
    grid_height: u64,

    /// Use seed 0 instead of drawing one from the clock.
    #[arg(long, global = true)]
    deterministic: bool,

    /// Write the main output document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random connected unit-weight instance with three terminals.
    Gen {
        /// Vertex count, at least 3.
        n: usize,
        /// Edge count; defaults to n, and must fit a connected simple graph.
        m: Option<usize>,
    },

    /// Weld the terminal frame onto an instance, or go on to the cubic stage.
    Reduce {
        /// Instance file with a `terminals` line.
        file: PathBuf,
        /// Which stage to print: the framed graph or the 3-regular one.
        #[arg(long, value_enum, default_value = "H")]
        stage: Stage,
    },

    /// Exact crossing number over free rotations, with a witness drawing.
    Cr {
        /// Graph file; rotation lines are ignored.
        file: PathBuf,
        /// Give up once the answer is known to exceed this.
        #[arg(long)]
        cap: Option<u64>,
        /// Give up after expanding this many search nodes.
        #[arg(long)]
        node_budget: Option<u64>,
        /// Run the plain search with every speedup disabled.
        #[arg(long)]
        no_prune: bool,
    },

    /// Exact crossing number with the file's rotation system prescribed.
    CrRot {
        /// Graph file with `rot` lines for every vertex.
        file: PathBuf,
        /// Give up once the answer is known to exceed this.
        #[arg(long)]
        cap: Option<u64>,
        /// Give up after expanding this many search nodes.
        #[arg(long)]
        node_budget: Option<u64>,
        /// Run the plain search with every speedup disabled.
        #[arg(long)]
        no_prune: bool,
    },

    /// Exact minimum-weight cut separating the three terminals.
    Mwc {
        /// Instance file with a `terminals` line.
        file: PathBuf,
    },

    /// Read a drawing of a reduced graph back into a cut of the instance.
    ///
    /// The reduction is rebuilt from the instance file, so pass the same
    /// --weight and --grid-height the drawing was made at.
    Extract {
        /// The original instance file the reduction was run on.
        instance: PathBuf,
        /// Drawing of the reduced graph, in the format `cr` prints.
        #[arg(long)]
        drawing: PathBuf,
        /// Which stage the drawing belongs to.
        #[arg(long, value_enum, default_value = "H")]
        stage: Stage,
    },

    /// Cut an instance by drawing its reduction; tiny ones are cut exactly.
    Pipeline {
        /// Instance file with a `terminals` line.
        file: PathBuf,
        /// Quality factor the oracle promises, as a rational like 3/2.
        #[arg(long, default_value = "1")]
        c0: String,
        /// Accuracy slack, as a rational like 1/10; smaller means more
        /// instances are cut exactly instead of drawn.
        #[arg(long, default_value = "1")]
        eps: String,
        /// `exact`, or `cmd:<command>`. The command is run with a graph
        /// file as its argument and must print a drawing of that graph.
        #[arg(long, default_value = "exact")]
        oracle: String,
    },

    /// Run randomized end-to-end checks of the reduction's cost guarantees.
    Verify {
        /// Largest instance size tried, between 3 and 7.
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        /// How many random instances to put through the full machinery.
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Accept searches that hit their budget instead of failing the run.
        #[arg(long)]
        allow_skips: bool,
    },

    /// Draw a drawing file as an SVG picture.
    Render {
        /// Drawing file with `rot` lines, as `cr` prints.
        file: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage {
    /// The instance with the terminal frame welded on.
    #[value(name = "H", alias = "h")]
    H,
    /// The 3-regular graph of grid patches.
    #[value(name = "Htilde", alias = "htilde")]
    Htilde,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.cmd {
        Cmd::Gen { n, m } => {
            let (n, m) = (*n, *m);
            let seed = resolve_seed(&cli);
            let max = n.saturating_mul(n.saturating_sub(1)) / 2;
            let m = m.unwrap_or_else(|| n.min(max));
            let inst = crosscut::harness::gen_instance(n, m, seed)?;
            let doc = Document::from_instance(inst.graph, inst.terminals);
            emit(&cli, &write_document(&doc)?)?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Reduce { file, stage } => {
            let doc = read_doc(file)?;
            let inst = instance_of(&doc, true)?;
            let params = reduce_params(&cli, inst.graph.vertex_count())?;
            let out = match stage {
                Stage::H => framed_document(&inst, &params)?,
                Stage::Htilde => cubic_document(&inst, &params)?,
            };
            emit(&cli, &write_document(&out)?)?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Cr { file, cap, node_budget, no_prune } => {
            let doc = read_doc(file)?;
            let opts = solver_options(*cap, *node_budget, *no_prune);
            // a file that is already a drawing warm-starts the search
            let res = match warm_start(&doc) {
                Some(ref s) => cr_exact_seeded(&doc.graph, &opts, s)?,
                None => cr_exact(&doc.graph, &opts)?,
            };
            println!("value {}", res.cost);
            println!("# nodes {}", res.nodes);
            let wdoc = Document::from_drawing(&res.witness);
            emit(&cli, &write_document(&wdoc)?)?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::CrRot { file, cap, node_budget, no_prune } => {
            let doc = read_doc(file)?;
            let rot = doc.require_rotation()?.clone();
            let opts = solver_options(*cap, *node_budget, *no_prune);
            let res = match warm_start(&doc) {
                Some(ref s) => cr_exact_rot_seeded(&doc.graph, &rot, &opts, s)?,
                None => cr_exact_rot(&doc.graph, &rot, &opts)?,
            };
            println!("value {}", res.cost);
            println!("# nodes {}", res.nodes);
            let wdoc = Document::from_drawing(&res.witness);
            emit(&cli, &write_document(&wdoc)?)?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Mwc { file } => {
            let doc = read_doc(file)?;
            let inst = instance_of(&doc, false)?;
            let sol = mwc_exact(&inst)?;
            emit(&cli, &cut_report(&inst.graph, &sol))?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Extract { instance, drawing, stage } => {
            let idoc = read_doc(instance)?;
            let inst = instance_of(&idoc, true)?;
            let params = reduce_params(&cli, inst.graph.vertex_count())?;
            let ddoc = read_doc(drawing)?;
            let d = ddoc.to_drawing()?;
            let sol = match stage {
                Stage::H => {
                    let art = attach_frame(&inst, &params)?;
                    cut_from_drawing(&art, &d)?
                }
                Stage::Htilde => {
                    let chain = reduce_chain(&inst, &params)?;
                    cut_from_cubic_drawing(&chain, &d)?
                }
            };
            emit(&cli, &cut_report(&inst.graph, &sol))?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Pipeline { file, c0, eps, oracle } => {
            let doc = read_doc(file)?;
            let inst = instance_of(&doc, true)?;
            let params = PipelineParams::new(parse_ratio(c0)?, parse_ratio(eps)?)?;
            let rp = reduce_params(&cli, inst.graph.vertex_count())?;
            let n = inst.graph.vertex_count();
            if params.below_threshold(n) {
                println!("# small instance, cut exactly");
            } else {
                println!("# reduced to a cubic crossing instance");
            }
            let sol = if oracle == "exact" {
                let o = ExactOracle { options: SolverOptions::default() };
                approx_cut_via_crossing(&inst, &o, &params, &rp)?
            } else if let Some(command) = oracle.strip_prefix("cmd:") {
                let o = CmdOracle { command: command.to_string() };
                approx_cut_via_crossing(&inst, &o, &params, &rp)?
            } else {
                return Err(Error::BadInstance(format!(
                    "unknown oracle {oracle:?}; use exact or cmd:<command>"
                )));
            };
            emit(&cli, &cut_report(&inst.graph, &sol))?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Verify { n_max, trials, allow_skips } => {
            let seed = resolve_seed(&cli);
            let report = verify_lemmas(*n_max, *trials, seed)?;
            emit(&cli, &verify_report(&report))?;
            let failures = report.failures();
            let skips = report.skips();
            if failures > 0 {
                eprintln!("{failures} trial(s) failed");
                return Ok(ExitCode::FAILURE);
            }
            if skips > 0 && !allow_skips {
                eprintln!("{skips} trial(s) hit a search budget; rerun with --allow-skips to accept");
                return Ok(ExitCode::FAILURE);
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Render { file } => {
            let doc = read_doc(file)?;
            let d = doc.to_drawing()?;
            emit(&cli, &render_svg(&d))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn read_doc(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path)?;
    parse_document(&text)
}

fn instance_of(doc: &Document, connected: bool) -> Result<MultiwayInstance> {
    let t = doc.require_terminals()?;
    if connected {
        MultiwayInstance::new(doc.graph.clone(), t)
    } else {
        MultiwayInstance::relaxed(doc.graph.clone(), t)
    }
}

fn resolve_seed(cli: &Cli) -> u64 {
    if let Some(s) = cli.seed {
        return s;
    }
    if cli.deterministic {
        return 0;
    }
    let s = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    println!("# seed {s}");
    s
}

fn default_weight(cli: &Cli, n: usize) -> Result<u64> {
    if let Some(w) = cli.weight {
        return Ok(w);
    }
    (n as u64).checked_pow(5).ok_or_else(|| {
        Error::TooLarge("no default frame weight for an instance this big; pass --weight".into())
    })
}

fn reduce_params(cli: &Cli, n: usize) -> Result<ReduceParams> {
    Ok(ReduceParams { frame_weight: default_weight(cli, n)?, grid_height: cli.grid_height })
}

/// The document's own drawing when it has one, as a cost bound the search
/// starts from. A file that fails to round into a drawing is just a graph.
fn warm_start(doc: &Document) -> Option<CombinatorialDrawing> {
    doc.rotation.as_ref()?;
    let d = doc.to_drawing().ok()?;
    d.is_realizable().then_some(d)
}

fn solver_options(cap: Option<u64>, node_budget: Option<u64>, no_prune: bool) -> SolverOptions {
    let mut o = if no_prune { SolverOptions::no_pruning() } else { SolverOptions::default() };
    o.cost_cap = cap;
    o.node_budget = node_budget;
    o
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cut_report(g: &WeightedMultigraph, sol: &CutSolution) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "value {}", sol.weight);
    let _ = writeln!(s, "cut {}", sol.cut.len());
    for &e in &sol.cut {
        let ed = g.edge(e);
        let _ = writeln!(s, "edge {} {} {} {}", e.index(), g.name(ed.u), g.name(ed.v), ed.weight);
    }
    for (i, part) in sol.parts.iter().enumerate() {
        for &v in part {
            let _ = writeln!(s, "part {} {}", i, g.name(v));
        }
    }
    s
}

fn param_line(from: &str, to: String) -> MapLine {
    MapLine { kind: "param".into(), from: from.into(), to }
}

fn framed_document(inst: &MultiwayInstance, params: &ReduceParams) -> Result<Document> {
    let art = attach_frame(inst, params)?;
    let mut out = Document::from_graph(art.graph.clone());
    out.terminals = Some(art.terminals);
    out.rotation = Some(art.rotation.clone());
    out.maps.push(param_line("frame-weight", params.frame_weight.to_string()));
    out.maps.push(param_line("source-edges", art.source_edges.to_string()));
    for (k, &e) in art.frame_edges.iter().enumerate() {
        out.maps.push(MapLine {
            kind: "edge".into(),
            from: e.index().to_string(),
            to: format!("frame{k}"),
        });
    }
    for (i, ring) in art.rings.iter().enumerate() {
        for &e in ring.iter() {
            out.maps.push(MapLine {
                kind: "ring".into(),
                from: i.to_string(),
                to: e.index().to_string(),
            });
        }
    }
    Ok(out)
}

fn cubic_document(inst: &MultiwayInstance, params: &ReduceParams) -> Result<Document> {
    let chain = reduce_chain(inst, params)?;
    let cub = &chain.cubic;
    let art = &chain.anchored;
    let mut out = Document::from_graph(cub.graph.clone());
    out.rotation = Some(cub.rows.clone());
    out.maps.push(param_line("frame-weight", params.frame_weight.to_string()));
    out.maps.push(param_line("grid-height", params.grid_height.to_string()));
    out.maps.push(param_line("source-edges", art.source_edges.to_string()));

    // Which welded edge each unit strand half came from.
    let mut owner = vec![usize::MAX; chain.expansion.graph.edge_count()];
    for (ae, strands) in chain.expansion.strands.iter().enumerate() {
        for s in strands {
            owner[s.tail_half.index()] = ae;
            owner[s.head_half.index()] = ae;
        }
    }
    let tag = |ae: usize| {
        if ae < art.source_edges {
            format!("g{ae}")
        } else {
            format!("frame{}", ae - art.source_edges)
        }
    };
    for e in cub.graph.edge_ids() {
        let span = &cub.spans[e.index()];
        if span.is_empty() {
            continue;
        }
        let mut lineage: Vec<usize> = span.iter().map(|&(h, _)| owner[h.index()]).collect();
        lineage.sort_unstable();
        lineage.dedup();
        // several map lines per edge if the list runs long; readers join
        // lines sharing a `from`
        let mut chunk = String::new();
        for ae in lineage {
            let t = tag(ae);
            if !chunk.is_empty() && chunk.len() + t.len() + 1 > 180 {
                out.maps.push(MapLine {
                    kind: "edge".into(),
                    from: e.index().to_string(),
                    to: std::mem::take(&mut chunk),
                });
            }
            if !chunk.is_empty() {
                chunk.push(',');
            }
            chunk.push_str(&t);
        }
        out.maps.push(MapLine { kind: "edge".into(), from: e.index().to_string(), to: chunk });
    }
    Ok(out)
}

fn parse_ratio(s: &str) -> Result<Ratio> {
    let bad = || Error::BadInstance(format!("{s:?} is not a ratio; write 3 or 3/2"));
    let (a, b) = s.split_once('/').unwrap_or((s, "1"));
    let num: u64 = a.trim().parse().map_err(|_| bad())?;
    let den: u64 = b.trim().parse().map_err(|_| bad())?;
    Ratio::new(num, den)
}

/// Runs a user-supplied drawing tool: the graph goes to a temp file, the
/// command gets its path as `$1`, and stdout comes back as the drawing.
struct CmdOracle {
    command: String,
}

impl CrossingOracle for CmdOracle {
    fn draw(&self, g: &WeightedMultigraph) -> Result<CombinatorialDrawing> {
        let doc = Document::from_graph(g.clone());
        let text = write_document(&doc)?;
        let path = std::env::temp_dir().join(format!(
            "crosscut-oracle-{}-{}.graph",
            std::process::id(),
            g.edge_count()
        ));
        fs::write(&path, text)?;
        let ran = std::process::Command::new("sh")
            .arg("-c")
            .arg(format!("{} \"$1\"", self.command))
            .arg("sh")
            .arg(&path)
            .output();
        let _ = fs::remove_file(&path);
        let outp = ran?;
        if !outp.status.success() {
            return Err(Error::BadDrawing(format!(
                "oracle command failed with status {}",
                outp.status
            )));
        }
        let text = String::from_utf8(outp.stdout)
            .map_err(|_| Error::BadDrawing("oracle output is not utf-8".into()))?;
        parse_document(&text)?.to_drawing()
    }
}

fn opt_u64(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}

fn extract_field(x: &Option<ExtractCheck>) -> String {
    match x {
        None => "-".into(),
        Some(c) => {
            format!("{}:{}:{}", if c.feasible { "ok" } else { "bad" }, c.size, c.weight)
        }
    }
}

fn verify_report(report: &crosscut::harness::HarnessReport) -> String {
    let mut s = String::new();
    s.push_str(
        "# one line per trial, fields in fixed order:\n\
         #   trial seed=<u64> n=<vertices> m=<edges> mc=<optimal cut weight>\n\
         #   frame=<frame weight> bound=<certified ceiling> drawn=<built drawing cost>\n\
         #   rot=<exact cost, rotation held|-> free=<exact cost, rotation free|->\n\
         #   ratio=<free over frame*mc|-> rotx=<extract check> freex=<extract check>\n\
         #   cubic=<toy cubic leg> ms=<elapsed> verdict=<pass|skip|fail>\n\
         # an extract check reads ok:<cut size>:<cut weight>, bad:..., or -;\n\
         # the cubic leg reads done:<cost>:<rot cost|->:<ok|bad>:<size>:<weight>,\n\
         # skipped, failed, or - past the toy size limit; notes follow on # lines\n",
    );
    let mut pass = 0usize;
    let mut skip = 0usize;
    let mut fail = 0usize;
    for t in &report.trials {
        match t.verdict {
            Verdict::Pass => pass += 1,
            Verdict::Skip => skip += 1,
            Verdict::Fail => fail += 1,
        }
        let ratio = t
            .lemma2_ratio
            .map(|r| format!("{r:.4}"))
            .unwrap_or_else(|| "-".into());
        let cubic = match &t.cubic {
            CubicLeg::NotTried => "-".into(),
            CubicLeg::Skipped(_) => "skipped".into(),
            CubicLeg::Failed(_) => "failed".into(),
            CubicLeg::Done(c) => format!(
                "done:{}:{}:{}:{}:{}",
                c.cost,
                opt_u64(c.rot_cost),
                if c.feasible { "ok" } else { "bad" },
                c.cut_size,
                c.cut_weight
            ),
        };
        let verdict = match t.verdict {
            Verdict::Pass => "pass",
            Verdict::Skip => "skip",
            Verdict::Fail => "fail",
        };
        let _ = writeln!(
            s,
            "trial seed={} n={} m={} mc={} frame={} bound={} drawn={} rot={} free={} \
             ratio={} rotx={} freex={} cubic={} ms={} verdict={}",
            t.seed,
            t.n,
            t.m,
            t.cut_weight,
            t.frame_weight,
            t.bound,
            t.drawn_cost,
            opt_u64(t.cr_fixed),
            opt_u64(t.cr_free),
            ratio,
            extract_field(&t.fixed_extract),
            extract_field(&t.free_extract),
            cubic,
            t.millis,
            verdict
        );
        match &t.cubic {
            CubicLeg::Skipped(why) => {
                let _ = writeln!(s, "# cubic note: {why}");
            }
            CubicLeg::Failed(why) => {
                let _ = writeln!(s, "# cubic note: {why}");
            }
            _ => {}
        }
    }
    let _ = writeln!(
        s,
        "summary trials={} pass={} skip={} fail={}",
        report.trials.len(),
        pass,
        skip,
        fail
    );
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Straight-line picture of the planarization: each connected piece gets
/// its outer face pinned on a circle and everything else relaxed to the
/// average of its neighbors. Crossings show as small hollow squares.
fn render_svg(d: &CombinatorialDrawing) -> String {
    let p = d.planarize();
    let g = &p.graph;
    let faces = p.rotation.trace_faces(g);
    let comps = g.components();

    let mut pos = vec![(0.0f64, 0.0f64); g.vertex_count()];
    let mut origin_x = 40.0f64;
    for comp in &comps {
        if comp.len() == 1 {
            pos[comp[0].index()] = (origin_x, 220.0);
            origin_x += 120.0;
            continue;
        }
        let inside: std::collections::BTreeSet<usize> =
            comp.iter().map(|v| v.index()).collect();
        let outer = faces
            .faces
            .iter()
            .filter(|w| w.first().is_some_and(|d0| inside.contains(&d0.from.index())))
            .max_by_key(|w| w.len());
        let ring: Vec<usize> = match outer {
            Some(w) => {
                let mut seen = std::collections::BTreeSet::new();
                w.iter()
                    .map(|dart| dart.from.index())
                    .filter(|v| seen.insert(*v))
                    .collect()
            }
            None => comp.iter().map(|v| v.index()).collect(),
        };

        let r = 180.0;
        let cx = origin_x + r;
        let cy = 220.0;
        let mut fixed = vec![false; g.vertex_count()];
        for (k, &v) in ring.iter().enumerate() {
            let a = std::f64::consts::TAU * k as f64 / ring.len() as f64;
            pos[v] = (cx + r * a.cos(), cy + r * a.sin());
            fixed[v] = true;
        }
        for (k, v) in comp.iter().enumerate() {
            if !fixed[v.index()] {
                // spread the start positions a little so nothing begins stacked
                let a = 0.37 * k as f64;
                pos[v.index()] = (cx + 3.0 * a.cos(), cy + 3.0 * a.sin());
            }
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
        for e in g.edge_ids() {
            let [u, v] = g.edge(e).ends();
            adj[u.index()].push(v.index());
            adj[v.index()].push(u.index());
        }
        for _ in 0..300 {
            for v in comp {
                let i = v.index();
                if fixed[i] || adj[i].is_empty() {
                    continue;
                }
                let (mut sx, mut sy) = (0.0, 0.0);
                for &u in &adj[i] {
                    sx += pos[u].0;
                    sy += pos[u].1;
                }
                let k = adj[i].len() as f64;
                pos[i] = (sx / k, sy / k);
            }
        }
        origin_x += 2.0 * r + 80.0;
    }

    let (mut min_x, mut min_y, mut max_x, mut max_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in &pos {
        min_x = min_x.min(x);
        min_y = min_y.min(y);
        max_x = max_x.max(x);
        max_y = max_y.max(y);
    }
    if pos.is_empty() {
        (min_x, min_y, max_x, max_y) = (0.0, 0.0, 100.0, 100.0);
    }
    let pad = 30.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.1} {:.1} {:.1} {:.1}\" \
         font-family=\"monospace\" font-size=\"11\">",
        min_x - pad,
        min_y - pad,
        (max_x - min_x) + 2.0 * pad,
        (max_y - min_y) + 2.0 * pad
    );
    let _ = writeln!(s, "<!-- cost {} -->", d.cost());
    for e in g.edge_ids() {
        let [u, v] = g.edge(e).ends();
        let (x1, y1) = pos[u.index()];
        let (x2, y2) = pos[v.index()];
        let _ = writeln!(
            s,
            "<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" \
             stroke=\"#555\" stroke-width=\"1.2\"/>"
        );
    }
    for v in g.vertices() {
        let (x, y) = pos[v.index()];
        if p.record_at[v.index()].is_some() {
            let _ = writeln!(
                s,
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"6\" height=\"6\" \
                 fill=\"white\" stroke=\"#c33\" stroke-width=\"1.2\"/>",
                x - 3.0,
                y - 3.0
            );
        } else {
            let _ = writeln!(
                s,
                "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"3.5\" fill=\"#2a6\"/>"
            );
            let _ = writeln!(
                s,
                "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>",
                x + 5.0,
                y - 5.0,
                xml_escape(g.name(v))
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
