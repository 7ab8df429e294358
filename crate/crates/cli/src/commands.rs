use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use kemeny_core::dynamic::{self, MaintenanceMode, SampleStore};
use kemeny_core::exact::kemeny_eigen;
use kemeny_core::rng::{stream, Domain};
use kemeny_core::ttf::{estimate_kemeny, EstimateConfig, Method, RootPolicy, SampleSize};
use kemeny_core::verify::{run_battery, MAX_BATTERY_NODES};
use kemeny_core::{Error, Graph};

use crate::{Cli, Command, EstimatorArgs, IndexAction, ModeArg, ReplayMode};

/// One machine-readable result line.
#[derive(Debug, Serialize)]
struct RunReport {
    command: &'static str,
    n: usize,
    m: usize,
    /// Eccentricity of the root, the diameter proxy used for planning.
    #[serde(skip_serializing_if = "Option::is_none")]
    eccentricity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    root: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rel_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    walk_steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    /// Wall-clock seconds per phase.
    timings: BTreeMap<&'static str, f64>,
}

impl RunReport {
    fn new(command: &'static str, graph: &Graph) -> Self {
        RunReport {
            command,
            n: graph.node_count(),
            m: graph.edge_count(),
            eccentricity: None,
            root: None,
            kappa: None,
            kappa_hat: None,
            rel_error: None,
            samples: None,
            method: None,
            walk_steps: None,
            seed: None,
            timings: BTreeMap::new(),
        }
    }

    fn from_store(command: &'static str, store: &SampleStore) -> Self {
        let graph = store.graph();
        RunReport {
            root: Some(graph.label(store.root())),
            eccentricity: Some(graph.eccentricity_from(store.root())),
            kappa_hat: Some(store.current_estimate()),
            samples: Some(store.sample_count() as u64),
            method: Some(store.method()),
            seed: Some(store.seed()),
            ..RunReport::new(command, graph)
        }
    }
}

/// One line of `update-replay` output.
#[derive(Debug, Serialize)]
struct UpdateLine {
    step: usize,
    op: &'static str,
    u: u64,
    v: u64,
    kappa_hat: f64,
    latency_s: f64,
    touched: usize,
    wilson_walks: usize,
    walk_steps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    resistance: Option<f64>,
    reference_repaired: bool,
    ess: f64,
}

#[derive(Debug, Serialize)]
struct TraceLine {
    sample_index: usize,
    f: i128,
    walk_steps: u64,
}

pub fn run(cli: Cli) -> Result<bool> {
    let threads = resolve_threads(cli.threads)?;
    match cli.command {
        Command::Exact { graph } => cmd_exact(&graph),
        Command::Estimate {
            graph,
            est,
            reference,
            trace,
        } => cmd_estimate(&graph, &est, threads, reference, trace.as_deref()),
        Command::Index { action } => match action {
            IndexAction::Build { graph, out, mode, est } => cmd_index_build(&graph, &out, mode, &est, threads),
            IndexAction::Rebuild { graph, index, out } => {
                cmd_index_rebuild(&graph, &index, out.as_deref().unwrap_or(&index), threads)
            }
        },
        Command::UpdateReplay {
            graph,
            index,
            updates,
            mode,
            save_index,
            save_graph,
        } => cmd_update_replay(
            &graph,
            &index,
            &updates,
            mode,
            threads,
            save_index.as_deref(),
            save_graph.as_deref(),
        ),
        Command::GenUpdates {
            graph,
            count,
            insert_frac,
            seed,
            out,
        } => cmd_gen_updates(&graph, count, insert_frac, seed, &out),
        Command::OracleCheck {
            max_n,
            graphs_per_size,
            seed,
        } => return cmd_oracle_check(max_n, graphs_per_size, seed),
    }
    .map(|_| true)
}

fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>> {
    match std::env::var("KF_THREADS") {
        Ok(v) => {
            let t: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("KF_THREADS={v:?} is not a thread count")))?;
            Ok(Some(t))
        }
        Err(_) => Ok(flag),
    }
    .and_then(|t| match t {
        Some(0) => Err(Error::InvalidArgument("thread count must be positive".into()).into()),
        t => Ok(t),
    })
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Parses an edge list and keeps its largest connected component.
fn load_graph(path: &Path) -> Result<Graph> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if ext != "txt" && ext != "edges" {
        return Err(Error::InvalidArgument(format!(
            "{}: graph files must end in .txt or .edges",
            path.display()
        ))
        .into());
    }
    let file = File::open(path).map_err(Error::Io).with_context(|| format!("opening {}", path.display()))?;
    let parsed = Graph::parse_edge_list(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))?;
    let graph = parsed.graph;
    if graph.is_connected() {
        return Ok(graph);
    }
    let (lcc, _) = graph.largest_connected_component();
    eprintln!(
        "note: {} is disconnected; using its largest component ({} of {} nodes)",
        path.display(),
        lcc.node_count(),
        graph.node_count()
    );
    Ok(lcc)
}

fn estimate_config(graph: &Graph, est: &EstimatorArgs, threads: Option<usize>) -> Result<EstimateConfig> {
    let root = match est.root {
        None => RootPolicy::MaxDegree,
        Some(label) => match graph.label_index().get(&label) {
            Some(&r) => RootPolicy::Explicit(r),
            None => bail!(Error::InvalidArgument(format!("root {label} is not a node of the graph"))),
        },
    };
    let samples = match est.eps {
        Some(eps) => SampleSize::Planned { eps, pf: est.pf },
        None => SampleSize::Fixed(est.samples),
    };
    Ok(EstimateConfig {
        samples,
        root,
        path_tree: est.tau0.into(),
        method: est.method.into(),
        seed: est.seed,
        threads,
    })
}

fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn cmd_exact(path: &Path) -> Result<()> {
    let graph = load_graph(path)?;
    let start = Instant::now();
    let kappa = kemeny_eigen(&graph)?;
    let elapsed = start.elapsed();
    let shown = sig12(kappa);
    eprintln!("kappa = {shown}  (n = {}, m = {})", graph.node_count(), graph.edge_count());
    let rounded: f64 = shown.parse()?;
    emit(&RunReport {
        kappa: Some(rounded),
        timings: BTreeMap::from([("eigensolve_s", secs(elapsed))]),
        ..RunReport::new("exact", &graph)
    })
}

fn cmd_estimate(
    path: &Path,
    est: &EstimatorArgs,
    threads: Option<usize>,
    reference: Option<f64>,
    trace: Option<&Path>,
) -> Result<()> {
    let graph = load_graph(path)?;
    let config = estimate_config(&graph, est, threads)?;
    let result = estimate_kemeny(&graph, &config)?;
    if let Some(trace) = trace {
        let mut out = BufWriter::new(File::create(trace).map_err(Error::Io)?);
        for (i, (&f, &steps)) in result.f_values.iter().zip(&result.walk_steps).enumerate() {
            serde_json::to_writer(
                &mut out,
                &TraceLine {
                    sample_index: i,
                    f,
                    walk_steps: steps,
                },
            )?;
            writeln!(out)?;
        }
        out.flush()?;
    }
    let rel_error = reference.map(|k| (result.kappa - k).abs() / k.abs());
    eprintln!(
        "kappa_hat = {}  (omega = {}, method = {:?}, root = {})",
        result.kappa,
        result.samples,
        result.method,
        graph.label(result.root)
    );
    emit(&RunReport {
        eccentricity: Some(result.eccentricity),
        root: Some(graph.label(result.root)),
        kappa_hat: Some(result.kappa),
        rel_error,
        samples: Some(result.samples),
        method: Some(result.method),
        walk_steps: Some(result.total_walk_steps()),
        seed: Some(config.seed),
        timings: BTreeMap::from([
            ("reference_s", secs(result.timings.reference)),
            ("sampling_s", secs(result.timings.sampling)),
        ]),
        ..RunReport::new("estimate", &graph)
    })
}

fn mode_of(mode: ModeArg) -> MaintenanceMode {
    match mode {
        ModeArg::Bsm => MaintenanceMode::Bsm,
        ModeArg::Ism => MaintenanceMode::Ism,
    }
}

fn write_index(store: &SampleStore, path: &Path) -> Result<()> {
    std::fs::write(path, dynamic::serialize(store))
        .map_err(Error::Io)
        .with_context(|| format!("writing {}", path.display()))
}

fn read_index(graph: Graph, path: &Path, threads: Option<usize>) -> Result<SampleStore> {
    let bytes = std::fs::read(path)
        .map_err(Error::Io)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut store = dynamic::deserialize(&bytes, graph).with_context(|| format!("loading {}", path.display()))?;
    store.set_threads(threads);
    Ok(store)
}

fn cmd_index_build(path: &Path, out: &Path, mode: ModeArg, est: &EstimatorArgs, threads: Option<usize>) -> Result<()> {
    let graph = load_graph(path)?;
    let config = estimate_config(&graph, est, threads)?;
    let start = Instant::now();
    let store = dynamic::build_index(graph, &config, mode_of(mode))?;
    let built = start.elapsed();
    write_index(&store, out)?;
    eprintln!(
        "index: {} samples, kappa_hat = {}, written to {}",
        store.sample_count(),
        store.current_estimate(),
        out.display()
    );
    emit(&RunReport {
        timings: BTreeMap::from([("build_s", secs(built))]),
        ..RunReport::from_store("index-build", &store)
    })
}

fn cmd_index_rebuild(path: &Path, index: &Path, out: &Path, threads: Option<usize>) -> Result<()> {
    let graph = load_graph(path)?;
    let store = read_index(graph.clone(), index, threads)?;
    let start = Instant::now();
    let fresh = store.redraw(graph)?;
    let built = start.elapsed();
    write_index(&fresh, out)?;
    eprintln!("index rebuilt: kappa_hat = {}", fresh.current_estimate());
    emit(&RunReport {
        timings: BTreeMap::from([("build_s", secs(built))]),
        ..RunReport::from_store("index-rebuild", &fresh)
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_update_replay(
    path: &Path,
    index: &Path,
    updates: &Path,
    mode: ReplayMode,
    threads: Option<usize>,
    save_index: Option<&Path>,
    save_graph: Option<&Path>,
) -> Result<()> {
    let graph = load_graph(path)?;
    let mut store = read_index(graph, index, threads)?;
    let events = {
        let file = File::open(updates)
            .map_err(Error::Io)
            .with_context(|| format!("opening {}", updates.display()))?;
        dynamic::parse_updates(BufReader::new(file), store.graph())
            .with_context(|| format!("parsing {}", updates.display()))?
    };
    match mode {
        ReplayMode::Bsm => store.set_mode(MaintenanceMode::Bsm)?,
        ReplayMode::Ism => store.set_mode(MaintenanceMode::Ism)?,
        ReplayMode::Rebuild => {}
    }
    let mut total = Duration::ZERO;
    for (step, &event) in events.iter().enumerate() {
        let (u, v) = (store.graph().label(event.u), store.graph().label(event.v));
        let report = match mode {
            ReplayMode::Rebuild => store.rebuild(event),
            _ => store.apply(event),
        }
        .with_context(|| format!("update {} ({u}, {v})", step + 1))?;
        total += report.latency;
        emit(&UpdateLine {
            step: step + 1,
            op: match event.op {
                dynamic::UpdateOp::Insert => "insert",
                dynamic::UpdateOp::Delete => "delete",
            },
            u,
            v,
            kappa_hat: report.kappa,
            latency_s: secs(report.latency),
            touched: report.touched,
            wilson_walks: report.wilson_walks,
            walk_steps: report.walk_steps,
            resistance: report.resistance,
            reference_repaired: report.reference_repaired,
            ess: report.ess,
        })?;
    }
    if let Some(p) = save_index {
        write_index(&store, p)?;
    }
    if let Some(p) = save_graph {
        let mut out = BufWriter::new(File::create(p).map_err(Error::Io)?);
        store.graph().write_edge_list(&mut out)?;
        out.flush()?;
    }
    let mean = if events.is_empty() { 0.0 } else { secs(total) / events.len() as f64 };
    eprintln!(
        "replayed {} updates: kappa_hat = {}, mean latency {:.3} ms",
        events.len(),
        store.current_estimate(),
        mean * 1e3
    );
    Ok(())
}

fn cmd_gen_updates(path: &Path, count: usize, insert_frac: f64, seed: u64, out: &Path) -> Result<()> {
    let graph = load_graph(path)?;
    let events = dynamic::generate_updates(&graph, count, insert_frac, seed)?;
    let mut w = BufWriter::new(File::create(out).map_err(Error::Io)?);
    dynamic::write_updates(&events, &graph, &mut w)?;
    w.flush()?;
    let inserts = events.iter().filter(|e| e.op == dynamic::UpdateOp::Insert).count();
    eprintln!(
        "wrote {} updates ({inserts} insertions, {} deletions) to {}",
        events.len(),
        events.len() - inserts,
        out.display()
    );
    Ok(())
}

/// `Ok(false)` when some identity fails.
fn cmd_oracle_check(max_n: usize, per_size: usize, seed: u64) -> Result<bool> {
    if max_n < 2 {
        bail!(Error::InvalidArgument("--max-n must be at least 2".into()));
    }
    if max_n > MAX_BATTERY_NODES {
        bail!(Error::Capacity {
            what: "--max-n for the oracle battery",
            limit: MAX_BATTERY_NODES as u128,
            actual: max_n as u128,
        });
    }
    let mut rng = stream(seed, Domain::Workload, 0);
    let outcomes = run_battery(max_n, per_size, &mut rng);
    let mut ok = true;
    for o in &outcomes {
        emit(o)?;
        eprintln!(
            "{} {:<28} cases {:>5}  max error {:.2e}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.cases,
            o.max_error
        );
        ok &= o.passed;
    }
    Ok(ok)
}
