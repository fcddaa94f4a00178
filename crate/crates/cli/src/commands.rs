use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use chasesim_core::bounds::{good_site_percolation_sim, good_site_prob_lower, BoundInputs};
use chasesim_core::couplings::{
    complete_coupling, jumpchain_coupling, star_coupling, tree_alpha_coupling, tree_passage_sample,
    verify_dominance, CoupledPair,
};
use chasesim_core::graph::{build_complete, build_path, build_regular_tree, build_star, RootDegree};
use chasesim_core::harness::{
    distribution_compare, estimate_crossing, parse_sweep_csv, run_replicas, sweep, SweepSpec, Workers,
};
use chasesim_core::process::{
    per_clock_run, run_to_fixation, snapshot, validate_params, ProcessParams, RunLimits, Simulation,
};
use chasesim_core::reductions::{complete_sample_x, sample_x_via_jump_chain, star_sample_x};
use chasesim_core::{Error, Graph, InitSpec, RandomStream};

use crate::graph_args::FamilyArg;
use crate::{
    BoundsAction, BoundsArgs, Cli, CliError, Command, CouplingArg, CrossingArgs, DominanceArgs, InitArg,
    OracleArgs, PercolateArgs, Rates, ReductionArg, SimulateArgs, SnapshotArgs, SweepArgs, VaryArg,
    VerifyCommand,
};

type CliResult<T> = Result<T, CliError>;

pub fn run(cli: &Cli) -> CliResult<()> {
    let workers = Workers::new(cli.workers);
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Graph(args) => emit(out, &args.build(FamilyArg::Path)?.0.to_text()),
        Command::Simulate(args) => simulate(args, &workers, out),
        Command::Snapshot(args) => snapshot_cmd(args, out),
        Command::Sweep(args) => sweep_cmd(args, &workers, out),
        Command::Crossing(args) => crossing_cmd(args, out),
        Command::Verify(VerifyCommand::Oracle(args)) => oracle(args, &workers, out),
        Command::Verify(VerifyCommand::Dominance(args)) => dominance(args, &workers, out),
        Command::Bounds(args) => bounds(args, &workers, out),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    let mut text = text.to_owned();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("--out {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(format!("standard output: {e}"))),
    }
}

fn emit_json(out: Option<&Path>, value: &impl serde::Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("results serialize to JSON");
    emit(out, &text)
}

fn params(r: &Rates) -> CliResult<ProcessParams> {
    validate_params(r.lambda, r.alpha).map_err(|e| CliError::Input(format!("--lambda/--alpha: {e}")))
}

fn init_spec(init: InitArg) -> InitSpec {
    match init {
        InitArg::StandardRoot => InitSpec::StandardRoot,
        InitArg::Band => InitSpec::Band,
        InitArg::Classical => InitSpec::ClassicalWithBlueNeighbor,
    }
}

fn input_err(flag: &str) -> impl Fn(Error) -> CliError + '_ {
    move |e| CliError::Input(format!("{flag}: {e}"))
}

fn simulate(args: &SimulateArgs, workers: &Workers, out: Option<&Path>) -> CliResult<()> {
    let (g, _) = args.graph.build(FamilyArg::Path)?;
    let p = params(&args.rates)?;
    let spec = init_spec(args.init);
    let mut limits = RunLimits::unbounded();
    if let Some(k) = args.max_events {
        limits = limits.with_max_events(k);
    }
    if args.stop_at_boundary {
        if g.boundary().is_empty() {
            return Err(CliError::Usage("--stop-at-boundary needs a tree of depth at least 1".into()));
        }
        limits = limits.with_boundary(g.boundary().to_vec());
    }
    if spec == InitSpec::Band {
        let rows = g.rows().ok_or_else(|| CliError::Input("--init band: needs --graph torus".into()))?;
        limits = limits.with_target(rows.row(rows.height - 1).collect());
    }
    let run = |rng: &mut RandomStream| run_to_fixation(&g, &p, spec, &limits, rng).map_err(input_err("--init"));
    if args.replicas == 0 {
        return Err(CliError::Usage("--replicas must be at least 1".into()));
    }
    if args.replicas == 1 {
        return emit_json(out, &run(&mut RandomStream::new(args.seed))?);
    }
    let outcomes = run_replicas(args.replicas, args.seed, workers, |_, rng| run(rng))
        .into_iter()
        .collect::<CliResult<Vec<_>>>()?;
    emit_json(out, &outcomes)
}

fn snapshot_cmd(args: &SnapshotArgs, out: Option<&Path>) -> CliResult<()> {
    let (g, _) = args.graph.build(FamilyArg::Torus)?;
    let p = params(&args.rates)?;
    let mut sim = Simulation::new(&g, init_spec(args.init)).map_err(input_err("--init"))?;
    let mut rng = RandomStream::new(args.seed);
    let mut fired = 0u64;
    if let Some(t) = args.time {
        if t.is_nan() || t < 0.0 {
            return Err(CliError::Usage("--time must be nonnegative".into()));
        }
    }
    let horizon = args.time.unwrap_or(f64::INFINITY);
    while sim.config().red_count() > 0 && args.events.is_none_or(|k| fired < k) {
        match sim.step_before(&p, &mut rng, horizon) {
            Ok(Some(_)) => fired += 1,
            Ok(None) | Err(Error::NoActiveEvents) => break,
            Err(e) => return Err(CliError::Input(e.to_string())),
        }
    }
    let snap = snapshot(sim.graph(), sim.config());
    let snap = if args.centered { snap.centered() } else { snap };
    emit(out, &snap.to_csv())
}

fn sweep_spec(args: &SweepArgs) -> CliResult<SweepSpec> {
    let mut fields = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("--config {}: {e}", path.display())))?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(map)) => map,
                Ok(_) => return Err(CliError::Input(format!("--config {}: expected a JSON object", path.display()))),
                Err(e) => return Err(CliError::Input(format!("--config {}: line {}: {e}", path.display(), e.line()))),
            }
        }
        None => serde_json::Map::new(),
    };
    let mut set = |key: &str, v: Value| {
        fields.insert(key.to_owned(), v);
    };
    if let Some(v) = args.vary {
        set("vary", json!(match v { VaryArg::Lambda => "lambda", VaryArg::Alpha => "alpha" }));
    }
    if let Some(v) = args.fixed_value {
        set("fixed_value", json!(v));
    }
    if let Some(v) = &args.grid {
        set("grid", json!(v));
    }
    if let Some(v) = &args.sizes {
        set("sizes", json!(v));
    }
    if let Some(v) = args.samples_per_point {
        set("samples_per_point", json!(v));
    }
    if let Some(v) = args.base_seed {
        set("base_seed", json!(v));
    }
    if let Some(v) = args.geometry {
        set("geometry", json!(v));
    }
    serde_json::from_value(Value::Object(fields)).map_err(|e| {
        CliError::Input(format!("sweep specification (from --config and flags): {e}"))
    })
}

fn sweep_cmd(args: &SweepArgs, workers: &Workers, out: Option<&Path>) -> CliResult<()> {
    let spec = sweep_spec(args)?;
    let table = sweep(&spec, workers).map_err(input_err("sweep"))?;
    if args.csv {
        return emit(out, &table.to_csv());
    }
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| match &r.outcome {
            Ok(e) => json!({
                "vary": table.vary.as_str(), "value": r.value, "L": r.size, "n": e.n,
                "escaped": e.escaped, "p_hat": e.p_hat, "ci_low": e.ci_low, "ci_high": e.ci_high,
                "seed_scheme": table.seed_scheme,
            }),
            Err(msg) => json!({
                "vary": table.vary.as_str(), "value": r.value, "L": r.size,
                "seed_scheme": table.seed_scheme, "error": msg,
            }),
        })
        .collect();
    emit_json(out, &rows)
}

fn crossing_cmd(args: &CrossingArgs, out: Option<&Path>) -> CliResult<()> {
    let name = args.input.display().to_string();
    let text = if name == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Input(format!("standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(&args.input).map_err(|e| CliError::Input(format!("{name}: {e}")))?
    };
    let rows = parse_sweep_csv(&text).map_err(|e| CliError::Input(format!("{name}: {e}")))?;
    let estimate = estimate_crossing(&rows).map_err(|e| CliError::Input(format!("{name}: {e}")))?;
    emit_json(out, &estimate)
}

fn oracle(args: &OracleArgs, workers: &Workers, out: Option<&Path>) -> CliResult<()> {
    let p = params(&args.rates)?;
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let n_or = |default: usize| args.graph.n.unwrap_or(default);
    let direct = |g: &Graph, limits: &RunLimits, seed: u64| -> CliResult<Vec<u64>> {
        run_replicas(args.samples, seed, workers, |_, rng| {
            run_to_fixation(g, &p, InitSpec::StandardRoot, limits, rng).map(|o| o.damage)
        })
        .into_iter()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Input(e.to_string()))
    };
    let collect = |v: Vec<Result<u64, Error>>| -> CliResult<Vec<u64>> {
        v.into_iter()
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Input(format!("--lambda/--alpha: {e}")))
    };
    let (seed_a, seed_b) = (args.seed, args.seed.wrapping_add(1));
    let (label, a, b) = match args.reduction {
        ReductionArg::JumpChain => {
            let g = build_path(n_or(200)).map_err(input_err("--n"))?;
            let limits = RunLimits::unbounded().with_boundary(vec![g.n() - 1]);
            let reduced = collect(run_replicas(args.samples, seed_b, workers, |_, rng| {
                sample_x_via_jump_chain(&p, rng)
            }))?;
            (format!("path({})", g.n()), direct(&g, &limits, seed_a)?, reduced)
        }
        ReductionArg::Star => {
            let leaves = n_or(5);
            let g = build_star(leaves).map_err(input_err("--n"))?;
            let reduced = run_replicas(args.samples, seed_b, workers, |_, rng| star_sample_x(leaves, &p, rng));
            (format!("star({leaves})"), direct(&g, &RunLimits::unbounded(), seed_a)?, reduced)
        }
        ReductionArg::Complete => {
            let n = n_or(6);
            let g = build_complete(n).map_err(input_err("--n"))?;
            let reduced = collect(run_replicas(args.samples, seed_b, workers, |_, rng| {
                complete_sample_x(n, &p, rng)
            }))?;
            (format!("complete({n})"), direct(&g, &RunLimits::unbounded(), seed_a)?, reduced)
        }
        ReductionArg::TreePassage => {
            let depth = args.graph.depth.unwrap_or(4);
            let g = match args.graph.family {
                Some(_) => args.graph.build(FamilyArg::Tree)?.0,
                None => build_regular_tree(args.graph.offspring, depth, RootDegree::Rooted)
                    .map_err(input_err("--depth"))?,
            };
            let reduced = collect(run_replicas(args.samples, seed_b, workers, |_, rng| {
                tree_passage_sample(&g, &p, rng).map(|o| o.x)
            }))
            .map_err(|_| CliError::Input("--graph: the passage-time construction needs a tree".into()))?;
            (format!("tree({},{depth})", args.graph.offspring), direct(&g, &RunLimits::unbounded(), seed_a)?, reduced)
        }
        ReductionArg::PerClock => {
            let (g, label) = args.graph.build(FamilyArg::Path)?;
            let reduced = collect(run_replicas(args.samples, seed_b, workers, |_, rng| {
                per_clock_run(&g, &p, InitSpec::StandardRoot, &RunLimits::unbounded(), rng).map(|o| o.damage)
            }))?;
            (label, direct(&g, &RunLimits::unbounded(), seed_a)?, reduced)
        }
    };
    let report = distribution_compare(&a, &b, args.min_bin).map_err(|e| CliError::Input(format!("{label}: {e}")))?;
    emit_json(
        out,
        &json!({
            "graph": label, "samples": args.samples, "chi2": report.chi2, "dof": report.dof,
            "p_value": report.p_value, "pass": report.pass,
        }),
    )?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{label}: chi-squared test rejected equality (p = {})", report.p_value)))
    }
}

#[derive(Debug, Deserialize)]
struct FixturePair {
    x_large: u64,
    x_small: u64,
}

fn dominance(args: &DominanceArgs, workers: &Workers, out: Option<&Path>) -> CliResult<()> {
    if args.pairs == 0 && args.fixture.is_none() {
        return Err(CliError::Usage("--pairs must be at least 1".into()));
    }
    let lp = args.lambda_prime.unwrap_or(args.lambda);
    let ap = args.alpha_prime.unwrap_or(args.alpha);
    let np = args.n_prime.unwrap_or(args.n);
    let (l, a, n) = (args.lambda, args.alpha, args.n);
    let tree = match args.coupling {
        CouplingArg::TreeAlpha => Some(
            build_regular_tree(args.offspring, args.depth, RootDegree::Rooted).map_err(input_err("--depth"))?,
        ),
        _ => None,
    };
    let sampled = run_replicas(args.pairs, args.seed, workers, |_, rng| match args.coupling {
        CouplingArg::TreeAlpha => {
            if lp != l {
                return Err(Error::BadOrder("the tree coupling varies alpha only; drop --lambda-prime".into()));
            }
            tree_alpha_coupling(tree.as_ref().unwrap(), l, a, ap, rng).map(|c| c.pair)
        }
        CouplingArg::JumpChain => jumpchain_coupling(l, lp, a, ap, rng).map(|c| c.pair),
        CouplingArg::Star => star_coupling(n, np, l, lp, a, ap, rng).map(|c| c.pair),
        CouplingArg::Complete => complete_coupling(n, np, l, lp, a, ap, rng).map(|c| c.pair),
    });
    let mut pairs: Vec<CoupledPair> = sampled
        .into_iter()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Input(format!("coupling parameters: {e}")))?;

    if let Some(path) = &args.fixture {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("--fixture {}: {e}", path.display())))?;
        let extra: Vec<FixturePair> = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("--fixture {}: line {}: {e}", path.display(), e.line())))?;
        let template = pairs.first().copied();
        for f in extra {
            let mut pair = template.unwrap_or(CoupledPair {
                x_large: 0,
                x_small: 0,
                dominant: chasesim_core::couplings::CouplingPoint { lambda: l, alpha: a, size: None },
                dominated: chasesim_core::couplings::CouplingPoint { lambda: lp, alpha: ap, size: None },
                shared_seed: 0,
            });
            pair.x_large = f.x_large;
            pair.x_small = f.x_small;
            pair.shared_seed = 0;
            pairs.push(pair);
        }
    }
    let report = verify_dominance(&pairs).map_err(|e| CliError::Input(e.to_string()))?;
    let coupling = match args.coupling {
        CouplingArg::TreeAlpha => "tree-alpha",
        CouplingArg::JumpChain => "jump-chain",
        CouplingArg::Star => "star",
        CouplingArg::Complete => "complete",
    };
    let sizes = matches!(args.coupling, CouplingArg::Star | CouplingArg::Complete);
    emit_json(
        out,
        &json!({
            "coupling": coupling,
            "dominant": {"lambda": l, "alpha": a, "size": sizes.then_some(n)},
            "dominated": {"lambda": lp, "alpha": ap, "size": sizes.then_some(np)},
            "n_pairs": report.n_pairs,
            "n_violations": report.n_violations,
            "pass": report.pass,
        }),
    )?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{coupling}: {} of {} pairs have X' > X",
            report.n_violations, report.n_pairs
        )))
    }
}

fn bounds(args: &BoundsArgs, workers: &Workers, out: Option<&Path>) -> CliResult<()> {
    if let Some(BoundsAction::Percolate(p)) = &args.action {
        return percolate(p, workers, out);
    }
    let missing = |flag: &str| CliError::Usage(format!("bounds: {flag} is required"));
    let inputs = BoundInputs {
        d: args.d.ok_or_else(|| missing("--d"))?,
        alpha: args.alpha.ok_or_else(|| missing("--alpha"))?,
        p_c: args.pc.ok_or_else(|| missing("--pc"))?,
    };
    let report = inputs.report().map_err(|e| {
        let flag = match e {
            Error::BadDegree(_) => "--d",
            _ => "--alpha/--pc",
        };
        CliError::Input(format!("{flag}: {e}"))
    })?;
    emit_json(out, &report)
}

fn percolate(args: &PercolateArgs, workers: &Workers, out: Option<&Path>) -> CliResult<()> {
    let (g, label) = args.graph.build(FamilyArg::File)?;
    let p = params(&args.rates)?;
    if args.replicas == 0 {
        return Err(CliError::Usage("--replicas must be at least 1".into()));
    }
    let draws = run_replicas(args.replicas, args.seed, workers, |_, rng| {
        let s = good_site_percolation_sim(&g, &p, rng);
        (s.good_mask.iter().filter(|&&b| b).count(), s.root_cluster_size)
    });
    let good: usize = draws.iter().map(|d| d.0).sum();
    let clusters: Vec<usize> = draws.iter().map(|d| d.1).collect();
    let mean_cluster = clusters.iter().sum::<usize>() as f64 / clusters.len() as f64;
    emit_json(
        out,
        &json!({
            "graph": label,
            "vertices": g.n(),
            "replicas": args.replicas,
            "good_fraction": good as f64 / (g.n() * args.replicas) as f64,
            "good_site_prob_lower": good_site_prob_lower(p.lambda(), p.alpha(), g.max_degree()),
            "mean_root_cluster_size": mean_cluster,
            "root_cluster_sizes": clusters,
        }),
    )
}
